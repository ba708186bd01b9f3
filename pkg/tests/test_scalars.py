from fractions import Fraction

import pytest

from bgnf.scalars import (
    CC,
    FieldError,
    QuadExt,
    RATIONAL,
    float_field,
    quad_field,
    sqrt_in_field,
    square_free_core,
)


def test_square_free_core():
    assert square_free_core(1) == 1
    assert square_free_core(60) == 15
    assert square_free_core(196) == 1
    assert square_free_core(120) == 30


def test_quadext_arithmetic_exact():
    a = QuadExt(Fraction(1, 2), Fraction(3), 5)
    b = QuadExt(2, Fraction(-1, 3), 5)
    assert a + b == QuadExt(Fraction(5, 2), Fraction(8, 3), 5)
    assert a * b == QuadExt(Fraction(1, 2) * 2 + Fraction(3) * Fraction(-1, 3) * 5,
                            Fraction(1, 2) * Fraction(-1, 3) + Fraction(3) * 2, 5)
    # division rationalizes eagerly: the result is again an (a, b) pair
    q = a / b
    assert isinstance(q, QuadExt)
    assert q * b == a


def test_quadext_sign_and_order():
    assert QuadExt(0, 1, 2).sign() == 1
    assert QuadExt(-3, 2, 2).sign() < 0      # 2 sqrt2 = 2.83 < 3
    assert QuadExt(-2, Fraction(3, 2), 2).sign() > 0  # 1.5 sqrt2 = 2.12 > 2
    assert QuadExt(1, 1, 3) > 0
    assert abs(QuadExt(-1, 0, 7)) == QuadExt(1, 0, 7)


def test_mixed_quadratic_fields_rejected():
    with pytest.raises(FieldError):
        QuadExt(1, 1, 2) + QuadExt(1, 1, 3)
    with pytest.raises(FieldError):
        quad_field(2).join(quad_field(3))


def test_rational_embeds_into_quadratic():
    f = quad_field(5)
    x = f.coerce(Fraction(2, 3))
    assert x == QuadExt(Fraction(2, 3), 0, 5)
    assert RATIONAL.join(f) == f


def test_exact_float_mix_requires_promotion():
    with pytest.raises(FieldError):
        RATIONAL.join(float_field())
    ff = float_field(64)
    assert float(ff.coerce(Fraction(1, 3))) == pytest.approx(1 / 3)


def test_sqrt_in_field():
    assert sqrt_in_field(Fraction(9, 4), RATIONAL) == Fraction(3, 2)
    assert sqrt_in_field(Fraction(2), RATIONAL) is None
    f = quad_field(15)
    assert sqrt_in_field(Fraction(15), f) == QuadExt(0, 1, 15)
    assert sqrt_in_field(Fraction(60), f) == QuadExt(0, 2, 15)
    # (1 + sqrt15)^2 = 16 + 2 sqrt15
    root = sqrt_in_field(QuadExt(16, 2, 15), f)
    assert root == QuadExt(1, 1, 15)


def test_cc_complex_arithmetic():
    a = CC(Fraction(1), Fraction(2))
    b = CC(Fraction(3), Fraction(-1))
    assert a * b == CC(Fraction(5), Fraction(5))
    assert a.conj() == CC(Fraction(1), Fraction(-2))
    assert a.abs2() == Fraction(5)
    assert (a / b) * b == a


def test_field_elem_round_trip_text():
    f = quad_field(15)
    x = QuadExt(Fraction(-1, 2), Fraction(7, 3), 15)
    assert f.parse_elem(f.format_elem(x)) == x
    assert RATIONAL.parse_elem(RATIONAL.format_elem(Fraction(-22, 7))) == Fraction(-22, 7)

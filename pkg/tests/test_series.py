from fractions import Fraction as F

import math

import pytest

from bgnf.scalars import RATIONAL, quad_field
from bgnf.series import SeriesE, SeriesError


def S(coeffs, err=math.inf):
    return SeriesE(RATIONAL, [F(c) for c in coeffs], err)


def test_basic_arithmetic_and_error_orders():
    a = S([1, 2], err=3)          # 1 + 2E + O(E^3)
    b = S([0, 1, 5], err=4)       # E + 5E^2 + O(E^4)
    assert (a + b).err_order == 3
    assert (a + b).coeffs == [F(1), F(3), F(5)]
    p = a * b
    # tail: min(3 + val(b)=4, 4 + val(a)=4, 7) = 4
    assert p.err_order == 4
    assert p.coeffs == [F(0), F(1), F(7), F(10)]


def test_mul_error_with_known_zero():
    z = SeriesE.zero(RATIONAL, 2)      # O(E^2)
    a = S([0, 0, 1], err=5)            # E^2 + O(E^5)
    p = z * a
    assert p.known_zero()
    assert p.err_order == 4            # O(E^2) * E^2


def test_inverse_and_division():
    a = S([1, -1], err=5)
    inv = a.inverse()
    assert inv.coeffs == [F(1), F(1), F(1), F(1), F(1)]
    one = a * inv
    assert one.coefficient(0) == 1
    assert all(one.coefficient(k) == 0 for k in range(1, 5))
    with pytest.raises(SeriesError):
        S([0, 1]).inverse()


def test_divide_with_common_valuation():
    num = S([0, 0, 4, 8], err=5)
    den = S([0, 2, 2], err=5)
    q = num.divide(den)
    assert q.coefficient(0) == 0
    assert q.coefficient(1) == 2
    # (4E^2+8E^3)/(2E+2E^2) = 2E(1+2E)/(1+E) = 2E + 2E^2 - 2E^3...
    assert q.coefficient(2) == 2
    with pytest.raises(SeriesError):
        den.divide(num)


def test_substitution():
    outer = S([1, 1, 1], err=4)        # 1 + u + u^2 + O(u^4)
    inner = S([0, 2, 1], err=4)        # 2E + E^2
    got = outer.substitute(inner)
    assert got.coefficient(0) == 1
    assert got.coefficient(1) == 2
    assert got.coefficient(2) == 5
    with pytest.raises(SeriesError):
        outer.substitute(S([1, 1]))


def test_sqrt_exact_leading_square():
    s = S([0, 0, 16, 208], err=5)
    r = s.sqrt()
    assert r.coefficient(1) == 4
    assert r.coefficient(2) == F(208) / 8
    sq = r * r
    assert sq.coefficient(2) == 16
    assert sq.coefficient(3) == 208


def test_sqrt_quadratic_field():
    from bgnf.scalars import QuadExt
    f = quad_field(2)
    s = SeriesE(f, [f.coerce(0), f.coerce(0), f.coerce(2)], 4)  # 2E^2 + O(E^4)
    r = s.sqrt()
    assert r.coefficient(1) == QuadExt(0, 1, 2)     # sqrt(2) E
    assert (r * r).coefficient(2) == 2


def test_sqrt_failures():
    with pytest.raises(SeriesError):
        S([0, 1]).sqrt()             # odd leading exponent
    with pytest.raises(SeriesError):
        S([2]).sqrt()                # 2 is not a rational square


def test_leading_sign_and_truncate():
    s = S([0, 0, -3, 5], err=6)
    assert s.leading() == (2, F(-3))
    assert s.leading_sign() == -1
    t = s.truncate(2)
    assert t.known_zero() and t.err_order == 2
    assert SeriesE.zero(RATIONAL).leading_sign() == 0


def test_eval_float():
    s = S([2, 4, 22])
    assert s.eval_float(1e-3) == pytest.approx(2 + 4e-3 + 22e-6)

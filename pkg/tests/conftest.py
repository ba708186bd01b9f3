"""Shared fixtures and independent oracles for the test suite.

The oracles here deliberately avoid the production shortcuts:

* ``oracle_apply_D`` differentiates monomials with the product rule and
  assembles D = sum alpha_j (y_j d/dx_j - x_j d/dy_j) term by term (complex
  chart via the z/zbar form), instead of the eigenvalue formula;
* ``oracle_split_solve`` splits and solves the homological equation by
  scanning that differentiated action monomial by monomial;
* ``sympy_bracket`` and ``sympy_compose`` expand everything symbolically
  with an unrelated library.
"""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from bgnf.scalars import CC, RATIONAL, QuadExt, quad_field
from bgnf.poly import COMPLEX, REAL, Polynomial
from bgnf.resonance import Frequencies


def all_exponents(deg):
    return [
        (k1, k2, l1, deg - k1 - k2 - l1)
        for k1 in range(deg + 1)
        for k2 in range(deg + 1 - k1)
        for l1 in range(deg + 1 - k1 - k2)
    ]


def random_real_hamiltonian(rng, alpha, order=6, terms_per_degree=3,
                            field=RATIONAL):
    """Random real-chart Hamiltonian with the prescribed quadratic part."""
    half = Fraction(1, 2)
    coeffs = {
        (2, 0, 0, 0): CC(field.coerce(Fraction(alpha[0]) * half)),
        (0, 0, 2, 0): CC(field.coerce(Fraction(alpha[0]) * half)),
        (0, 2, 0, 0): CC(field.coerce(Fraction(alpha[1]) * half)),
        (0, 0, 0, 2): CC(field.coerce(Fraction(alpha[1]) * half)),
    }
    for deg in range(3, order + 1):
        for e in rng.sample(all_exponents(deg), terms_per_degree):
            c = Fraction(rng.randint(-20, 20), rng.randint(1, 12))
            if c:
                coeffs[e] = CC(field.coerce(c))
    return Polynomial(REAL, field, order, coeffs)


def random_real_quadratic_freqs(rng, order=6, terms_per_degree=3):
    """Hamiltonian with alpha = (1, sqrt 2), coefficients in Q(sqrt 2)."""
    field = quad_field(2)
    rt2 = QuadExt(0, 1, 2)
    alpha = (Fraction(1), rt2)
    coeffs = {
        (2, 0, 0, 0): CC(field.coerce(Fraction(1, 2))),
        (0, 0, 2, 0): CC(field.coerce(Fraction(1, 2))),
        (0, 2, 0, 0): CC(rt2 / 2),
        (0, 0, 0, 2): CC(rt2 / 2),
    }
    for deg in range(3, order + 1):
        for e in rng.sample(all_exponents(deg), terms_per_degree):
            c = Fraction(rng.randint(-20, 20), rng.randint(1, 12))
            if c:
                coeffs[e] = CC(field.coerce(c))
    return Polynomial(REAL, field, order, coeffs), alpha


def random_real_valued_complex(rng, order=6, terms_per_degree=3):
    """Random real-valued complex-chart polynomial (a_lk = conj(a_kl))."""
    coeffs = {}
    for deg in range(2, order + 1):
        for e in rng.sample(all_exponents(deg), terms_per_degree):
            re = Fraction(rng.randint(-9, 9), rng.randint(1, 8))
            im = Fraction(rng.randint(-9, 9), rng.randint(1, 8))
            k1, k2, l1, l2 = e
            mirror = (l1, l2, k1, k2)
            if e == mirror:
                im = Fraction(0)
            coeffs[e] = CC(re, im)
            coeffs[mirror] = CC(re, -im)
    return Polynomial(COMPLEX, RATIONAL, order, coeffs)


# ---------------------------------------------------------------------------
# independent oracles
# ---------------------------------------------------------------------------


def oracle_apply_D(p: Polynomial, alpha):
    """D by the product rule: D = -i sum_j a_j (z_j d/dz_j - zb_j d/dzb_j).

    Implemented monomial by monomial with explicit differentiation (exponent
    drop and coefficient multiply), never through the eigenvalue shortcut.
    """
    field = p.field
    out = Polynomial.zero(COMPLEX, field, p.order)
    for j in range(2):
        a_j = field.coerce(alpha[j])
        # z_j * d/dz_j keeps exponents; build via explicit diff then remultiply
        dz = p.diff(j)
        dzb = p.diff(2 + j)
        zf = Polynomial.monomial(COMPLEX, tuple(1 if i == j else 0 for i in range(4)),
                                 1, field, p.order)
        zbf = Polynomial.monomial(COMPLEX, tuple(1 if i == 2 + j else 0 for i in range(4)),
                                  1, field, p.order)
        term = (zf * dz - zbf * dzb).scale(CC(field.zero(), -a_j))
        out = out + term
    return out


def oracle_split_solve(p: Polynomial, alpha):
    """(kernel, image, G) by scanning the differentiated action of D.

    A monomial goes to the kernel iff its image under ``oracle_apply_D``
    vanishes; G is assembled by dividing each image monomial by its observed
    (differentiated, not formulaic) eigenvalue.
    """
    field = p.field
    ker = {}
    img = {}
    g = {}
    for e, c in p.coeffs.items():
        mono = Polynomial(COMPLEX, field, p.order, {e: CC(field.one())},
                          _clean=True)
        action = oracle_apply_D(mono, alpha)
        if action.is_zero():
            ker[e] = c
        else:
            lam = action.coeffs[e]     # observed eigenvalue as a CC
            img[e] = c
            g[e] = CC(field.zero()) - c / lam
    return (Polynomial(COMPLEX, field, p.order, ker, _clean=True),
            Polynomial(COMPLEX, field, p.order, img, _clean=True),
            Polynomial(COMPLEX, field, p.order, g))


def sympy_vars():
    import sympy
    return sympy.symbols("y1 y2 x1 x2")


def poly_to_sympy(p: Polynomial, variables):
    import sympy
    expr = sympy.Integer(0)
    for e, c in p.coeffs.items():
        if not c.is_real():
            raise ValueError("sympy oracle handles real polynomials")
        term = sympy.Rational(Fraction(c.re))
        for v, k in zip(variables, e):
            term *= v ** k
        expr += term
    return sympy.expand(expr)


def sympy_bracket(p: Polynomial, q: Polynomial, order: int | None = None):
    import sympy
    y1, y2, x1, x2 = sympy_vars()
    fp = poly_to_sympy(p, (y1, y2, x1, x2))
    fq = poly_to_sympy(q, (y1, y2, x1, x2))
    expr = (sympy.diff(fp, y1) * sympy.diff(fq, x1)
            - sympy.diff(fp, x1) * sympy.diff(fq, y1)
            + sympy.diff(fp, y2) * sympy.diff(fq, x2)
            - sympy.diff(fp, x2) * sympy.diff(fq, y2))
    expr = sympy.expand(expr)
    if order is not None and expr != 0:
        out = sympy.Integer(0)
        poly = sympy.Poly(expr, y1, y2, x1, x2)
        for monom, coeff in poly.terms():
            if sum(monom) <= order:
                term = coeff
                for v, k in zip((y1, y2, x1, x2), monom):
                    term *= v ** k
                out += term
        expr = sympy.expand(out)
    return expr


def sympy_compose(p: Polynomial, phi, order):
    import sympy
    variables = sympy_vars()
    fp = poly_to_sympy(p, variables)
    images = [poly_to_sympy(c, variables) for c in phi.components]
    composed = sympy.expand(fp.subs(list(zip(variables, images)),
                                    simultaneous=True))
    # drop degrees > order
    out = sympy.Integer(0)
    poly = sympy.Poly(composed, *variables)
    for monom, coeff in poly.terms():
        if sum(monom) <= order:
            term = coeff
            for v, k in zip(variables, monom):
                term *= v ** k
            out += term
    return sympy.expand(out)


@pytest.fixture
def rng():
    return random.Random(20260810)


@pytest.fixture
def freqs12():
    return Frequencies(Fraction(1), Fraction(2))


@pytest.fixture
def freqs11():
    return Frequencies(Fraction(1), Fraction(1))

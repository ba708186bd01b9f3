"""Normalizer, symmetry preservation, Psi conjugation, rescaling family."""

from fractions import Fraction as F

import pytest

from bgnf.scalars import CC, RATIONAL, QuadExt
from bgnf.poly import (
    COMPLEX,
    REAL,
    Polynomial,
    apply_D,
    symplectic_defect,
    to_complex,
    to_real,
)
from bgnf.resonance import Frequencies
from bgnf.normalform import (
    NormalFormResult,
    check_plane_invariance,
    check_zp_invariance,
    normalize,
    psi_conjugate,
    rescale,
    symmetric_normalize_zp,
    verify,
)
from bgnf.models import henon_heiles, hill_regularized, isosceles

from conftest import random_real_hamiltonian


def test_pure_h2_normalizes_trivially(freqs12):
    h = Polynomial.quadratic_h2((F(1), F(2)), REAL, RATIONAL, 6)
    nf = normalize(h, 6, freqs12)
    assert nf.h_n == Polynomial.quadratic_h2((F(1), F(2)), COMPLEX, RATIONAL, 6)
    assert all(g.is_zero() for g in nf.generators)
    assert not nf.table


def test_rejects_bad_quadratic_part(freqs12):
    h = Polynomial.from_terms(REAL, [((2, 0, 0, 0), 1), ((0, 0, 2, 0), 1)],
                              RATIONAL, 6)
    with pytest.raises(ValueError, match="quadratic part"):
        normalize(h, 4, freqs12)


def test_rejects_insufficient_taylor_data(freqs12):
    h = Polynomial.quadratic_h2((F(1), F(2)), REAL, RATIONAL, 4)
    with pytest.raises(ValueError, match="Taylor data"):
        normalize(h, 6, freqs12)


def test_henon_heiles_gamma3_zero_gamma4_exact():
    m = henon_heiles(order=4)
    nf = m.normal_form(4)
    assert nf.gamma(3).is_zero()
    want = {
        (2, 0, 2, 0): CC(F(-5, 48)), (0, 2, 0, 2): CC(F(-5, 48)),
        (1, 1, 1, 1): CC(F(1, 12)),
        (0, 2, 2, 0): CC(F(-7, 48)), (2, 0, 0, 2): CC(F(-7, 48)),
    }
    assert nf.gamma(4).coeffs == want


def test_henon_heiles_g3_exact_value():
    nf = henon_heiles(order=4).normal_form(4)
    g3 = nf.generators[0]
    want = Polynomial.from_terms(REAL, [
        ((2, 1, 0, 0), F(2, 3)), ((1, 0, 1, 1), F(2, 3)),
        ((0, 3, 0, 0), F(-2, 9)), ((0, 1, 2, 0), F(1, 3)),
        ((0, 1, 0, 2), F(-1, 3))], RATIONAL, g3.order)
    assert g3 == want


def test_normalize_accepts_complex_chart_input(rng):
    h = random_real_hamiltonian(rng, (1, 2), order=5, terms_per_degree=2)
    a = normalize(h, 5, Frequencies(F(1), F(2)))
    b = normalize(to_complex(h), 5, Frequencies(F(1), F(2)))
    assert a.h_n == b.h_n
    assert verify(b, to_complex(h)).ok


def test_normalize_determinism():
    m1 = henon_heiles(order=6).normal_form(6)
    m2 = henon_heiles(order=6).normal_form(6)
    assert m1.h_n == m2.h_n
    assert m1.table == m2.table


def test_order_stability_prefix_property(rng):
    # normalize(H, N) truncated to N-1 equals normalize(H, N-1)
    h = random_real_hamiltonian(rng, (1, 2), order=6, terms_per_degree=3)
    nf6 = normalize(h, 6, Frequencies(F(1), F(2)))
    nf5 = normalize(h.truncate(5), 5, Frequencies(F(1), F(2)))
    assert nf6.h_n.up_to_degree(5) == nf5.h_n.truncate(5)


def test_gauge_no_kernel_monomials(rng):
    from bgnf.poly import split_ker_im
    h = random_real_hamiltonian(rng, (1, 1), order=5, terms_per_degree=4)
    nf = normalize(h, 5, Frequencies(F(1), F(1)))
    for g in nf.generators:
        if g.is_zero():
            continue
        ker, _ = split_ker_im(to_complex(g), nf.res)
        assert ker.is_zero()


def test_verify_passes_and_catches_corruption(rng):
    h = random_real_hamiltonian(rng, (2, 3), order=5, terms_per_degree=3)
    nf = normalize(h, 5, Frequencies(F(2), F(3)))
    assert verify(nf, h).ok
    # corrupt one coefficient
    bad_hn = nf.h_n + Polynomial.monomial(COMPLEX, (2, 0, 2, 0), F(1, 1000),
                                          RATIONAL, nf.order)
    bad = NormalFormResult(h_n=bad_hn, generators=nf.generators,
                           transform=nf.transform, table=nf.table,
                           alpha=nf.alpha, res=nf.res, order=nf.order)
    rep = verify(bad, h)
    assert not rep.ok
    assert any("H o Phi" in f or "D.H_N" in f for f in rep.failures)


def test_verify_hill_builtin_d_annihilation():
    m = hill_regularized()
    assert apply_D(m.averaged_form.h_n, (F(1), F(1))).is_zero()


def test_plane_invariance_checks():
    iso = isosceles(3, 1, order=4)
    assert check_plane_invariance(iso.poly, "z2")
    assert not check_plane_invariance(iso.poly, "z1")
    hh = henon_heiles()
    assert not check_plane_invariance(hh.poly, "z2")   # x1^2 x2 term
    assert check_plane_invariance(hh.poly, "z1")
    h2 = Polynomial.quadratic_h2((F(1), F(2)), REAL, RATIONAL, 4)
    assert check_plane_invariance(h2, "z1")
    assert check_plane_invariance(h2, "z2")


def test_plane_invariance_preserved_by_normalization():
    iso = isosceles(3, 1, order=4)
    nf = iso.normal_form(4)
    assert check_plane_invariance(to_real(nf.h_n), "z2")
    for g in nf.generators:
        assert check_plane_invariance(g, "z2")


def test_zp_invariance_exact_cases():
    hh = henon_heiles()
    assert check_zp_invariance(hh.poly, 3, "R")
    assert not check_zp_invariance(hh.poly, 4, "R")
    hill = hill_regularized()
    assert check_zp_invariance(hill.poly, 4, "R")
    h2 = Polynomial.quadratic_h2((F(1), F(1)), REAL, RATIONAL, 4)
    for p in (2, 3, 4, 6):
        assert check_zp_invariance(h2, p, "R")


def test_zp_invariance_script_r_any_p():
    hill = hill_regularized()
    psi_nf, _ = hill.analysis_form()
    assert check_zp_invariance(psi_nf.h_n, 4, "script-R")
    assert not check_zp_invariance(psi_nf.h_n, 8, "script-R")


def test_zp_float_fallback():
    h2 = Polynomial.quadratic_h2((F(1), F(1)), REAL, RATIONAL, 4)
    with pytest.raises(ValueError, match="exact rotation"):
        check_zp_invariance(h2, 5, "R")
    assert check_zp_invariance(h2.to_float(), 5, "R")


def test_zp_preservation_through_normalization():
    hh = henon_heiles(order=6)
    nf = symmetric_normalize_zp(hh.poly, 6, 3)
    assert check_zp_invariance(to_real(nf.h_n), 3, "R")
    hill = hill_regularized()
    nf = symmetric_normalize_zp(hill.poly, 6, 4)
    assert check_zp_invariance(to_real(nf.h_n), 4, "R")


def test_psi_conjugate_h2_invariant():
    h2 = Polynomial.quadratic_h2((F(1), F(1)), REAL, RATIONAL, 4)
    assert psi_conjugate(h2) == h2


def test_psi_conjugate_henon_heiles_radial():
    nf = henon_heiles(order=4).normal_form(4)
    conj = psi_conjugate(to_real(nf.h_n))
    z = to_complex(conj)
    assert z.coefficient((2, 0, 2, 0)) == CC(F(1, 24))
    assert z.coefficient((1, 1, 1, 1)) == CC(F(-1, 2))
    assert z.coefficient((0, 2, 0, 2)) == CC(F(1, 24))
    assert z.coefficient((0, 2, 2, 0)).is_zero()


def test_psi_twice_is_linear_consistency(rng):
    # conjugating twice equals substituting the squared matrix directly
    from bgnf.normalform import psi_matrix
    from bgnf.poly import linear_substitute
    p = random_real_hamiltonian(rng, (1, 1), order=4, terms_per_degree=2)
    twice = psi_conjugate(psi_conjugate(p))
    m, fld = psi_matrix(p.field)
    sq = [[sum(m[i][k] * m[k][j] for k in range(4)) for j in range(4)]
          for i in range(4)]
    direct = linear_substitute(p.promote(fld), sq, fld).demote_to_rational()
    assert twice == direct


def test_rescale_family():
    h = Polynomial.from_terms(
        REAL, [((2, 0, 0, 0), F(1, 2)), ((0, 0, 2, 0), F(1, 2)),
               ((0, 0, 3, 0), 1), ((0, 0, 0, 6), 1)], RATIONAL, 6)
    # eps = delta: exactly eps^{-2} H(eps .)
    eps = F(1, 3)
    scaled = rescale(h, eps, eps, 4)
    for e in h.coeffs:
        d = sum(e)
        assert scaled.coefficient(e) == h.coefficient(e) * CC(eps ** (d - 2))
    # delta = 0: the degree-6 tail is switched off
    member = rescale(h, eps, F(0), 4)
    assert member.coefficient((0, 0, 0, 6)).is_zero()
    assert member.coefficient((0, 0, 3, 0)) == h.coefficient((0, 0, 3, 0)) * CC(eps ** 1)
    # eps = delta = 1: unchanged
    assert rescale(h, F(1), F(1), 4) == h


def test_symplectic_defect_of_normalizer_output(rng):
    h = random_real_hamiltonian(rng, (1, 2), order=6, terms_per_degree=2)
    nf = normalize(h, 6, Frequencies(F(1), F(2)))
    assert symplectic_defect(nf.transform, 6) == 0.0


def test_verify_quadratic_field_end_to_end():
    # the full normalize/compose/defect chain over Q(sqrt 15)
    m = isosceles(1, 1, order=4)
    nf = m.normal_form(4)
    assert nf.field.kind == "quadratic" and nf.field.d == 15
    assert verify(nf, m.poly).ok


def test_isosceles_alpha3_gamma4_exact():
    nf = isosceles(3, 1, order=4).normal_form(4)
    assert nf.coefficient((2, 0, 2, 0)) == CC(F(-3, 4))
    assert nf.coefficient((1, 1, 1, 1)) == CC(F(-27, 10))
    # the general-alpha closed form gives -663/160 at alpha = 3 (the sign
    # consistent with the Omega closed forms)
    assert nf.coefficient((0, 2, 0, 2)) == CC(F(-663, 160))


def test_isosceles_general_alpha_gamma4_closed_forms():
    # a_{2,0,2,0} = -3/(4 varpi); the other two radial coefficients are
    # rational functions of alpha times sqrt((1+2a)/(4+a)) powers
    a = F(2)
    nf = isosceles(a, 1, order=4).normal_form(4)
    f = nf.field
    s = QuadExt(0, F(1, 1), f.d)  # sqrt(core)
    assert nf.coefficient((2, 0, 2, 0)) == CC(f.coerce(F(-3, 4)))
    # a_{1,1,1,1} = -(3(24+55a)/(2(12+31a))) sqrt((1+2a)/(4+a))
    want = f.coerce(F(-3 * (24 + 55 * 2), 2 * (12 + 31 * 2)))
    root = None
    from bgnf.scalars import sqrt_in_field
    root = sqrt_in_field(F(1 + 2 * 2, 4 + 2), f)
    assert nf.coefficient((1, 1, 1, 1)) == CC(want * root)
    assert nf.coefficient((0, 2, 0, 2)) == CC(
        f.coerce(F(-9 * (1 + 2 * 2) * (128 + 380 * 2 + 31 * 4),
                   32 * (4 + 2) * (12 + 31 * 2))))

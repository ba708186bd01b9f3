"""Model bundles: closed forms vs exact truncations, metadata, energy maps."""

import math
from fractions import Fraction as F

import numpy as np
import pytest

from bgnf.models import henon_heiles, hill_regularized, isosceles, quadratic


def _poly_value(poly, w):
    return poly.evaluate(w).real


@pytest.mark.parametrize("builder,args", [
    (henon_heiles, ()),
    (hill_regularized, ()),
    (isosceles, (F(3), F(1), 6)),
    (isosceles, (F(1), F(1), 6)),
    (quadratic, (1, 2)),
])
def test_polynomial_matches_closed_form(builder, args):
    m = builder(*args)
    rng = np.random.default_rng(7)
    order = m.poly.order
    for _ in range(20):
        w = rng.uniform(-1e-2, 1e-2, 4)
        exact = _poly_value(m.poly, w)
        closed = m.hamiltonian.value(w)
        bound = 10.0 * np.sum(np.abs(w)) ** (order + 1) + 1e-15
        assert abs(exact - closed) <= bound


@pytest.mark.parametrize("builder,args", [
    (henon_heiles, ()),
    (hill_regularized, ()),
    (isosceles, (F(3), F(1), 4)),
])
def test_gradient_hessian_consistent_with_value(builder, args):
    m = builder(*args)
    rng = np.random.default_rng(3)
    h = 1e-6
    for _ in range(5):
        w = rng.uniform(-5e-2, 5e-2, 4)
        g = np.asarray(m.hamiltonian.grad(w))
        L = np.asarray(m.hamiltonian.hess(w))
        assert np.allclose(L, L.T)
        for i in range(4):
            e = np.zeros(4)
            e[i] = h
            fd = (m.hamiltonian.value(w + e) - m.hamiltonian.value(w - e)) / (2 * h)
            assert abs(fd - g[i]) < 5e-8 * (1 + abs(g[i]))
            fd2 = (np.asarray(m.hamiltonian.grad(w + e))
                   - np.asarray(m.hamiltonian.grad(w - e))) / (2 * h)
            assert np.allclose(fd2, L[:, i], atol=5e-7)


def test_model_metadata_is_verified_on_construction():
    # the constructors re-run the exact checkers; plant a contradiction
    m = henon_heiles()
    m.symmetry["plane_z2"] = True
    with pytest.raises(AssertionError):
        m.verify_metadata()


def test_henon_heiles_basics():
    m = henon_heiles()
    assert m.hamiltonian.value(np.zeros(4)) == 0
    assert np.allclose(np.asarray(m.hamiltonian.hess(np.zeros(4))), np.eye(4))
    assert m.res.label() == "(-1,1)"
    assert m.symmetry["zp"] == 3


def test_hill_quartic_closed_form_sample():
    # H^(4) = 2|x|^2 (i y . x) at x = (1, 0), y = (0, 1): i y.x = -x1 y2 = -1
    m = hill_regularized()
    w = np.array([0.0, 1.0, 1.0, 0.0])
    h2 = 0.5 * (1 + 1)
    h4 = 2.0 * 1.0 * (-1.0)
    h6 = -4.0
    assert m.hamiltonian.value(w) == pytest.approx(h2 + h4 + h6, rel=1e-14)


def test_hill_energy_maps_roundtrip():
    m = hill_regularized()
    e = 1e-3
    c_h = m.energy_maps["jacobi_from_energy"](e)
    assert c_h < 0
    assert m.energy_maps["energy_from_jacobi"](c_h) == pytest.approx(e, rel=1e-12)


def test_isosceles_field_selection():
    assert isosceles(3, 1, 4).poly.field.kind == "rational"
    m = isosceles(1, 1, 4)
    assert m.poly.field.kind == "quadratic" and m.poly.field.d == 15
    # varpi must have a square root in the field
    with pytest.raises(ValueError, match="sqrt\\(varpi\\)"):
        isosceles(1, 2, 4)
    # a rational square works, and so does r^2 * core
    isosceles(1, 4, 4)
    isosceles(1, 15, 4)


def test_isosceles_resonance_classification():
    assert isosceles(3, 1, 4).res.label() == "(-2,1)"
    assert isosceles(1, 1, 4).res.nonresonant
    assert isosceles(0, 1, 4).res.label() == "(-1,1)"
    # alpha = 20/23 has frequency ratio 3/2
    assert isosceles(F(20, 23), 1, 4).res.label() == "(-3,2)"


def test_isosceles_eccentricity_map():
    m = isosceles(3, 1, 4)
    e = m.energy_maps["eccentricity"]()
    assert e == pytest.approx(math.sqrt(1 - 2 / (1 + 4 / 3) ** 2))
    assert m.energy_maps["energy_from_eccentricity"](0.1) == pytest.approx(0.01)


def test_isosceles_alpha_continuity_float_bracketing():
    # coefficients at alpha = 3 +/- 1e-6 (float path) bracket the exact
    # alpha = 3 rationals
    exact = isosceles(3, 1, 4).normal_form(4)
    lo = isosceles(F(3) - F(1, 10 ** 6), 1, 4)
    hi = isosceles(F(3) + F(1, 10 ** 6), 1, 4)
    for e in ((2, 0, 2, 0), (1, 1, 1, 1), (0, 2, 0, 2)):
        v = float(exact.coefficient(e).re)
        a = float(lo.normal_form(4).coefficient(e).re)
        b = float(hi.normal_form(4).coefficient(e).re)
        assert min(a, b) - 1e-9 <= v <= max(a, b) + 1e-9


def test_quadratic_model_degeneracies():
    m = quadratic(1, 2)
    ana = m.analysis()
    assert ana.nu is None and not ana.verdict.satisfied
    w, T = m.seed_orbit(1e-3, 1)
    assert T == pytest.approx(2 * math.pi)
    w, T = m.seed_orbit(1e-3, 2)
    assert T == pytest.approx(math.pi)


def test_seed_orbit_lands_near_energy_level():
    for m in (henon_heiles(), hill_regularized()):
        for axis in (1, 2):
            w, T = m.seed_orbit(1e-3, axis)
            assert abs(m.hamiltonian.value(w) - 1e-3) < 5e-5
            assert 5.0 < T < 7.5

"""The worked model systems: exact truncations, fast numerics, metadata.

Each bundle carries an exact polynomial truncation of the Hamiltonian (the
symbolic pipeline's input), a fast evaluable closed form with gradient and
Hessian (the numeric pipeline's input), verified symmetry metadata, the
physical-parameter-to-energy maps, and the route through the analysis
(equal-frequency models are normalized first and then conjugated by the
axis-mixing map Psi, which separates the two axial orbits into coordinate
planes).

Declared invariances are re-checked at construction time by the normal-form
module's checkers, so the metadata is verified rather than trusted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .scalars import CC, RATIONAL, quad_field, square_free_core, sqrt_in_field
from .poly import COMPLEX, REAL, Polynomial, TruncatedMap, to_complex, to_real
from .resonance import Frequencies, NONRESONANT, ResonanceData, resonance_pair
from .normalform import (
    NormalFormResult,
    check_plane_invariance,
    check_zp_invariance,
    normalize,
    psi_conjugate,
    psi_matrix,
    symmetric_normalize_zp,
)
from . import hopf
from .numeric import EvaluableHamiltonian, PolynomialHamiltonian

__all__ = ["ModelBundle", "henon_heiles", "hill_regularized", "isosceles",
           "quadratic", "MODEL_BUILDERS"]

_SQRT2 = math.sqrt(2.0)


@dataclass
class ModelBundle:
    """One Hamiltonian system wired for both pipelines."""

    name: str
    alpha: Frequencies
    res: ResonanceData
    poly: Polynomial               # exact real-chart truncation
    hamiltonian: EvaluableHamiltonian
    symmetry: dict
    route: str                     # "psi" | "direct"
    params: dict = dc_field(default_factory=dict)
    energy_maps: dict = dc_field(default_factory=dict)
    averaged_form: NormalFormResult | None = None
    _nf_cache: dict = dc_field(default_factory=dict)
    _an_cache: dict = dc_field(default_factory=dict)

    # -- symbolic pipeline ---------------------------------------------------

    def polynomial(self, order: int | None = None) -> Polynomial:
        if order is None or order == self.poly.order:
            return self.poly
        if order > self.poly.order:
            raise ValueError(
                f"model {self.name} carries Taylor data to order "
                f"{self.poly.order} only"
            )
        return self.poly.truncate(order)

    def normal_form(self, order: int | None = None) -> NormalFormResult:
        order = order or self.poly.order
        if order not in self._nf_cache:
            if self.symmetry.get("zp"):
                nf = symmetric_normalize_zp(self.polynomial(order), order,
                                            self.symmetry["zp"], self.alpha)
            else:
                nf = normalize(self.polynomial(order), order, self.alpha,
                               self.res)
            self._nf_cache[order] = nf
        return self._nf_cache[order]

    def analysis_form(self, order: int | None = None) -> tuple[NormalFormResult, dict]:
        """The normal form the decision procedure runs on, plus symmetry facts."""
        order = order or self.poly.order
        nf = self.normal_form(order)
        if self.route == "psi":
            return _psi_conjugated_result(nf), {"zp": self.symmetry["zp"]}
        facts = {k: v for k, v in self.symmetry.items()
                 if k in ("plane_z1", "plane_z2")}
        return nf, facts

    def analysis(self, order: int | None = None,
                 series_order: int | None = None) -> hopf.HopfAnalysis:
        order = order or self.poly.order
        key = (order, series_order)
        if key not in self._an_cache:
            nf, facts = self.analysis_form(order)
            self._an_cache[key] = hopf.analyze(nf, facts, series_order)
        return self._an_cache[key]

    # -- numeric pipeline ------------------------------------------------------

    def seed_orbit(self, energy: float, axis: int):
        """(initial point, period guess) for the axis orbit at ``energy``.

        The circular normal-form solution is mapped through the coordinate
        change (and through Psi first, on the psi route).
        """
        ana = self.analysis()
        if axis == 1:
            u = hopf.amplitude_series(ana.nf, 1).eval_float(energy)
            w1, _, _, _ = hopf.frequency_series(ana.nf)
            omega = w1.eval_float(energy)
        else:
            u = hopf.amplitude_series(ana.nf, 2).eval_float(energy)
            _, w2, _, _ = hopf.frequency_series(ana.nf)
            omega = w2.eval_float(energy)
        if u <= 0:
            raise ValueError("amplitude series nonpositive at this energy")
        c = math.sqrt(u)
        pt = [0.0, 0.0, c, 0.0] if axis == 1 else [0.0, 0.0, 0.0, c]
        if self.route == "psi":
            v1, v2, u1, u2 = pt
            pt = [(v1 + v2) / _SQRT2, (u1 - u2) / _SQRT2,
                  (u1 + u2) / _SQRT2, (v2 - v1) / _SQRT2]
        transform = self.normal_form().transform
        w = [z.real for z in transform.evaluate(pt)]
        period = 2.0 * math.pi / abs(omega)
        return np.array(w), period

    def verify_metadata(self) -> None:
        """Re-check every declared invariance with the exact checkers."""
        for plane in ("z1", "z2"):
            flag = self.symmetry.get(f"plane_{plane}")
            if flag is not None:
                if check_plane_invariance(self.poly, plane) != flag:
                    raise AssertionError(
                        f"model {self.name}: declared plane_{plane}={flag} "
                        "contradicts the coefficient test"
                    )
        p = self.symmetry.get("zp")
        if p and not check_zp_invariance(self.poly, p, "R"):
            raise AssertionError(
                f"model {self.name}: declared Z_{p} invariance fails"
            )


def _psi_conjugated_result(nf: NormalFormResult) -> NormalFormResult:
    """Conjugate a normal form by Psi, keeping the bookkeeping consistent."""
    conj = psi_conjugate(to_real(nf.h_n))
    hc = to_complex(conj)
    m, fld = psi_matrix(nf.transform.field)
    from .poly import linear_substitute
    comps = [linear_substitute(comp.promote(fld), m, fld)
             for comp in nf.transform.components]
    full = TruncatedMap(comps, nf.transform.order, identity_linear=False)
    sym = dict(nf.symmetry)
    sym["psi"] = True
    return NormalFormResult(
        h_n=hc,
        generators=nf.generators,
        transform=full,
        table={e: c for e, c in hc.coeffs.items()
               if e[0] + e[1] + e[2] + e[3] >= 3},
        alpha=nf.alpha,
        res=nf.res,
        order=nf.order,
        gauge=nf.gauge + "+psi",
        symmetry=sym,
    )


# ---------------------------------------------------------------------------
# Henon-Heiles
# ---------------------------------------------------------------------------


def henon_heiles(order: int = 6) -> ModelBundle:
    """H = (y1^2+x1^2)/2 + (y2^2+x2^2)/2 + x1^2 x2 - x2^3/3."""
    alpha = Frequencies(Fraction(1), Fraction(1))
    terms = {
        (2, 0, 0, 0): CC(Fraction(1, 2)), (0, 2, 0, 0): CC(Fraction(1, 2)),
        (0, 0, 2, 0): CC(Fraction(1, 2)), (0, 0, 0, 2): CC(Fraction(1, 2)),
        (0, 0, 2, 1): CC(Fraction(1)), (0, 0, 0, 3): CC(Fraction(-1, 3)),
    }
    poly = Polynomial(REAL, RATIONAL, order, terms)
    bundle = ModelBundle(
        name="henon-heiles",
        alpha=alpha,
        res=ResonanceData(-1, 1),
        poly=poly,
        hamiltonian=PolynomialHamiltonian(poly, "henon-heiles"),
        symmetry={"zp": 3, "convention": "R", "plane_z1": True,
                  "plane_z2": False},
        route="psi",
    )
    bundle.verify_metadata()
    return bundle


# ---------------------------------------------------------------------------
# Hill's lunar problem, regularized
# ---------------------------------------------------------------------------


def _hill_averaged_form() -> NormalFormResult:
    """The order-6 normal form of the regularized lunar problem in the
    rotated coordinates separating the direct and retrograde orbits
    (the generating-function-plus-averaging gauge)."""
    f = Fraction
    terms = {
        (1, 0, 1, 0): CC(f(1, 2)), (0, 1, 0, 1): CC(f(1, 2)),
        (2, 0, 2, 0): CC(f(-1, 2)), (0, 2, 0, 2): CC(f(1, 2)),
        (3, 0, 3, 0): CC(f(-3, 8)), (0, 3, 0, 3): CC(f(-3, 8)),
        (2, 1, 2, 1): CC(f(-7, 8)), (1, 2, 1, 2): CC(f(-7, 8)),
        (1, 2, 3, 0): CC(f(-15, 8)), (3, 0, 1, 2): CC(f(-15, 8)),
        (0, 3, 2, 1): CC(f(-15, 8)), (2, 1, 0, 3): CC(f(-15, 8)),
    }
    h6 = Polynomial(COMPLEX, RATIONAL, 6, terms)
    return NormalFormResult(
        h_n=h6,
        generators=[],
        transform=TruncatedMap.identity(RATIONAL, 6),
        table={e: c for e, c in terms.items() if sum(e) >= 3},
        alpha=Frequencies(Fraction(1), Fraction(1)),
        res=ResonanceData(-1, 1),
        order=6,
        gauge="averaged",
        symmetry={"zp": 4, "psi": True, "builtin": True},
    )


def hill_regularized(order: int = 6) -> ModelBundle:
    """Levi-Civita-regularized lunar problem, exact degree-6 polynomial.

    H = |y|^2/2 + |x|^2/2 + 2|x|^2 (y1 x2 - y2 x1) - 4|x|^6 + 24|x|^2 x1^2 x2^2.
    The physical chart (rotating Kepler + tide, with the 3/|q| singularity)
    enters only through the energy map: the dynamics at energy E here
    corresponds to Jacobi constant c_H with E = (3/2) |c_H|^{-3/2}.
    """
    if order < 6:
        raise ValueError("the regularized Hamiltonian is a degree-6 polynomial")
    f = Fraction
    terms = {
        (2, 0, 0, 0): CC(f(1, 2)), (0, 2, 0, 0): CC(f(1, 2)),
        (0, 0, 2, 0): CC(f(1, 2)), (0, 0, 0, 2): CC(f(1, 2)),
        (1, 0, 2, 1): CC(f(2)), (1, 0, 0, 3): CC(f(2)),
        (0, 1, 3, 0): CC(f(-2)), (0, 1, 1, 2): CC(f(-2)),
        (0, 0, 6, 0): CC(f(-4)), (0, 0, 4, 2): CC(f(12)),
        (0, 0, 2, 4): CC(f(12)), (0, 0, 0, 6): CC(f(-4)),
    }
    poly = Polynomial(REAL, RATIONAL, order, terms)

    def jacobi_from_energy(e):
        c = (3.0 / (2.0 ** 2.5 * e)) ** (2.0 / 3.0)
        return -2.0 * c

    def energy_from_jacobi(c_h):
        return 1.5 * abs(c_h) ** -1.5

    bundle = ModelBundle(
        name="hill",
        alpha=Frequencies(Fraction(1), Fraction(1)),
        res=ResonanceData(-1, 1),
        poly=poly,
        hamiltonian=PolynomialHamiltonian(poly, "hill"),
        symmetry={"zp": 4, "convention": "R", "plane_z1": False,
                  "plane_z2": False},
        route="psi",
        energy_maps={"jacobi_from_energy": jacobi_from_energy,
                     "energy_from_jacobi": energy_from_jacobi},
        averaged_form=_hill_averaged_form(),
    )
    bundle.verify_metadata()
    return bundle


# ---------------------------------------------------------------------------
# spatial isosceles three-body problem
# ---------------------------------------------------------------------------


def _binom_neg(k: int, i: int) -> Fraction:
    """Binomial coefficient C(-k, i) for integer k >= 1."""
    return Fraction((-1) ** i) * math.comb(k + i - 1, i)


def _binom_half(j: int) -> Fraction:
    """Binomial coefficient C(-1/2, j)."""
    return Fraction((-1) ** j) * Fraction(math.comb(2 * j, j), 4 ** j)


def isosceles(alpha, varpi=1, order: int = 4) -> ModelBundle:
    """Reduced spatial isosceles three-body Hamiltonian near its minimum.

    ``alpha`` is the mass ratio (>= 0) and ``varpi`` the angular momentum
    (> 0), both rational.  The exact coefficient field is Q(sqrt(d)) with
    d = (4+8 alpha)(4+alpha); sqrt(varpi) must lie in that field (varpi a
    rational square, or a rational square times the square-free core of d),
    otherwise the odd-degree Taylor coefficients leave the quadratic
    extension.  Frequencies are alpha1 = 2, alpha2 = 2 sqrt((4+8a)/(4+a));
    the energy parameter corresponds to varpi * eccentricity^2.
    """
    a = Fraction(alpha)
    w = Fraction(varpi)
    if a < 0 or w <= 0:
        raise ValueError("need alpha >= 0 and varpi > 0")
    if order < 4:
        raise ValueError("carry the expansion at least to order 4")
    d_num = (4 + 8 * a) * (4 + a)
    core = square_free_core(d_num.numerator * d_num.denominator)
    field = RATIONAL if core == 1 else quad_field(core)
    rt_w = sqrt_in_field(w, field)
    if rt_w is None:
        raise ValueError(
            f"sqrt(varpi) does not lie in the coefficient field Q(sqrt({core}));"
            " choose varpi = r^2 or r^2 * the square-free core"
        )
    s = sqrt_in_field((1 + 2 * a) / (4 + a), field)   # alpha2 = 4 s
    g = sqrt_in_field((4 + a) * (1 + 2 * a), field) / 2
    alpha1 = field.coerce(2)
    alpha2 = 4 * s
    lam = 2 * s

    inv_w = {m: rt_w ** (-m) for m in range(1, 2 * order + 6)}

    def add(terms, e, val):
        if val == 0:
            return
        cur = terms.get(e)
        terms[e] = val if cur is None else cur + val

    terms: dict = {}
    add(terms, (2, 0, 0, 0), field.one())
    add(terms, (0, 2, 0, 0), lam)
    # V = w + w^2 (x1+rw)^-2 - A (x1+rw)^-1 - B [(x1+rw)^2 + g x2^2]^(-1/2)
    A = 2 * a * (rt_w ** 3) / (4 + a)
    B = 8 * (rt_w ** 3) / (4 + a)
    add(terms, (0, 0, 0, 0), field.coerce(w))
    for i in range(0, order + 1):
        # w^2 * C(-2,i) w^{(-2-i)/2} x1^i  and  -A * C(-1,i) w^{(-1-i)/2} x1^i
        c2 = field.coerce(w * w) * field.coerce(_binom_neg(2, i)) * inv_w[i + 2]
        c1 = -A * field.coerce(_binom_neg(1, i)) * inv_w[i + 1]
        add(terms, (0, 0, i, 0), c2 + c1)
    for j in range(0, order // 2 + 1):
        pref = -B * field.coerce(_binom_half(j)) * (g ** j)
        k = 2 * j + 1
        for i in range(0, order - 2 * j + 1):
            coeff = pref * field.coerce(_binom_neg(k, i)) * inv_w[i + k]
            add(terms, (0, 0, i, 2 * j), coeff)
    for e in ((0, 0, 0, 0), (0, 0, 1, 0)):
        if e in terms and terms[e] != 0:
            raise AssertionError("expansion should have no constant/linear part")
        terms.pop(e, None)
    poly = Polynomial(REAL, field, order, {e: CC(c) for e, c in terms.items()})

    # exact resonance: alpha2/alpha1 = 2 sqrt((1+2a)/(4+a)), rational iff the
    # square-free core of (4+8a)(4+a) is 1
    ratio = sqrt_in_field(4 * (1 + 2 * a) / (4 + a), RATIONAL)
    if ratio is not None:
        freqs = Frequencies(Fraction(2), 2 * ratio)
        res = resonance_pair(tuple(freqs))
    else:
        freqs = Frequencies(alpha1, alpha2)
        res = resonance_pair((alpha1, alpha2), declared=NONRESONANT)

    af = float(a)
    wf = float(w)
    lam_f = float(lam)
    g_f = float(g)
    A_f = float(A)
    B_f = float(B)
    rw_f = math.sqrt(wf)

    def value(wvec):
        y1, y2, x1, x2 = (float(wvec[0]), float(wvec[1]),
                          float(wvec[2]), float(wvec[3]))
        u = x1 + rw_f
        S = u * u + g_f * x2 * x2
        return (y1 * y1 + lam_f * y2 * y2 + wf + wf * wf / (u * u)
                - A_f / u - B_f / math.sqrt(S))

    def grad(wvec):
        y1, y2, x1, x2 = (float(wvec[0]), float(wvec[1]),
                          float(wvec[2]), float(wvec[3]))
        u = x1 + rw_f
        S = u * u + g_f * x2 * x2
        S32 = S ** 1.5
        return (2.0 * y1, 2.0 * lam_f * y2,
                -2.0 * wf * wf / u ** 3 + A_f / (u * u) + B_f * u / S32,
                B_f * g_f * x2 / S32)

    def hess(wvec):
        x1, x2 = float(wvec[2]), float(wvec[3])
        u = x1 + rw_f
        S = u * u + g_f * x2 * x2
        S32 = S ** 1.5
        S52 = S ** 2.5
        h33 = (6.0 * wf * wf / u ** 4 - 2.0 * A_f / u ** 3
               + B_f * (1.0 / S32 - 3.0 * u * u / S52))
        h34 = -3.0 * B_f * u * g_f * x2 / S52
        h44 = B_f * (g_f / S32 - 3.0 * g_f * g_f * x2 * x2 / S52)
        return ((2.0, 0.0, 0.0, 0.0),
                (0.0, 2.0 * lam_f, 0.0, 0.0),
                (0.0, 0.0, h33, h34),
                (0.0, 0.0, h34, h44))

    def eccentricity(alpha_val=af, varpi_val=wf):
        if alpha_val <= 0:
            raise ValueError("eccentricity map needs alpha > 0")
        val = 1.0 - 2.0 * varpi_val ** 2 / (1.0 + 4.0 / alpha_val) ** 2
        return math.sqrt(val)

    bundle = ModelBundle(
        name="isosceles",
        alpha=freqs,
        res=res,
        poly=poly,
        hamiltonian=EvaluableHamiltonian(value, grad, hess, "isosceles"),
        symmetry={"plane_z2": True, "plane_z1": False},
        route="direct",
        params={"alpha": a, "varpi": w, "field_core": core},
        energy_maps={"energy_from_eccentricity": lambda e: wf * e * e,
                     "eccentricity": eccentricity},
    )
    bundle.verify_metadata()
    return bundle


# ---------------------------------------------------------------------------
# quadratic control
# ---------------------------------------------------------------------------


def quadratic(alpha1=1, alpha2=1, order: int = 6,
              declared: ResonanceData | None = None) -> ModelBundle:
    """Pure H2 control model: everything downstream degenerates predictably."""
    a1 = Fraction(alpha1)
    a2 = Fraction(alpha2)
    freqs = Frequencies(a1, a2)
    res = resonance_pair((a1, a2), declared)
    poly = Polynomial.quadratic_h2((a1, a2), REAL, RATIONAL, order)
    route = "psi" if a1 == a2 else "direct"
    symmetry = {"plane_z1": True, "plane_z2": True}
    if a1 == a2:
        symmetry["zp"] = 4
        symmetry["convention"] = "R"
    bundle = ModelBundle(
        name="quadratic",
        alpha=freqs,
        res=res,
        poly=poly,
        hamiltonian=PolynomialHamiltonian(poly, "quadratic"),
        symmetry=symmetry,
        route=route,
    )
    bundle.verify_metadata()
    return bundle


MODEL_BUILDERS = {
    "henon-heiles": henon_heiles,
    "hill": hill_regularized,
    "isosceles": isosceles,
    "quadratic": quadratic,
}

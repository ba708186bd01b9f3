"""From a normal form to a verdict on the Hopf link of axial periodic orbits.

The kernel form restricted to a symplectic coordinate plane is integrable,
so the circular solutions, their amplitudes as functions of the energy, the
orbit frequencies and the frequencies of the linearized flow are all exact
truncated power series in E.  The rotation numbers follow from the scalar
winding equation theta' = a + b cos theta: when the off-diagonal forcing
amplitude is dominated (C >= 0) the rotation number picks up the square
root of C; otherwise the linearized flow locks to the rational winding
|m1|/m2.  The product (rho1 - 1)(rho2 - 1) measured against 1 is the
non-resonance criterion, and the decision procedure walks the clause lists
of the three main theorems with exact coefficient tests.

All series arithmetic is exact and carries an O(E^k) tail; sign decisions
are made on exact leading coefficients, never on floats.  Comparisons of
complex coefficient moduli are done on squared moduli to stay inside the
field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .scalars import CC, Field, QuadExt
from .poly import degree
from .normalform import NormalFormResult
from .resonance import ResonanceClass, an_decompose, classify
from .series import SeriesE, SeriesError

__all__ = [
    "HopfAnalysis",
    "CaseVerdict",
    "CaseData",
    "BranchData",
    "IndeterminateError",
    "nu_index",
    "omega_coeffs",
    "beta_coeffs",
    "orbit_existence",
    "amplitude_series",
    "frequency_series",
    "case_quantities",
    "rotation_series",
    "twist_product",
    "theorem_check",
    "analyze",
]


class IndeterminateError(ValueError):
    """A sign or branch could not be decided at the configured order."""


# ---------------------------------------------------------------------------
# coefficient functionals
# ---------------------------------------------------------------------------


def _real(c: CC, what: str):
    if not c.is_real():
        raise ValueError(f"{what} is not real: {c!r}")
    return c.re


def nu_index(nf: NormalFormResult):
    """Smallest 2 <= nu <= floor(N/2) with a nonzero radial/cross coefficient.

    Tested coefficients: a_{nu,0,nu,0}, a_{0,nu,0,nu}, a_{nu-1,1,nu-1,1},
    a_{1,nu-1,1,nu-1}.  Returns None when all vanish through the order.
    """
    if nf.order < 4:
        raise ValueError("nu is defined for normal forms of order >= 4")
    for nu in range(2, nf.order // 2 + 1):
        probes = (
            (nu, 0, nu, 0),
            (0, nu, 0, nu),
            (nu - 1, 1, nu - 1, 1),
            (1, nu - 1, 1, nu - 1),
        )
        if any(not nf.coefficient(e).is_zero() for e in probes):
            return nu
    return None


def omega_coeffs(nf: NormalFormResult, nu: int):
    """(Omega_{nu,1}, Omega_{nu,2}, Omega_nu) as exact field elements."""
    if nu is None:
        raise ValueError("nu is absent; the Omega coefficients are undefined")
    field = nf.field
    a1 = field.coerce(nf.alpha.alpha1)
    a2 = field.coerce(nf.alpha.alpha2)
    a_r1 = _real(nf.coefficient((nu, 0, nu, 0)), "a_{nu,0,nu,0}")
    a_r2 = _real(nf.coefficient((0, nu, 0, nu)), "a_{0,nu,0,nu}")
    a_c1 = _real(nf.coefficient((nu - 1, 1, nu - 1, 1)), "a_{nu-1,1,nu-1,1}")
    a_c2 = _real(nf.coefficient((1, nu - 1, 1, nu - 1)), "a_{1,nu-1,1,nu-1}")
    om1 = a_c1 - nu * a_r1 * (a2 / a1)
    om2 = a_c2 - nu * a_r2 * (a1 / a2)
    om = om1 / (a2 * a1 ** (nu - 1)) + om2 / (a1 * a2 ** (nu - 1))
    return om1, om2, om


def beta_coeffs(nf: NormalFormResult):
    """Second-order twist coefficients (beta1, beta2) for equal frequencies.

    beta1 = 6 (2 a_{2,0,2,0} - a_{1,1,1,1}) a_{2,0,2,0}
            + alpha1 (a_{2,1,2,1} - 3 a_{3,0,3,0}),
    and beta2 with the two axes swapped.  Requires alpha1 = alpha2 and a
    normal form of order >= 6 (it reads degree-6 coefficients).
    """
    if nf.alpha.alpha1 != nf.alpha.alpha2:
        raise ValueError("beta coefficients assume alpha1 = alpha2")
    if nf.order < 6:
        raise ValueError("beta coefficients need a normal form of order >= 6")
    field = nf.field
    a1 = field.coerce(nf.alpha.alpha1)
    a2020 = _real(nf.coefficient((2, 0, 2, 0)), "a_{2,0,2,0}")
    a0202 = _real(nf.coefficient((0, 2, 0, 2)), "a_{0,2,0,2}")
    a1111 = _real(nf.coefficient((1, 1, 1, 1)), "a_{1,1,1,1}")
    a2121 = _real(nf.coefficient((2, 1, 2, 1)), "a_{2,1,2,1}")
    a3030 = _real(nf.coefficient((3, 0, 3, 0)), "a_{3,0,3,0}")
    a1212 = _real(nf.coefficient((1, 2, 1, 2)), "a_{1,2,1,2}")
    a0303 = _real(nf.coefficient((0, 3, 0, 3)), "a_{0,3,0,3}")
    beta1 = 6 * (2 * a2020 - a1111) * a2020 + a1 * (a2121 - 3 * a3030)
    beta2 = 6 * (2 * a0202 - a1111) * a0202 + a1 * (a1212 - 3 * a0303)
    return beta1, beta2


def orbit_existence(nf: NormalFormResult) -> tuple[bool, bool]:
    """(gamma1 exists, gamma2 exists) from the coefficient table.

    gamma1 (the axis-1 plane orbit) exists automatically when m2 > 1; for
    m2 = 1 it requires every a_{k1,1,k1+|m1|,0} to vanish.  gamma2 exists
    automatically when |m1| > 1; for |m1| = 1 it requires every
    a_{0,k2+1,1,k2} to vanish.
    """
    res = nf.res
    g1 = True
    g2 = True
    if not res.nonresonant:
        am1 = -res.m1
        if res.m2 == 1:
            for k1 in range(0, nf.order):
                e = (k1, 1, k1 + am1, 0)
                if degree(e) > nf.order:
                    break
                if not nf.coefficient(e).is_zero():
                    g1 = False
                    break
        if am1 == 1:
            for k2 in range(0, nf.order):
                e = (0, k2 + 1, 1, k2)
                if degree(e) > nf.order:
                    break
                if not nf.coefficient(e).is_zero():
                    g2 = False
                    break
    return g1, g2


# ---------------------------------------------------------------------------
# energy series
# ---------------------------------------------------------------------------


def _decomposition(nf: NormalFormResult):
    cached = getattr(nf, "_an_cache", None)
    if cached is None:
        cached = an_decompose(nf.h_n, nf.res)
        nf._an_cache = cached
    return cached


def _axis_poly_series(radial, axis: int, field: Field, max_k: int) -> tuple[SeriesE, SeriesE]:
    """(re, im) of the radial polynomial restricted to one axis, as series in u."""
    cs_re = [field.zero()] * (max_k + 1)
    cs_im = [field.zero()] * (max_k + 1)
    for k, c in radial.axis_coefficients(axis).items():
        if k <= max_k:
            cs_re[k] = field.coerce(c.re)
            cs_im[k] = field.coerce(c.im)
    return (SeriesE(field, cs_re, max_k + 1), SeriesE(field, cs_im, max_k + 1))


def amplitude_series(nf: NormalFormResult, axis: int, K: int | None = None) -> SeriesE:
    """Squared amplitude u_j = c_j(E)^2 of the axis-j circular solution.

    Inverts E = (alpha_j/2) u + A0|axis(u) as an exact series; coefficients
    are justified through E^{floor(N/2)}, the default and the cap for K.
    """
    cap = nf.order // 2
    K = cap if K is None else K
    if not 1 <= K <= cap:
        raise ValueError(f"amplitude series order K must be in 1..{cap}")
    g1, g2 = orbit_existence(nf)
    if axis == 1 and not g1:
        raise ValueError("axis-1 orbit does not exist for this normal form")
    if axis == 2 and not g2:
        raise ValueError("axis-2 orbit does not exist for this normal form")
    field = nf.field
    dec = _decomposition(nf)
    a_j = field.coerce(nf.alpha.alpha1 if axis == 1 else nf.alpha.alpha2)
    p_re, p_im = _axis_poly_series(dec.a0, axis, field, cap)
    if not p_im.known_zero():
        raise ValueError("radial part A0 must have real coefficients")
    # E(u) = (a_j/2) u + tail(u), tail = A0 restricted to the axis
    tail = p_re
    e_series = SeriesE.identity(field, cap + 1)
    two_over_a = field.coerce(2) / a_j
    u = e_series * SeriesE.constant(two_over_a, field)
    for _ in range(cap):
        u = (e_series - tail.substitute(u)) * SeriesE.constant(two_over_a, field)
    return u.truncate(K + 1)


def frequency_series(nf: NormalFormResult, K: int | None = None):
    """(omega1, omega2, hat_omega1, hat_omega2) as series in E.

    omega_j is the frequency of the axis-j orbit; hat_omega_i is the
    frequency of the linearized flow in the transverse complex direction
    along the other axis orbit.  Justified through E^{floor(N/2)-1}.
    """
    cap = nf.order // 2 - 1
    K = cap if K is None else K
    if not 0 <= K <= cap:
        raise ValueError(f"frequency series order K must be in 0..{cap}")
    field = nf.field
    dec = _decomposition(nf)
    a1 = field.coerce(nf.alpha.alpha1)
    a2 = field.coerce(nf.alpha.alpha2)
    g1, g2 = orbit_existence(nf)
    out = {}
    if g1:
        u1 = amplitude_series(nf, 1)
        d1_re, _ = _axis_poly_series(dec.a0.diff(1), 1, field, cap)
        d2_re, _ = _axis_poly_series(dec.a0.diff(2), 1, field, cap)
        out["omega1"] = (SeriesE.constant(a1, field, cap + 1)
                         + 2 * d1_re.substitute(u1)).truncate(K + 1)
        out["hat_omega2"] = (SeriesE.constant(a2, field, cap + 1)
                             + 2 * d2_re.substitute(u1)).truncate(K + 1)
    if g2:
        u2 = amplitude_series(nf, 2)
        d1_re, _ = _axis_poly_series(dec.a0.diff(1), 2, field, cap)
        d2_re, _ = _axis_poly_series(dec.a0.diff(2), 2, field, cap)
        out["omega2"] = (SeriesE.constant(a2, field, cap + 1)
                         + 2 * d2_re.substitute(u2)).truncate(K + 1)
        out["hat_omega1"] = (SeriesE.constant(a1, field, cap + 1)
                             + 2 * d1_re.substitute(u2)).truncate(K + 1)
    return (out.get("omega1"), out.get("omega2"),
            out.get("hat_omega1"), out.get("hat_omega2"))


# ---------------------------------------------------------------------------
# the C / Delta case analysis
# ---------------------------------------------------------------------------


@dataclass
class BranchData:
    """Winding analysis of one axis orbit."""

    exists: bool
    mode: str                    # "plain" | "unlocked" | "locked" | "indeterminate"
    ratio: object = None         # the resonant winding ratio (field element)
    S: SeriesE | None = None     # hat_omega/omega - ratio
    C: SeriesE | None = None
    Delta: SeriesE | None = None
    sign_S: int = 0
    boundary: bool = False
    reason: str = ""

    def leading(self, s: SeriesE | None):
        return None if s is None else s.leading()


@dataclass
class CaseData:
    branch1: BranchData
    branch2: BranchData

    @property
    def C1(self):
        return self.branch1.C

    @property
    def C2(self):
        return self.branch2.C

    @property
    def Delta1(self):
        return self.branch1.Delta

    @property
    def Delta2(self):
        return self.branch2.Delta


def _forcing_squared(nf: NormalFormResult, which: int, omega: SeriesE) -> SeriesE:
    """(2 c~ / omega)^2 for the selected axis orbit, as an exact series.

    c~_1 = 2 c1^{2|m1|/m2} |A_{2/m2}(c1^2, 0)| along gamma1 (m2 in {1,2});
    c~_2 = 2 c2^{2/|m1|}   |A_{2/|m1|}(0, c2^2)| along gamma2 (|m1| in {1,2}).
    Squared moduli keep everything inside the coefficient field.
    """
    field = nf.field
    dec = _decomposition(nf)
    res = nf.res
    am1 = -res.m1
    if which == 1:
        n = 2 // res.m2
        u = amplitude_series(nf, 1)
        power = 2 * am1 // res.m2
        axis = 1
    else:
        n = 2 // am1
        u = amplitude_series(nf, 2)
        power = 2 // am1
        axis = 2
    block = dec.blocks.get(n)
    cap = max((nf.order - n * (am1 + res.m2)) // 2, 0)
    if block is None:
        re = SeriesE.zero(field, cap + 1)
        im = SeriesE.zero(field, cap + 1)
    else:
        re_u, im_u = _axis_poly_series(block, axis, field, cap)
        re = re_u.substitute(u)
        im = im_u.substitute(u)
    mod2 = re * re + im * im
    ctilde_sq = 4 * (u ** power) * mod2
    return (4 * ctilde_sq).divide(omega * omega)


def case_quantities(nf: NormalFormResult, K: int | None = None) -> CaseData:
    """Leading data of C1, C2, Delta1, Delta2 and the branch decisions."""
    field = nf.field
    res = nf.res
    g1, g2 = orbit_existence(nf)
    w1, w2, hw1, hw2 = frequency_series(nf, K)

    def make_branch(which: int) -> BranchData:
        exists = g1 if which == 1 else g2
        if not exists:
            return BranchData(exists=False, mode="plain",
                              reason="orbit does not exist")
        if res.nonresonant:
            return BranchData(exists=True, mode="plain")
        am1 = -res.m1
        threshold = res.m2 if which == 1 else am1
        if threshold >= 3:
            return BranchData(exists=True, mode="plain")
        if which == 1:
            ratio = field.coerce(Fraction(am1, res.m2))
            S = (hw2.divide(w1)) - SeriesE.constant(ratio, field)
            omega = w1
        else:
            ratio = field.coerce(Fraction(res.m2, am1))
            S = (hw1.divide(w2)) - SeriesE.constant(ratio, field)
            omega = w2
        Tsq = _forcing_squared(nf, which, omega)
        C = S * S - Tsq
        sgn_c = C.leading_sign()
        sgn_s = S.leading_sign()
        if sgn_c < 0:
            return BranchData(exists=True, mode="locked", ratio=ratio,
                              S=S, C=C, sign_S=sgn_s)
        if sgn_c == 0:
            if Tsq.known_zero():
                return BranchData(exists=True, mode="unlocked", ratio=ratio,
                                  S=S, C=C, Delta=SeriesE.zero(field, Tsq.err_order),
                                  sign_S=sgn_s)
            return BranchData(exists=True, mode="locked", ratio=ratio,
                              S=S, C=C, sign_S=sgn_s, boundary=True,
                              reason="|S| = T at this order; treated as locked")
        # C > 0: unlocked, Delta = T^2 / (|S| + sqrt(C))
        if sgn_s == 0:
            return BranchData(exists=True, mode="indeterminate", ratio=ratio,
                              S=S, C=C, sign_S=0,
                              reason="C > 0 with undecided sign of "
                                     "hat_omega/omega - |m1|/m2")
        try:
            root = C.sqrt()
        except SeriesError as exc:
            return BranchData(exists=True, mode="indeterminate", ratio=ratio,
                              S=S, C=C, sign_S=sgn_s,
                              reason=f"sqrt(C) not exact: {exc}")
        abs_S = S if sgn_s > 0 else -S
        if Tsq.known_zero():
            Delta = SeriesE.zero(field, max(Tsq.err_order - 1, 0))
        else:
            Delta = Tsq.divide(abs_S + root)
        return BranchData(exists=True, mode="unlocked", ratio=ratio,
                          S=S, C=C, Delta=Delta, sign_S=sgn_s)

    return CaseData(branch1=make_branch(1), branch2=make_branch(2))


def rotation_series(nf: NormalFormResult, K: int | None = None) -> tuple[SeriesE, SeriesE]:
    """(rho1, rho2) as exact series in E, branch-selected by the case data."""
    field = nf.field
    w1, w2, hw1, hw2 = frequency_series(nf, K)
    cases = case_quantities(nf, K)

    def assemble(which: int) -> SeriesE:
        b = cases.branch1 if which == 1 else cases.branch2
        if not b.exists:
            raise ValueError(f"axis-{which} orbit does not exist")
        if which == 1:
            plain = SeriesE.constant(1, field) + hw2.divide(w1)
        else:
            plain = SeriesE.constant(1, field) + hw1.divide(w2)
        if b.mode == "plain":
            return plain
        if b.mode == "locked":
            err = b.C.err_order if b.C is not None else math.inf
            one_plus = field.one() + b.ratio
            return SeriesE(field, [one_plus], err)
        if b.mode == "indeterminate":
            raise IndeterminateError(
                f"rotation number of gamma{which} undecided: {b.reason}")
        return plain - b.Delta if b.sign_S > 0 else plain + b.Delta

    r1 = assemble(1)
    r2 = assemble(2)
    if K is not None:
        r1 = r1.truncate(K + 1)
        r2 = r2.truncate(K + 1)
    return r1, r2


def twist_product(nf: NormalFormResult, K: int | None = None) -> SeriesE:
    """(rho1 - 1)(rho2 - 1) as an exact series in E."""
    r1, r2 = rotation_series(nf, K)
    one = SeriesE.constant(1, nf.field)
    prod = (r1 - one) * (r2 - one)
    return prod if K is None else prod.truncate(K + 1)


# ---------------------------------------------------------------------------
# theorem walk
# ---------------------------------------------------------------------------


@dataclass
class CaseVerdict:
    theorem: str | None          # "1.1" | "1.2" | "1.3" | "C" | None
    clause: str | None           # "i".."vi"
    satisfied: bool
    hypothesis_trace: list[str]
    predicted_leading: tuple | None = None   # (exponent, coefficient)
    gauge: str = "im-D"

    @property
    def inconclusive(self) -> bool:
        return not self.satisfied

    def describe(self) -> str:
        if self.satisfied:
            lead = ""
            if self.predicted_leading is not None:
                k, c = self.predicted_leading
                lead = f"; twist product = 1 + ({c}) E^{k} + O(E^{k + 1})"
            return f"Theorem {self.theorem}({self.clause}) applies{lead}"
        return "Inconclusive: " + (self.hypothesis_trace[-1]
                                   if self.hypothesis_trace else "no data")


def _nonzero(x) -> bool:
    if isinstance(x, QuadExt):
        return x.sign() != 0
    return x != 0


def theorem_check(nf: NormalFormResult, symmetry: dict | None = None) -> CaseVerdict:
    """Walk the clause lists of the three main theorems in order.

    ``symmetry`` carries externally established facts: ``plane_z2`` /
    ``plane_z1`` (the corresponding coordinate plane is invariant for the
    full Hamiltonian) and ``zp`` (the diagonal Z_p rotation symmetry, with
    the analysis run on the Psi-conjugated normal form).  Exact coefficient
    conditions are tested clause by clause; the first satisfied clause wins
    and carries the predicted leading twist term.
    """
    symmetry = dict(symmetry or {})
    symmetry.update(nf.symmetry or {})
    trace: list[str] = []
    field = nf.field
    cls = classify(nf.res)
    nu = nu_index(nf)
    if nu is None:
        trace.append("nu index absent: all radial/cross coefficients vanish "
                     f"through order {nf.order} (resonant Hopf link)")
        return CaseVerdict(None, None, False, trace)
    om1, om2, om = omega_coeffs(nf, nu)
    a1 = field.coerce(nf.alpha.alpha1)
    a2 = field.coerce(nf.alpha.alpha2)
    am1 = None if nf.res.nonresonant else -nf.res.m1
    m2 = None if nf.res.nonresonant else nf.res.m2

    def lead_omega():
        return (nu - 1, field.coerce(2 ** nu) * om)

    if cls in (ResonanceClass.NONRESONANT, ResonanceClass.WEAKLY_NONRESONANT):
        trace.append(f"weakly non-resonant (m = {nf.res.label()}): Theorem 1.1")
        if nf.res.nonresonant or m2 > 2:
            trace.append(f"(i) m2 > 2; Omega_nu {'!=' if _nonzero(om) else '=='} 0")
            if _nonzero(om):
                return CaseVerdict("1.1", "i", True, trace, lead_omega())
            return CaseVerdict("1.1", None, False, trace)
        # m2 == 2
        a022 = nf.coefficient((0, 2, am1, 0))
        if am1 > 2 * (nu - 1):
            trace.append("(ii) m2 = 2, |m1| > 2(nu-1)")
            if _nonzero(om1) and _nonzero(om):
                return CaseVerdict("1.1", "ii", True, trace, lead_omega())
            trace.append("Omega_{nu,1} or Omega_nu vanishes")
            return CaseVerdict("1.1", None, False, trace)
        if am1 == 2 * (nu - 1):
            trace.append("(iii) m2 = 2, |m1| = 2(nu-1)")
            if _nonzero(om1) and _nonzero(om) and a022.is_zero():
                return CaseVerdict("1.1", "iii", True, trace, lead_omega())
            trace.append("needs Omega_{nu,1}, Omega_nu != 0 and "
                         "a_{0,2,|m1|,0} = 0")
            return CaseVerdict("1.1", None, False, trace)
        trace.append("(iv) m2 = 2, |m1| < 2(nu-1)")
        if _nonzero(om2) and not a022.is_zero():
            coeff = (field.coerce(Fraction(am1, 2))
                     * (field.coerce(2) / a2) ** nu * om2)
            return CaseVerdict("1.1", "iv", True, trace, (nu - 1, coeff))
        trace.append("needs Omega_{nu,2} != 0 and a_{0,2,|m1|,0} != 0")
        return CaseVerdict("1.1", None, False, trace)

    if cls == ResonanceClass.NONTRIVIAL_MULTIPLE:
        trace.append(f"alpha2 a nontrivial multiple of alpha1 "
                     f"(m = {nf.res.label()}): Theorem 1.2")
        if not symmetry.get("plane_z2"):
            trace.append("hypothesis failed: invariance of the (y1,x1) plane "
                         "(partial derivatives in the second pair vanishing "
                         "on it) was not established")
            return CaseVerdict("1.2", None, False, trace)
        a0220 = nf.coefficient((0, 2, 2 * am1, 0))
        a0120 = nf.coefficient((0, 1, 2, 0))
        if am1 > 2:
            if am1 > nu - 1:
                trace.append("(i) |m1| > 2, |m1| > nu - 1")
                if _nonzero(om1) and _nonzero(om):
                    return CaseVerdict("1.2", "i", True, trace, lead_omega())
                trace.append("Omega_{nu,1} or Omega_nu vanishes")
                return CaseVerdict("1.2", None, False, trace)
            if am1 == nu - 1:
                trace.append("(ii) |m1| > 2, |m1| = nu - 1")
                if _nonzero(om1) and _nonzero(om) and a0220.is_zero():
                    return CaseVerdict("1.2", "ii", True, trace, lead_omega())
                trace.append("needs Omega_{nu,1}, Omega_nu != 0 and "
                             "a_{0,2,2|m1|,0} = 0")
                return CaseVerdict("1.2", None, False, trace)
            trace.append("(iii) |m1| > 2, |m1| < nu - 1")
            if _nonzero(om2) and not a0220.is_zero():
                coeff = (field.coerce(am1) * (field.coerce(2) / a2) ** nu * om2)
                return CaseVerdict("1.2", "iii", True, trace, (nu - 1, coeff))
            trace.append("needs Omega_{nu,2} != 0 and a_{0,2,2|m1|,0} != 0")
            return CaseVerdict("1.2", None, False, trace)
        # |m1| == 2
        if nu == 2:
            if _nonzero(om1) and not a0120.is_zero():
                trace.append("(iv) |m1| = 2, nu = 2, Omega_{2,1} != 0, "
                             "a_{0,1,2,0} != 0")
                coeff = field.coerce(2) / (a1 * a1) * om1
                return CaseVerdict("1.2", "iv", True, trace, (1, coeff))
            if _nonzero(om1) and _nonzero(om):
                trace.append("(v) |m1| = 2, nu = 2, Omega_{2,1}, Omega_2 != 0")
                if a0120.is_zero():
                    coeff = field.coerce(4) * om
                else:
                    coeff = field.coerce(2) / (a1 * a1) * om1
                return CaseVerdict("1.2", "v", True, trace, (1, coeff))
            trace.append("clauses (iv)/(v) need Omega_{2,1} != 0 and "
                         "a_{0,1,2,0} != 0 or Omega_2 != 0")
            return CaseVerdict("1.2", None, False, trace)
        if nu == 3:
            a0240 = nf.coefficient((0, 2, 4, 0))
            trace.append("(vi) |m1| = 2, nu = 3")
            if _nonzero(om1) and not a0120.is_zero() and a0240.is_zero():
                coeff = field.coerce(4) / (a1 ** 3) * om1
                return CaseVerdict("1.2", "vi", True, trace, (2, coeff))
            trace.append("needs Omega_{3,1}, a_{0,1,2,0} != 0 and "
                         "a_{0,2,4,0} = 0")
            return CaseVerdict("1.2", None, False, trace)
        trace.append(f"|m1| = 2 with nu = {nu} matches no clause")
        return CaseVerdict("1.2", None, False, trace)

    # equal frequencies
    zp = symmetry.get("zp")
    label = "1.3" if zp else "C"
    if zp:
        trace.append(f"equal frequencies with Z_{zp} symmetry: Theorem 1.3 "
                     "(analysis on the Psi-conjugated normal form)")
    elif symmetry.get("plane_z1") and symmetry.get("plane_z2"):
        trace.append("equal frequencies with both coordinate planes "
                     "invariant: plane-symmetric analogue of Theorem 1.3")
    else:
        trace.append("hypothesis failed: equal frequencies need either a "
                     "declared Z_p symmetry (p >= 3) or invariance of both "
                     "coordinate planes")
        return CaseVerdict(None, None, False, trace)
    a0220 = nf.coefficient((0, 2, 2, 0))
    if nu != 2:
        trace.append(f"nu = {nu} != 2 matches no clause of Theorem 1.3")
        return CaseVerdict(label, None, False, trace)
    if not a0220.is_zero():
        trace.append("a_{0,2,2,0} != 0: neither clause applies")
        return CaseVerdict(label, None, False, trace)
    if _nonzero(om):
        trace.append("(i) nu = 2, Omega_2 != 0, a_{0,2,2,0} = 0")
        return CaseVerdict(label, "i", True, trace, (1, field.coerce(4) * om))
    trace.append("Omega_2 = 0; testing clause (ii)")
    if nf.order < 6:
        trace.append("clause (ii) needs a normal form of order >= 6")
        return CaseVerdict(label, None, False, trace)
    if _nonzero(om1) and om1 == -om2:
        b1, b2 = beta_coeffs(nf)
        combo = b1 + b2 + 2 * om1 * om2
        if _nonzero(combo):
            trace.append("(ii) Omega_{2,1} = -Omega_{2,2} != 0, "
                         "beta1 + beta2 + 2 Omega_{2,1} Omega_{2,2} != 0")
            coeff = field.coerce(8) / (a1 ** 4) * combo
            return CaseVerdict(label, "ii", True, trace, (2, coeff))
        trace.append("beta1 + beta2 + 2 Omega_{2,1} Omega_{2,2} = 0")
        return CaseVerdict(label, None, False, trace)
    trace.append("clause (ii) needs Omega_{2,1} = -Omega_{2,2} != 0")
    return CaseVerdict(label, None, False, trace)


# ---------------------------------------------------------------------------
# assembled analysis
# ---------------------------------------------------------------------------


@dataclass
class HopfAnalysis:
    """Everything the decision procedure produced for one normal form."""

    nf: NormalFormResult
    nu: int | None
    omega_nu1: object | None
    omega_nu2: object | None
    omega_nu: object | None
    beta1: object | None
    beta2: object | None
    exists_gamma1: bool
    exists_gamma2: bool
    cases: CaseData | None
    rho1: SeriesE | None
    rho2: SeriesE | None
    product: SeriesE | None
    verdict: CaseVerdict
    series_order: int

    def check_omega_identity(self) -> bool:
        """Omega_nu recombination identity, exact."""
        if self.nu is None:
            return True
        field = self.nf.field
        a1 = field.coerce(self.nf.alpha.alpha1)
        a2 = field.coerce(self.nf.alpha.alpha2)
        lhs = self.omega_nu
        rhs = (self.omega_nu1 / (a2 * a1 ** (self.nu - 1))
               + self.omega_nu2 / (a1 * a2 ** (self.nu - 1)))
        return lhs == rhs


def analyze(nf: NormalFormResult, symmetry: dict | None = None,
            K: int | None = None) -> HopfAnalysis:
    """Run the full decision pipeline on a normal form."""
    cap = max(nf.order // 2 - 1, 0)
    K = cap if K is None else min(K, cap)
    nu = nu_index(nf) if nf.order >= 4 else None
    om1 = om2 = om = None
    if nu is not None:
        om1, om2, om = omega_coeffs(nf, nu)
    b1 = b2 = None
    if nf.order >= 6 and nf.alpha.alpha1 == nf.alpha.alpha2:
        b1, b2 = beta_coeffs(nf)
    g1, g2 = orbit_existence(nf)
    cases = rho1 = rho2 = product = None
    if g1 and g2:
        try:
            cases = case_quantities(nf, K)
            rho1, rho2 = rotation_series(nf, K)
            product = twist_product(nf, K)
        except IndeterminateError:
            cases = case_quantities(nf, K)
    verdict = theorem_check(nf, symmetry)
    verdict.gauge = nf.gauge
    if verdict.satisfied and product is not None and verdict.predicted_leading:
        k, c = verdict.predicted_leading
        got = product.coefficient(k) if k < product.err_order else None
        if got is not None and got != c:
            raise AssertionError(
                f"clause prediction E^{k} coefficient {c} disagrees with the "
                f"computed twist product coefficient {got}"
            )
    return HopfAnalysis(
        nf=nf, nu=nu, omega_nu1=om1, omega_nu2=om2, omega_nu=om,
        beta1=b1, beta2=b2, exists_gamma1=g1, exists_gamma2=g2,
        cases=cases, rho1=rho1, rho2=rho2, product=product,
        verdict=verdict, series_order=K,
    )

"""Inductive normalization of an elliptic two-degree-of-freedom Hamiltonian.

For each degree s = 3..N the current Hamiltonian's s-homogeneous part is
split into a kernel part (kept, it commutes with the quadratic flow) and an
image part L; the generating polynomial G_s is the unique image-of-D
solution of -D.G_s = L, the induced near-identity canonical map is obtained
by inverting the generating relations, and the Hamiltonian is recomposed.
The gauge is canonical: every G_s has zero kernel component, which makes
the whole sequence a pure function of (H, N, alpha, resonance data).

Symmetry-preserving facts about this construction (restriction to an
invariant symplectic coordinate plane, invariance under the diagonal Z_p
rotation) are exposed as checkers and as an asserting variant of the
normalizer; they hold automatically in this gauge because the kernel/image
splitting is equivariant.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .scalars import CC, Field, QuadExt, RATIONAL, quad_field
from .poly import (
    COMPLEX,
    REAL,
    ChartError,
    Polynomial,
    TruncatedMap,
    apply_D,
    compose_map,
    compose_maps,
    degree,
    invert_generating,
    linear_substitute,
    solve_homological,
    split_ker_im,
    symplectic_defect,
    to_complex,
    to_real,
)
from .resonance import Frequencies, ResonanceData, resonance_pair

__all__ = [
    "NormalFormResult",
    "VerifyReport",
    "normalize",
    "verify",
    "check_plane_invariance",
    "check_zp_invariance",
    "symmetric_normalize_zp",
    "psi_conjugate",
    "psi_matrix",
    "rescale",
    "rotation_matrix_zp",
]

GAUGE_IM_D = "im-D"


@dataclass
class NormalFormResult:
    """Output of the normalizer: kernel form, generators, map, coefficients."""

    h_n: Polynomial                 # complex chart, annihilated by D
    generators: list[Polynomial]    # G_s, s = 3..N, real chart in (eta, x)
    transform: TruncatedMap         # composed map (eta, xi) -> (y, x)
    table: dict                     # exponent quadruple -> CC, degrees 3..N
    alpha: Frequencies
    res: ResonanceData
    order: int
    gauge: str = GAUGE_IM_D
    symmetry: dict = dc_field(default_factory=dict)

    def coefficient(self, exps) -> CC:
        z = self.h_n.field.zero()
        return self.table.get(tuple(exps), CC(z, z))

    @property
    def field(self) -> Field:
        return self.h_n.field

    def gamma(self, s: int) -> Polynomial:
        """Degree-s kernel part of the normal form."""
        return self.h_n.homogeneous_part(s)


def _check_quadratic_part(h: Polynomial, alpha: Frequencies) -> None:
    field = h.field
    a1 = field.coerce(alpha.alpha1)
    a2 = field.coerce(alpha.alpha2)
    half = field.coerce(Fraction(1, 2))
    low = {e: c for e, c in h.coeffs.items() if degree(e) <= 2}
    if h.chart == REAL:
        want = {
            (2, 0, 0, 0): CC(a1 * half), (0, 0, 2, 0): CC(a1 * half),
            (0, 2, 0, 0): CC(a2 * half), (0, 0, 0, 2): CC(a2 * half),
        }
    else:
        want = {(1, 0, 1, 0): CC(a1 * half), (0, 1, 0, 1): CC(a2 * half)}
    if low != want:
        raise ValueError(
            "Hamiltonian is not in the required form: quadratic part must be "
            "exactly alpha1/2 (y1^2+x1^2) + alpha2/2 (y2^2+x2^2) with no "
            "constant or linear terms"
        )


def normalize(h: Polynomial, order: int, alpha: Frequencies,
              res: ResonanceData | None = None) -> NormalFormResult:
    """Birkhoff-Gustavson normal form of ``h`` through degree ``order``.

    ``h`` may be given on either chart; its Taylor data must extend at least
    to ``order`` (i.e. h.order >= order) and its quadratic part must be the
    diagonal form prescribed by ``alpha``.  The resonance data defaults to
    the exact generator computed from ``alpha``.
    """
    if order < 3:
        raise ValueError("normalization starts at order 3")
    if h.order < order:
        raise ValueError(
            f"input polynomial only carries Taylor data to degree {h.order} "
            f"< requested order {order}"
        )
    if res is None:
        res = resonance_pair(tuple(alpha))
    else:
        res = resonance_pair(tuple(alpha), declared=res)
    _check_quadratic_part(h, alpha)

    work = to_real(h) if h.chart == COMPLEX else h
    work = work.truncate(order)
    field = work.field

    h2c = Polynomial.quadratic_h2(tuple(alpha), COMPLEX, field, order)
    kernel_acc = h2c
    generators: list[Polynomial] = []
    step_maps: list[TruncatedMap] = []

    for s in range(3, order + 1):
        hs = work.homogeneous_part(s)
        if hs.is_zero():
            generators.append(Polynomial.zero(REAL, field, order))
            continue
        hs_c = to_complex(hs)
        ker, img = split_ker_im(hs_c, res)
        kernel_acc = kernel_acc + ker
        if img.is_zero():
            generators.append(Polynomial.zero(REAL, field, order))
            continue
        g_s = to_real(solve_homological(img, tuple(alpha), res))
        generators.append(g_s)
        phi_s = invert_generating(g_s, order)
        work = compose_map(work, phi_s, order)
        step_maps.append(phi_s)

    # fold right so the sparse late maps are substituted first
    transform = TruncatedMap.identity(field, order)
    for phi_s in reversed(step_maps):
        transform = compose_maps(phi_s, transform, order)

    return NormalFormResult(
        h_n=kernel_acc,
        generators=generators,
        transform=transform,
        table={e: c for e, c in kernel_acc.coeffs.items() if degree(e) >= 3},
        alpha=alpha,
        res=res,
        order=order,
    )


@dataclass
class VerifyReport:
    ok: bool
    failures: list[str]

    def __bool__(self):
        return self.ok


def verify(nf: NormalFormResult, h: Polynomial) -> VerifyReport:
    """Re-derive the defining identities of a normal-form result.

    Checks: D annihilates H_N; the coefficient table is Hermitian
    (a_lk = conj(a_kl)); the quadratic part matches alpha; H o Phi - H_N has
    no terms of degree <= N; the transform is symplectic to the guaranteed
    order.  Stops reporting after collecting all failures (report style).
    """
    failures = []
    alpha = tuple(nf.alpha)
    d_hn = apply_D(nf.h_n, alpha)
    if not d_hn.is_zero():
        e = next(iter(d_hn.coeffs))
        failures.append(f"D.H_N != 0 (first offender {e})")
    for (k1, k2, l1, l2), c in nf.h_n.coeffs.items():
        mirror = nf.h_n.coeffs.get((l1, l2, k1, k2))
        if mirror is None or mirror != c.conj():
            failures.append(
                f"reality violated: a[{(k1, k2, l1, l2)}] != conj(a[{(l1, l2, k1, k2)}])"
            )
            break
    try:
        _check_quadratic_part(nf.h_n, nf.alpha)
    except ValueError:
        failures.append("quadratic part of H_N differs from H2")
    hr = to_real(h) if h.chart == COMPLEX else h
    composed = compose_map(hr.truncate(nf.order), nf.transform, nf.order)
    residue = to_complex(composed) - nf.h_n
    if not residue.is_zero():
        e = min(residue.coeffs, key=lambda t: degree(t))
        failures.append(
            f"H o Phi - H_N has a degree-{degree(e)} term at {e}"
        )
    defect = symplectic_defect(nf.transform, nf.order)
    if defect != 0.0:
        failures.append(f"symplectic defect {defect:g} != 0")
    return VerifyReport(ok=not failures, failures=failures)


# ---------------------------------------------------------------------------
# symmetries
# ---------------------------------------------------------------------------


def check_plane_invariance(h: Polynomial, plane: str) -> bool:
    """True iff the coordinate plane is invariant for the flow of ``h``.

    ``plane`` is "z2" for the {y2 = x2 = 0} condition (partial derivatives
    in the second pair vanish on the plane) or "z1" symmetrically.  The
    coefficient criterion: no monomial carries total degree exactly 1 in the
    selected variable pair.  Chart-independent.
    """
    if plane not in ("z1", "z2"):
        raise ValueError("plane must be 'z1' or 'z2'")
    i, j = (0, 2) if plane == "z1" else (1, 3)
    return all(e[i] + e[j] != 1 for e in h.coeffs)


def rotation_matrix_zp(p: int, field: Field | None = None):
    """Matrix of R: (y, x) -> (e^{2 pi i/p} y, e^{2 pi i/p} x) and its field.

    The rotation acts on the Lagrangian planes (y1, y2) and (x1, x2).
    Exact entries exist for p in {2, 3, 4, 6} (cos, sin in Q or Q(sqrt 3)).
    """
    table = {
        2: (Fraction(-1), Fraction(0), RATIONAL),
        3: (Fraction(-1, 2), QuadExt(0, Fraction(1, 2), 3), quad_field(3)),
        4: (Fraction(0), Fraction(1), RATIONAL),
        6: (Fraction(1, 2), QuadExt(0, Fraction(1, 2), 3), quad_field(3)),
    }
    if p not in table:
        raise ValueError(f"no exact rotation entries for p = {p}")
    c, s, fld = table[p]
    if field is not None:
        fld = field.join(fld) if fld != RATIONAL else field
    c = fld.coerce(c)
    s = fld.coerce(s)
    z = fld.zero()
    m = [
        [c, -s, z, z],
        [s, c, z, z],
        [z, z, c, -s],
        [z, z, s, c],
    ]
    return m, fld


def check_zp_invariance(h: Polynomial, p: int, convention: str = "R",
                        tol: float = 1e-12) -> bool:
    """Exact (or float-fallback) check of H o R = H under the Z_p action.

    Convention "R" rotates the Lagrangian planes (y1,y2) and (x1,x2) by
    2 pi / p; exact for p in {2, 3, 4, 6}, float comparison at ``tol``
    otherwise.  Convention "script-R" rotates the symplectic planes in
    opposite senses; on the complex chart it acts diagonally on monomials,
    so the check is exact for every p.
    """
    if p < 2:
        raise ValueError("p >= 2 required")
    if convention == "script-R":
        hc = h if h.chart == COMPLEX else to_complex(h)
        return all((e[2] - e[0] + e[1] - e[3]) % p == 0 for e in hc.coeffs)
    if convention != "R":
        raise ValueError("convention must be 'R' or 'script-R'")
    hr = to_real(h) if h.chart == COMPLEX else h
    if p in (2, 3, 4, 6):
        m, fld = rotation_matrix_zp(p, hr.field)
        rotated = linear_substitute(hr.promote(fld), m, fld)
        return rotated == hr.promote(fld)
    if hr.field.kind != "float":
        raise ValueError(
            f"p = {p} has no exact rotation entries; promote the polynomial "
            "with .to_float() to opt in to the tolerance-based check"
        )
    import math
    c = math.cos(2 * math.pi / p)
    s = math.sin(2 * math.pi / p)
    m = [[c, -s, 0.0, 0.0], [s, c, 0.0, 0.0],
         [0.0, 0.0, c, -s], [0.0, 0.0, s, c]]
    rotated = linear_substitute(hr, m, hr.field)
    diff = rotated - hr
    return all(abs(complex(cc)) <= tol for cc in diff.coeffs.values())


def symmetric_normalize_zp(h: Polynomial, order: int, p: int,
                           alpha: Frequencies | None = None) -> NormalFormResult:
    """Normalize a Z_p-invariant Hamiltonian, asserting symmetry is kept.

    Requires alpha1 = alpha2 (the resonant setting the rotation symmetry
    lives in) and H o R = H.  The canonical gauge preserves the symmetry by
    construction; this wrapper re-checks H_N and every generator exactly and
    records the symmetry metadata on the result.
    """
    alpha = alpha or Frequencies(Fraction(1), Fraction(1))
    if alpha.alpha1 != alpha.alpha2:
        raise ValueError("Z_p-symmetric normalization assumes alpha1 = alpha2")
    if not check_zp_invariance(h, p, "R"):
        raise ValueError(f"Hamiltonian is not Z_{p}-invariant (convention R)")
    nf = normalize(h, order, alpha)
    hn_real = to_real(nf.h_n)
    if not check_zp_invariance(hn_real, p, "R"):
        raise AssertionError("normal form lost the Z_p symmetry")
    for g in nf.generators:
        if not g.is_zero() and not check_zp_invariance(g, p, "R"):
            raise AssertionError("a generating polynomial lost the Z_p symmetry")
    nf.symmetry = {"zp": p, "convention": "R"}
    return nf


def psi_matrix(field: Field):
    """Matrix of the canonical axis-mixing map Psi (needs sqrt 2)."""
    fld = quad_field(2) if field == RATIONAL else field.join(quad_field(2))
    r = fld.coerce(QuadExt(0, Fraction(1, 2), 2))  # 1/sqrt(2) = sqrt(2)/2
    z = fld.zero()
    m = [
        [r, r, z, z],      # y1 <- (y1 + y2)/sqrt2
        [z, z, r, -r],     # y2 <- (x1 - x2)/sqrt2
        [z, z, r, r],      # x1 <- (x1 + x2)/sqrt2
        [-r, r, z, z],     # x2 <- (y2 - y1)/sqrt2
    ]
    return m, fld


def psi_conjugate(h: Polynomial) -> Polynomial:
    """H o Psi with Psi(y1,y2,x1,x2) = 2^{-1/2}(y1+y2, x1-x2, x1+x2, y2-y1).

    Psi is linear-symplectic and commutes with the isotropic quadratic part;
    H2 o Psi = H2 is asserted whenever the input's quadratic part is
    isotropic.  The result is demoted back to the input field when the
    sqrt-2 parts cancel (they always do for even polynomials).
    """
    if h.chart != REAL:
        raise ChartError("psi_conjugate operates on the real chart")
    m, fld = psi_matrix(h.field)
    out = linear_substitute(h.promote(fld), m, fld)
    quad_in = {e: c for e, c in h.coeffs.items() if degree(e) == 2}
    iso = (quad_in.get((2, 0, 0, 0)) == quad_in.get((0, 2, 0, 0))
           and quad_in.get((0, 0, 2, 0)) == quad_in.get((0, 0, 0, 2))
           and quad_in.get((2, 0, 0, 0)) == quad_in.get((0, 0, 2, 0))
           and not any(e in quad_in for e in ((1, 1, 0, 0), (1, 0, 1, 0),
                                              (1, 0, 0, 1), (0, 1, 1, 0),
                                              (0, 1, 0, 1), (0, 0, 1, 1))))
    if iso and quad_in:
        got = {e: c for e, c in out.coeffs.items() if degree(e) == 2}
        want = {e: CC(fld.coerce(c.re), fld.coerce(c.im))
                for e, c in quad_in.items()}
        if got != want:
            raise AssertionError("H2 o Psi != H2 for an isotropic quadratic part")
    if h.field.kind == "rational":
        out = out.demote_to_rational()
    return out


def rescale(h: Polynomial, eps, delta, order: int) -> Polynomial:
    """The (eps, delta)-family built on the degree split at ``order``.

    Terms of degree d <= order scale by eps^{d-2} (the normal-form member);
    terms of degree d > order carry the extra remainder weight
    delta^{order-1} eps^{d-order-1}.  With delta = eps this is exactly
    eps^{-2} H(eps .); with delta = 0 the tail is switched off.
    """
    field = h.field
    eps = field.coerce(eps)
    delta = field.coerce(delta)
    if not (_positive(eps)):
        raise ValueError("eps must be positive")
    out = {}
    for e, c in h.coeffs.items():
        d = degree(e)
        if d <= order:
            scale = eps ** (d - 2)
        else:
            scale = (delta ** (order - 1)) * eps ** (d - order - 1)
        if scale == 0:
            continue
        out[e] = c * scale
    return Polynomial(h.chart, field, h.order, out, h.lossy)


def _positive(x) -> bool:
    if isinstance(x, QuadExt):
        return x.sign() > 0
    return x > 0

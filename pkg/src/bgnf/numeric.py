"""Numerical cross-validation: flows, periodic orbits, rotation numbers.

The symbolic side of the package predicts rotation numbers as series in the
energy; this module measures them on the actual flow.  The frame is the
fixed quaternion trivialization built from the gradient (V_k = A_k V0), the
winding angle solves the projected-Hessian equation

    theta' = (V3, L V3) + (cos, sin) [[ (V1,L V1), (V1,L V2) ],
                                      [ (V2,L V1), (V2,L V2) ]] (cos, sin)^T

along the orbit, and the rotation number is T * theta(t) / (2 pi t).  The
defining limit converges like 1/t, so estimates over doubling horizons are
Richardson-extrapolated; when the one-period reduced monodromy is cleanly
elliptic or hyperbolic the estimate is then snapped onto the exact phase
(winding integer + elliptic phase), which brings the error down to the ODE
tolerance instead of the 1/horizon tail.

Integration is adaptive high-order (DOP853) with energy-drift monitoring;
orbits are located by Newton shooting on a section transverse to the seed
velocity, solving jointly for three section coordinates and the period
against the periodicity defect plus the energy pin, in least-squares form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.integrate import solve_ivp

__all__ = [
    "EvaluableHamiltonian",
    "PolynomialHamiltonian",
    "Trajectory",
    "OrbitRecord",
    "FrameBasis",
    "RotationEstimate",
    "integrate",
    "flow_with_stm",
    "find_periodic_orbit",
    "quaternion_frame",
    "rotation_number_numeric",
    "winding_rate",
    "winding_rate_numeric",
    "winding_rate_grid",
    "series_vs_numeric_report",
    "ReportRow",
    "ReportTable",
]

# J for the symplectic form dy1^dx1 + dy2^dx2 with ordering (y1,y2,x1,x2)
_J = np.array([
    [0.0, 0.0, -1.0, 0.0],
    [0.0, 0.0, 0.0, -1.0],
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
])


class EvaluableHamiltonian:
    """value / grad / hess callables over w = (y1, y2, x1, x2).

    ``value`` returns a float, ``grad`` a 4-tuple of floats and ``hess`` a
    4x4 nested tuple; plain Python floats keep the inner integration loops
    fast.
    """

    def __init__(self, value, grad, hess, name="hamiltonian"):
        self.value = value
        self.grad = grad
        self.hess = hess
        self.name = name

    def vector_field(self, w):
        g = self.grad(w)
        return np.array([-g[2], -g[3], g[0], g[1]])


def _monomial_expr(e, c) -> str:
    factors = [repr(c)]
    for i, k in enumerate(e):
        factors.extend([f"w{i}"] * k)
    return "*".join(factors)


def _poly_expr(poly) -> str:
    parts = []
    for e, c in sorted(poly.coeffs.items()):
        z = complex(c)
        if abs(z.imag) > 1e-300:
            raise ValueError("numeric path needs real coefficients")
        parts.append(_monomial_expr(e, z.real))
    return " + ".join(parts) if parts else "0.0"


def _codegen(name: str, body_exprs: str) -> object:
    src = (f"def {name}(w):\n"
           f"    w0 = float(w[0]); w1 = float(w[1]); "
           f"w2 = float(w[2]); w3 = float(w[3])\n"
           f"    return {body_exprs}\n")
    ns: dict = {}
    exec(src, ns)  # generated from exact polynomial data only
    return ns[name]


class PolynomialHamiltonian(EvaluableHamiltonian):
    """Compile a real-chart polynomial into fast float callables.

    Gradient and Hessian are produced by exact symbolic differentiation of
    the polynomial before code generation, so they are correct by
    construction.
    """

    def __init__(self, poly, name="polynomial"):
        if poly.chart != "real":
            from .poly import to_real
            poly = to_real(poly)
        grads = [poly.diff(i) for i in range(4)]
        value = _codegen("h_value", _poly_expr(poly))
        grad = _codegen("h_grad", "(" + ", ".join(
            _poly_expr(g) for g in grads) + ")")
        rows = []
        for i in range(4):
            rows.append("(" + ", ".join(
                _poly_expr(grads[i].diff(j)) for j in range(4)) + ")")
        hess = _codegen("h_hess", "(" + ", ".join(rows) + ")")
        super().__init__(value, grad, hess, name)


@dataclass
class Trajectory:
    t: np.ndarray
    w: np.ndarray            # shape (n, 4)
    energy0: float
    energy_drift: float      # max |H(w(t)) - H(w(0))| over the samples


@dataclass
class OrbitRecord:
    point: np.ndarray
    period: float
    energy: float
    residual: float
    tag: str = ""


@dataclass
class FrameBasis:
    v0: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    v3: np.ndarray

    def gram_defect(self) -> float:
        m = np.stack([self.v0, self.v1, self.v2, self.v3])
        return float(np.max(np.abs(m @ m.T - np.eye(4))))


@dataclass
class RotationEstimate:
    value: float
    error: float
    method: str                    # "snap-elliptic" | "snap-hyperbolic" | "richardson"
    raw: list = dc_field(default_factory=list)
    richardson: float = math.nan
    trace_monodromy: float = math.nan
    det_monodromy: float = math.nan


def integrate(ham: EvaluableHamiltonian, w0, t_span, tol: float = 1e-12,
              t_eval=None, max_step=np.inf) -> Trajectory:
    """Adaptive Hamiltonian flow with per-sample energy monitoring."""

    def rhs(_t, w):
        g = ham.grad(w)
        return (-g[2], -g[3], g[0], g[1])

    sol = solve_ivp(rhs, t_span, np.asarray(w0, dtype=float), method="DOP853",
                    rtol=tol, atol=tol * 1e-2, t_eval=t_eval,
                    max_step=max_step, dense_output=False)
    if not sol.success:
        raise RuntimeError(f"integration failed: {sol.message}")
    if not np.all(np.isfinite(sol.y)):
        raise RuntimeError("non-finite state during integration")
    e0 = ham.value(np.asarray(w0, dtype=float))
    energies = np.array([ham.value(sol.y[:, i]) for i in range(sol.y.shape[1])])
    return Trajectory(t=sol.t, w=sol.y.T, energy0=e0,
                      energy_drift=float(np.max(np.abs(energies - e0))))


def flow_with_stm(ham: EvaluableHamiltonian, w0, T: float, tol: float = 1e-12):
    """Flow to time T together with the state-transition matrix."""

    def rhs(_t, y):
        w = y[:4]
        g = ham.grad(w)
        L = np.asarray(ham.hess(w))
        M = y[4:].reshape(4, 4)
        dM = _J @ L @ M
        return np.concatenate([[-g[2], -g[3], g[0], g[1]], dM.ravel()])

    y0 = np.concatenate([np.asarray(w0, dtype=float), np.eye(4).ravel()])
    sol = solve_ivp(rhs, (0.0, T), y0, method="DOP853", rtol=tol,
                    atol=tol * 1e-2)
    if not sol.success:
        raise RuntimeError(f"variational integration failed: {sol.message}")
    yT = sol.y[:, -1]
    return yT[:4], yT[4:].reshape(4, 4)


def find_periodic_orbit(ham: EvaluableHamiltonian, energy: float, seed_point,
                        seed_period: float, tol_shoot: float = 1e-10,
                        tol_ode: float = 1e-12, max_iter: int = 30,
                        tag: str = "") -> OrbitRecord:
    """Newton shooting on the section transverse to the seed velocity.

    Unknowns are three section coordinates and the period; the residual is
    the periodicity defect plus the energy pin, solved in least-squares form
    (the system is 5x4 but consistent, the flow preserving H makes one
    periodicity component redundant).
    """
    w = np.asarray(seed_point, dtype=float).copy()
    T = float(seed_period)
    v0 = ham.vector_field(w)
    nv = np.linalg.norm(v0)
    if nv == 0:
        raise ValueError("seed velocity vanishes; section undefined")
    q, _ = np.linalg.qr(np.column_stack([v0 / nv, np.eye(4)[:, :3]]))
    B = q[:, 1:4]  # orthonormal complement of the seed velocity
    base = w.copy()

    for _ in range(max_iter):
        wT, M = flow_with_stm(ham, w, T, tol_ode)
        r = np.concatenate([wT - w, [ham.value(w) - energy]])
        if np.linalg.norm(r[:4]) <= tol_shoot and abs(r[4]) <= tol_shoot:
            return OrbitRecord(point=w, period=T, energy=energy,
                               residual=float(np.linalg.norm(r[:4])), tag=tag)
        fT = ham.vector_field(wT)
        Js = np.zeros((5, 4))
        Js[:4, :3] = (M - np.eye(4)) @ B
        Js[:4, 3] = fT
        Js[4, :3] = np.asarray(ham.grad(w)) @ B
        step, *_ = np.linalg.lstsq(Js, -r, rcond=None)
        # clamp absurd steps to keep Newton in its basin
        limit = 0.5 * max(np.linalg.norm(w - base) + np.linalg.norm(base), 1e-3)
        sn = np.linalg.norm(step)
        if sn > limit:
            step *= limit / sn
        w = w + B @ step[:3]
        T = T + step[3]
        if T <= 0 or not np.all(np.isfinite(w)):
            raise RuntimeError("shooting diverged (negative period or NaN)")
    raise RuntimeError(
        f"Newton shooting did not converge in {max_iter} iterations "
        f"(last residual {np.linalg.norm(r[:4]):.3e})"
    )


# ---------------------------------------------------------------------------
# quaternion frame and the winding equation
# ---------------------------------------------------------------------------


def quaternion_frame(grad) -> FrameBasis:
    """Orthonormal frame V0 = grad/|grad|, V_k = A_k V0.

    Component form (g = (g_y1, g_y2, g_x1, g_x2), n = |g|):
      V1 = ( g_x2, -g_x1,  g_y2, -g_y1) / n
      V2 = (-g_y2,  g_y1,  g_x2, -g_x1) / n
      V3 = (-g_x1, -g_x2,  g_y1,  g_y2) / n
    V3 is parallel to the Hamiltonian vector field and omega0(V1, V2) = 1.
    """
    g = np.asarray(grad, dtype=float)
    n = np.linalg.norm(g)
    if n == 0:
        raise ValueError("zero gradient: frame undefined")
    a, b, c, d = g / n
    v0 = np.array([a, b, c, d])
    v1 = np.array([d, -c, b, -a])
    v2 = np.array([-b, a, d, -c])
    v3 = np.array([-c, -d, a, b])
    return FrameBasis(v0, v1, v2, v3)


def _theta_rate(ham, w, theta, phase):
    # pure-python inner loop: frame, projected Hessian, winding rate
    a, b, c, d = ham.grad(w)
    n = math.sqrt(a * a + b * b + c * c + d * d)
    a, b, c, d = a / n, b / n, c / n, d / n
    v1 = (d, -c, b, -a)
    v2 = (-b, a, d, -c)
    v3 = (-c, -d, a, b)
    if phase:
        cp, sp = math.cos(phase), math.sin(phase)
        v1, v2 = (tuple(cp * v1[i] + sp * v2[i] for i in range(4)),
                  tuple(-sp * v1[i] + cp * v2[i] for i in range(4)))
    L = ham.hess(w)
    Lv1 = [L[i][0] * v1[0] + L[i][1] * v1[1] + L[i][2] * v1[2] + L[i][3] * v1[3]
           for i in range(4)]
    Lv2 = [L[i][0] * v2[0] + L[i][1] * v2[1] + L[i][2] * v2[2] + L[i][3] * v2[3]
           for i in range(4)]
    Lv3 = [L[i][0] * v3[0] + L[i][1] * v3[1] + L[i][2] * v3[2] + L[i][3] * v3[3]
           for i in range(4)]
    h11 = v1[0] * Lv1[0] + v1[1] * Lv1[1] + v1[2] * Lv1[2] + v1[3] * Lv1[3]
    h12 = v1[0] * Lv2[0] + v1[1] * Lv2[1] + v1[2] * Lv2[2] + v1[3] * Lv2[3]
    h22 = v2[0] * Lv2[0] + v2[1] * Lv2[1] + v2[2] * Lv2[2] + v2[3] * Lv2[3]
    h33 = v3[0] * Lv3[0] + v3[1] * Lv3[1] + v3[2] * Lv3[2] + v3[3] * Lv3[3]
    ct = math.cos(theta)
    st = math.sin(theta)
    return h33 + ct * ct * h11 + 2.0 * ct * st * h12 + st * st * h22


def _reduced_monodromy(ham, orbit: OrbitRecord, tol: float):
    _, M = flow_with_stm(ham, orbit.point, orbit.period, tol)
    fr = quaternion_frame(ham.grad(orbit.point))
    P = np.array([
        [fr.v1 @ (M @ fr.v1), fr.v1 @ (M @ fr.v2)],
        [fr.v2 @ (M @ fr.v1), fr.v2 @ (M @ fr.v2)],
    ])
    return P, M


def rotation_number_numeric(ham: EvaluableHamiltonian, orbit: OrbitRecord,
                            horizon: int = 8, tol: float = 1e-10,
                            frame_phase: float = 0.0,
                            snap: bool = True) -> RotationEstimate:
    """Rotation number of a periodic orbit in the quaternion frame.

    Integrates the winding equation for 2^k periods, k = 4..horizon, and
    Richardson-extrapolates the estimates theta(2^k T)/(2 pi 2^k).  When the
    reduced one-period monodromy is cleanly elliptic (|tr| < 2) the result
    is snapped to (integer winding +/- elliptic phase), which is exact up to
    the ODE tolerance; cleanly hyperbolic monodromy snaps to half-integers.
    Near-parabolic cases keep the Richardson value and its tail as the bar.
    """
    T = orbit.period
    kmin = 4
    kmax = max(horizon, kmin + 1)
    n_max = 2 ** kmax

    def rhs(_t, y):
        w = y[:4]
        g = ham.grad(w)
        dth = _theta_rate(ham, w, y[4], frame_phase)
        return (-g[2], -g[3], g[0], g[1], dth)

    t_eval = [T * (2 ** k) for k in range(kmin, kmax + 1)]
    y0 = np.concatenate([orbit.point, [0.0]])
    sol = solve_ivp(rhs, (0.0, T * n_max), y0, method="DOP853",
                    rtol=max(tol, 1e-11), atol=max(tol, 1e-11) * 1e-2,
                    t_eval=t_eval)
    if not sol.success:
        raise RuntimeError(f"winding integration failed: {sol.message}")
    raw = [sol.y[4, i] / (2.0 * math.pi * 2 ** k)
           for i, k in enumerate(range(kmin, kmax + 1))]

    # Richardson (error ~ 1/n over doubling horizons)
    table = [list(raw)]
    for j in range(1, len(raw)):
        prev = table[-1]
        table.append([
            (2 ** j * prev[i + 1] - prev[i]) / (2 ** j - 1)
            for i in range(len(prev) - 1)
        ])
    rich = table[-1][0]
    bar = abs(table[-1][0] - table[-2][0]) + 1e-12 if len(raw) > 1 else 1e-6

    est = RotationEstimate(value=rich, error=bar, method="richardson",
                           raw=raw, richardson=rich)
    if not snap:
        return est

    P, _ = _reduced_monodromy(ham, orbit, min(tol, 1e-11))
    tr = float(np.trace(P))
    est.trace_monodromy = tr
    est.det_monodromy = float(np.linalg.det(P))
    window = 1.1 / n_max + 1e-7
    anchor = raw[-1]
    margin = 1e-7

    def pick(candidates):
        hits = [c for c in candidates if abs(c - anchor) < window]
        if len(hits) == 1:
            return hits[0]
        return None

    if abs(tr) < 2.0 - margin:
        mu = math.acos(max(-1.0, min(1.0, tr / 2.0))) / (2.0 * math.pi)
        base = math.floor(anchor)
        cands = sorted({j + s * mu for j in range(base - 2, base + 3)
                        for s in (1, -1)})
        hit = pick(cands)
        if hit is not None:
            sens = 1e-9 / max(abs(math.sin(2 * math.pi * mu)), 1e-6)
            est.value = hit
            est.error = max(1e-9, sens)
            est.method = "snap-elliptic"
            return est
    elif abs(tr) > 2.0 + margin or abs(abs(tr) - 2.0) <= margin:
        # hyperbolic (or parabolic boundary): winding is a half-integer
        cands = [round(anchor * 2) / 2.0 + d for d in (-0.5, 0.0, 0.5)]
        hit = pick(cands)
        if hit is not None and abs(tr) > 2.0 + margin:
            est.value = hit
            est.error = 1e-9
            est.method = "snap-hyperbolic"
            return est
    return est


# ---------------------------------------------------------------------------
# the scalar winding-rate oracle
# ---------------------------------------------------------------------------


def winding_rate(a: float, b: float) -> float:
    """Closed-form asymptotic rate of theta' = a + b cos theta."""
    if abs(a) <= abs(b):
        return 0.0
    return math.copysign(math.sqrt(a * a - b * b), a)


def winding_rate_numeric(a: float, b: float, horizon: float = 10000.0,
                         tol: float = 1e-8) -> float:
    """theta(t)/t at t = horizon for the scalar winding equation."""

    def rhs(_t, th):
        return a + b * math.cos(th[0])

    sol = solve_ivp(rhs, (0.0, horizon), [0.0], method="DOP853",
                    rtol=tol, atol=tol)
    if not sol.success:
        raise RuntimeError(sol.message)
    return float(sol.y[0, -1] / horizon)


def winding_rate_grid(a_values, b_values, horizon: float = 10000.0,
                      tol: float = 1e-8):
    """Vectorized winding rates over a grid; returns (numeric, closed)."""
    pairs = [(a, b) for a in a_values for b in b_values]
    a_arr = np.array([p[0] for p in pairs])
    b_arr = np.array([p[1] for p in pairs])

    def rhs(_t, th):
        return a_arr + b_arr * np.cos(th)

    sol = solve_ivp(rhs, (0.0, horizon), np.zeros(len(pairs)),
                    method="DOP853", rtol=tol, atol=tol)
    if not sol.success:
        raise RuntimeError(sol.message)
    numeric = sol.y[:, -1] / horizon
    closed = np.array([winding_rate(a, b) for a, b in pairs])
    return pairs, numeric, closed


# ---------------------------------------------------------------------------
# series vs numeric report
# ---------------------------------------------------------------------------


@dataclass
class ReportRow:
    energy: float
    rho1_num: float
    rho1_series: float
    rho2_num: float
    rho2_series: float
    product_num: float
    product_series: float
    err_bar: float


@dataclass
class ReportTable:
    rows: list
    fit_q1: float
    fit_q2: float
    model: str

    COLUMNS = ("E", "rho1_num", "rho1_series", "rho2_num", "rho2_series",
               "product_num", "product_series", "err_bar")

    def format_csv(self, sep: str = ",") -> str:
        out = [sep.join(self.COLUMNS)]
        for r in self.rows:
            out.append(sep.join(
                f"{v:.12g}" for v in (
                    r.energy, r.rho1_num, r.rho1_series, r.rho2_num,
                    r.rho2_series, r.product_num, r.product_series, r.err_bar)
            ))
        return "\n".join(out) + "\n"


def _fit_power(energies, diffs) -> float:
    """Fit |diff| ~ C E^q; round-off-level differences report q = inf."""
    d = np.maximum(np.abs(np.asarray(diffs, dtype=float)), 1e-300)
    if np.all(d < 1e-12):
        return math.inf
    if len(d) < 2:
        return math.nan
    x = np.log(np.asarray(energies, dtype=float))
    y = np.log(d)
    slope = np.polyfit(x, y, 1)[0]
    return float(slope)


def series_vs_numeric_report(model, energies, horizon: int = 8,
                             tol_shoot: float = 1e-10,
                             tol_frame: float = 1e-11,
                             series_order: int | None = None) -> ReportTable:
    """Measure both axial orbits on the true flow and compare to the series.

    ``model`` is a ModelBundle.  Produces one row per energy plus fitted
    convergence orders q for |rho_num - rho_series| against E.
    """
    analysis = model.analysis(series_order=series_order)
    rows = []
    d1, d2 = [], []
    for e_val in energies:
        r1s = analysis.rho1.eval_float(e_val)
        r2s = analysis.rho2.eval_float(e_val)
        ps = analysis.product.eval_float(e_val)
        est = {}
        for axis, tag in ((1, "axis-1"), (2, "axis-2")):
            seed_w, seed_T = model.seed_orbit(e_val, axis)
            orbit = find_periodic_orbit(model.hamiltonian, e_val, seed_w,
                                        seed_T, tol_shoot=tol_shoot, tag=tag)
            est[axis] = rotation_number_numeric(model.hamiltonian, orbit,
                                                horizon=horizon,
                                                tol=tol_frame)
        r1n = est[1].value
        r2n = est[2].value
        rows.append(ReportRow(
            energy=e_val, rho1_num=r1n, rho1_series=r1s,
            rho2_num=r2n, rho2_series=r2s,
            product_num=(r1n - 1.0) * (r2n - 1.0), product_series=ps,
            err_bar=max(est[1].error, est[2].error),
        ))
        d1.append(r1n - r1s)
        d2.append(r2n - r2s)
    return ReportTable(rows=rows, fit_q1=_fit_power(energies, d1),
                       fit_q2=_fit_power(energies, d2), model=model.name)

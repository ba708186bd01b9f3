"""Batch front door: normalize, analyze, and numerically verify Hamiltonians.

Exit codes: 0 success, 2 bad input, 3 precondition violation, 4 internal
error (and, in CI mode, 5 for a tolerance breach).  Reports embed the tool
version, the gauge tag and every tolerance used, and exact-field output is
deterministic byte for byte for identical configurations.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

from . import __version__
from .scalars import FieldError, QuadExt
from .poly import PolynomialFormatError, read_polynomial, to_real, write_polynomial
from .resonance import Frequencies, resonance_pair
from .normalform import normalize
from . import hopf
from .models import MODEL_BUILDERS
from .numeric import series_vs_numeric_report

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PRECONDITION = 3
EXIT_INTERNAL = 4
EXIT_TOLERANCE = 5


class CliInputError(Exception):
    pass


def _scalar_str(x) -> str:
    if x is None:
        return None
    if isinstance(x, QuadExt):
        if x.b == 0:
            return str(x.a)
        return f"{x.a}{'+' if x.b >= 0 else ''}{x.b}*sqrt({x.d})"
    return str(x)


def _series_dict(s) -> dict | None:
    if s is None:
        return None
    return {
        "coefficients": [_scalar_str(c) for c in s.coeffs],
        "error_order": None if math.isinf(s.err_order) else int(s.err_order),
        "float": s.coeffs_float(),
    }


def _build_model(args):
    name = args.model
    if name not in MODEL_BUILDERS:
        raise CliInputError(
            f"unknown model {name!r}; choose from {sorted(MODEL_BUILDERS)}")
    if name == "isosceles":
        return MODEL_BUILDERS[name](Fraction(args.alpha), Fraction(args.varpi),
                                    order=max(args.order, 4))
    if name == "quadratic":
        return MODEL_BUILDERS[name](Fraction(args.alpha1), Fraction(args.alpha2),
                                    order=max(args.order, 4))
    return MODEL_BUILDERS[name](order=max(args.order, 6)
                                if name == "hill" else args.order)


def _load_input(args):
    """Either a model bundle or a raw polynomial from --input."""
    if args.model:
        return _build_model(args), None
    if not args.input:
        raise CliInputError("either --model or --input is required")
    try:
        with open(args.input, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliInputError(f"cannot read {args.input}: {exc}") from None
    try:
        poly = read_polynomial(text)
    except PolynomialFormatError as exc:
        raise CliInputError(f"{args.input}: {exc}") from None
    return None, poly


def _frequencies_of(poly):
    """Read alpha off the quadratic part of a diagonal Hamiltonian."""
    p = to_real(poly) if poly.chart == "complex" else poly
    a1 = p.coefficient((2, 0, 0, 0))
    a2 = p.coefficient((0, 2, 0, 0))
    if a1.is_zero() or a2.is_zero() or not a1.is_real() or not a2.is_real():
        raise CliInputError(
            "input polynomial has no diagonal quadratic part; supply a "
            "Hamiltonian of the form alpha1/2 (y1^2+x1^2) + ...")
    return Frequencies(a1.re + a1.re, a2.re + a2.re)


def _emit(args, payload: dict, text_lines: list[str]) -> None:
    if args.format == "json":
        out = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        out = "\n".join(text_lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


def _common_payload(args, model, alpha, res):
    return {
        "version": __version__,
        "model": model.name if model else None,
        "input": args.input,
        "alpha": [_scalar_str(a) for a in alpha],
        "resonance": res.label(),
        "N": args.order,
    }


def cmd_normalize(args) -> int:
    model, poly = _load_input(args)
    if model is not None:
        nf = model.normal_form(args.order)
        alpha, res = model.alpha, model.res
    else:
        alpha = _frequencies_of(poly)
        res = resonance_pair(tuple(alpha))
        nf = normalize(poly, args.order, alpha, res)
    payload = _common_payload(args, model, alpha, res)
    payload.update({
        "gauge": nf.gauge,
        "tolerances": {},
        "coefficients": {
            " ".join(map(str, e)): {
                "re": _scalar_str(c.re), "im": _scalar_str(c.im),
            }
            for e, c in sorted(nf.table.items())
        },
        "normal_form": write_polynomial(nf.h_n),
    })
    lines = [
        f"# bgnf {__version__} normalize",
        f"model: {payload['model'] or payload['input']}",
        f"alpha: {payload['alpha']}  resonance: {payload['resonance']}  "
        f"N: {args.order}  gauge: {nf.gauge}",
        "",
        write_polynomial(nf.h_n.truncate(args.order)).rstrip(),
    ]
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_analyze(args) -> int:
    model, poly = _load_input(args)
    if model is not None:
        if args.route == "rotate" and model.averaged_form is not None:
            nf = model.averaged_form
            ana = hopf.analyze(nf, nf.symmetry, args.series_order)
        else:
            ana = model.analysis(args.order, args.series_order)
        alpha, res = model.alpha, model.res
    else:
        alpha = _frequencies_of(poly)
        res = resonance_pair(tuple(alpha))
        nf = normalize(poly, args.order, alpha, res)
        ana = hopf.analyze(nf, None, args.series_order)
    payload = _common_payload(args, model, alpha, res)
    v = ana.verdict
    payload.update({
        "gauge": ana.nf.gauge,
        "nu": ana.nu,
        "Omega": {
            "nu1": _scalar_str(ana.omega_nu1),
            "nu2": _scalar_str(ana.omega_nu2),
            "nu": _scalar_str(ana.omega_nu),
        },
        "beta": {"beta1": _scalar_str(ana.beta1),
                 "beta2": _scalar_str(ana.beta2)},
        "orbits": {"gamma1": ana.exists_gamma1, "gamma2": ana.exists_gamma2},
        "verdict": {
            "theorem": v.theorem,
            "clause": v.clause,
            "satisfied": v.satisfied,
            "hypothesis_trace": v.hypothesis_trace,
        },
        "series": {
            "rho1": _series_dict(ana.rho1),
            "rho2": _series_dict(ana.rho2),
            "product": _series_dict(ana.product),
        },
        "tolerances": {},
    })
    lines = [
        f"# bgnf {__version__} analyze",
        f"model: {payload['model'] or payload['input']}",
        f"alpha: {payload['alpha']}  resonance: {payload['resonance']}  "
        f"N: {args.order}  gauge: {ana.nf.gauge}",
        f"nu: {ana.nu}",
        f"Omega_nu1: {_scalar_str(ana.omega_nu1)}   "
        f"Omega_nu2: {_scalar_str(ana.omega_nu2)}   "
        f"Omega_nu: {_scalar_str(ana.omega_nu)}",
        f"beta1: {_scalar_str(ana.beta1)}   beta2: {_scalar_str(ana.beta2)}",
        f"orbits: gamma1={ana.exists_gamma1} gamma2={ana.exists_gamma2}",
        f"rho1: {ana.rho1}",
        f"rho2: {ana.rho2}",
        f"twist product: {ana.product}",
        f"verdict: {v.describe()}",
    ]
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_verify(args) -> int:
    model, _poly = _load_input(args)
    if model is None:
        raise CliInputError("numeric verification needs --model")
    energies = [float(t) for t in args.energies.split(",") if t]
    if not energies:
        raise CliInputError("--energies needs a comma-separated list")
    table = series_vs_numeric_report(model, energies, horizon=args.horizon,
                                     tol_shoot=args.tol_shoot,
                                     tol_frame=args.tol_frame,
                                     series_order=args.series_order)
    payload = {
        "version": __version__,
        "model": model.name,
        "gauge": model.analysis(series_order=args.series_order).nf.gauge,
        "energies": energies,
        "horizon": args.horizon,
        "tolerances": {"shoot": args.tol_shoot, "frame": args.tol_frame},
        "columns": list(table.COLUMNS),
        "rows": [[r.energy, r.rho1_num, r.rho1_series, r.rho2_num,
                  r.rho2_series, r.product_num, r.product_series, r.err_bar]
                 for r in table.rows],
        "fit_q": {"rho1": table.fit_q1, "rho2": table.fit_q2},
    }
    lines = [f"# bgnf {__version__} verify: {model.name}",
             table.format_csv().rstrip(),
             f"# fitted q: rho1 {table.fit_q1:.3g}  rho2 {table.fit_q2:.3g}"]
    _emit(args, payload, lines)
    if args.ci:
        worst = max(max(abs(r.rho1_num - r.rho1_series),
                        abs(r.rho2_num - r.rho2_series))
                    for r in table.rows)
        if worst > args.ci_tol:
            sys.stderr.write(
                f"CI failure: |rho_num - rho_series| = {worst:.3e} "
                f"> {args.ci_tol:.3e}\n")
            return EXIT_TOLERANCE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="bgnf",
        description="Birkhoff-Gustavson normal forms and Hopf-link criteria",
    )
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--model", choices=sorted(MODEL_BUILDERS), default=None)
        sp.add_argument("--input", default=None,
                        help="polynomial file in the text format")
        sp.add_argument("--order", type=int, default=6)
        sp.add_argument("--series-order", type=int, default=None)
        sp.add_argument("--alpha", default="1", help="isosceles mass ratio")
        sp.add_argument("--varpi", default="1", help="isosceles angular momentum")
        sp.add_argument("--alpha1", default="1", help="quadratic model frequency")
        sp.add_argument("--alpha2", default="1", help="quadratic model frequency")
        sp.add_argument("--gauge", default="im-D", choices=["im-D"])
        sp.add_argument("--route", default="psi", choices=["psi", "rotate"])
        sp.add_argument("--format", default="text", choices=["text", "json"])
        sp.add_argument("--out", default=None)

    sp_n = sub.add_parser("normalize", help="compute the normal form")
    common(sp_n)
    sp_n.set_defaults(func=cmd_normalize)

    sp_a = sub.add_parser("analyze", help="run the Hopf-link decision procedure")
    common(sp_a)
    sp_a.set_defaults(func=cmd_analyze)

    sp_v = sub.add_parser("verify", help="numeric vs symbolic rotation numbers")
    common(sp_v)
    sp_v.add_argument("--energies", default="1e-3,2e-3,4e-3")
    sp_v.add_argument("--horizon", type=int, default=8)
    sp_v.add_argument("--tol-shoot", type=float, default=1e-10)
    sp_v.add_argument("--tol-frame", type=float, default=1e-12)
    sp_v.add_argument("--ci", action="store_true",
                      help="exit nonzero when |rho_num - rho_series| exceeds --ci-tol")
    sp_v.add_argument("--ci-tol", type=float, default=5e-4)
    sp_v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliInputError as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return EXIT_INPUT
    except (ValueError, FieldError) as exc:
        sys.stderr.write(f"precondition violated: {exc}\n")
        return EXIT_PRECONDITION
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        sys.stderr.write(f"internal error: {type(exc).__name__}: {exc}\n")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Exit codes: 0 when the requested check passes, 1 when a violation was
found, 2 on usage or input errors.
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from . import linalg as la
from . import opmonotone as om
from . import verify
from .errors import QDPError
from .jsonio import load_json, pick_from_json
from .pick import evaluate_pick, sqrt_pick_spec
from .report import VerificationReport, canonical_json

COMPLEX_GRAMMAR = """complex numbers: a, bi, a+bi, a-bi, i, -i (j is accepted for i);
a and b are decimal literals, e.g. 4, 2+3i, -0.5-1e-3i"""

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_REAL_RE = re.compile(rf"[+-]?{_NUM}")
_IMAG_RE = re.compile(rf"(?P<im>[+-]?(?:{_NUM})?)[ij]")
_FULL_RE = re.compile(rf"(?P<re>[+-]?{_NUM})(?P<im>[+-](?:{_NUM})?)[ij]")


def _imag_part(text: str) -> float:
    if text in ("", "+"):
        return 1.0
    if text == "-":
        return -1.0
    return float(text)


def parse_complex(text: str) -> complex:
    s = text.strip()
    if _REAL_RE.fullmatch(s):
        return complex(float(s), 0.0)
    m = _IMAG_RE.fullmatch(s)
    if m:
        return complex(0.0, _imag_part(m.group("im")))
    m = _FULL_RE.fullmatch(s)
    if m:
        return complex(float(m.group("re")), _imag_part(m.group("im")))
    raise argparse.ArgumentTypeError(f"invalid complex number {text!r}")


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals or any(v < 1 for v in vals):
        raise argparse.ArgumentTypeError(f"dimensions must be positive integers, got {text!r}")
    return vals


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _seed(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned integer, got {text!r}")
    return v


def _tol(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a tolerance, got {text!r}") from None
    if not v >= 0 or v == float("inf"):
        raise argparse.ArgumentTypeError(f"tolerance must be finite and nonnegative, got {text!r}")
    return v


def _povm_range(text: str) -> tuple[int, int]:
    m = re.fullmatch(r"(\d+)(?:-(\d+))?", text.strip())
    if not m:
        raise argparse.ArgumentTypeError(f"expected K or LO-HI, got {text!r}")
    lo = int(m.group(1))
    hi = int(m.group(2)) if m.group(2) else lo
    if lo < 2 or hi < lo:
        raise argparse.ArgumentTypeError(f"POVM outcome range must satisfy 2 <= LO <= HI, got {text!r}")
    return lo, hi


def _function(text: str) -> om.ScalarFunction:
    if text.startswith("pick:"):
        path = text[len("pick:"):]
        try:
            spec = pick_from_json(load_json(path))
        except (OSError, json.JSONDecodeError, QDPError) as exc:
            raise argparse.ArgumentTypeError(f"cannot load Pick spec {path!r}: {exc}") from None
        return om.from_pick(spec, label=f"pick:{Path(path).name}")
    try:
        return om.parse_function(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _default_seed() -> int:
    env = os.environ.get("QDP_SEED")
    if env is None:
        return 0
    return _seed(env)


def build_parser(default_seed: int = 0) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdp", description="Numerical checks of the quantum data processing inequality chain.",
        epilog="The seed falls back to the QDP_SEED environment variable, then 0.",
        allow_abbrev=False)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def suite(name: str, help_: str, trials: int, dims: Optional[str]):
        p = sub.add_parser(name, help=help_, allow_abbrev=False)
        p.add_argument("--seed", type=_seed, default=default_seed)
        p.add_argument("--trials", type=_positive_int, default=trials)
        if dims is not None:
            p.add_argument("--dims", type=_int_list, default=_int_list(dims),
                           help=f"comma-separated dimensions (default {dims})")
        p.add_argument("--output", "-o", default="-", help="report path, '-' for stdout")
        p.add_argument("--units", choices=("nats", "bits"), default="nats")
        p.add_argument("--workers", type=_positive_int, default=1)
        return p

    p = suite("verify-dpi", "data processing inequality I(A;D.W) <= I(A;W)", 500, "3,3,2")
    p.add_argument("--tol-dpi", type=_tol, default=verify.TOL_DPI)
    p = suite("verify-divergence", "monotonicity of the divergence under channels", 1000, "2,3,4")
    p.add_argument("--tol-dpi", type=_tol, default=verify.TOL_DPI)
    p = suite("verify-uhlmann", "Uhlmann's lemma on a t-grid", 300, "2,3")
    p.add_argument("--tol-dpi", type=_tol, default=verify.TOL_DPI)
    p.add_argument("--t-grid", type=_positive_int, default=11)
    p.add_argument("--x-count", type=_positive_int, default=5)
    p = suite("verify-holevo", "Holevo bound: measurement after the channel", 300, "2,3,4")
    p.add_argument("--tol-dpi", type=_tol, default=verify.TOL_DPI)
    p.add_argument("--povm-count", type=_povm_range, default=(2, 4), help="K or LO-HI outcomes")

    for name, help_, fn_default in (
            ("verify-monotone", "operator monotonicity of a scalar function", "pow:0.5"),
            ("verify-concave", "operator concavity f(a*xa) >= a*f(x)a", "pow:0.5"),
            ("verify-jensen", "Jensen's operator inequality", "pow:0.5")):
        p = suite(name, help_, 500 if name == "verify-monotone" else 300, None)
        p.add_argument("--function", type=_function, default=fn_default,
                       help="pow:<mu>, neg_inv, affine:<a>,<b>, log, or pick:<spec.json>")
        dims = p.add_mutually_exclusive_group()
        dims.add_argument("--dims", type=_int_list, default=[2, 3, 4, 5, 6] if name == "verify-monotone" else [2, 3, 4, 5])
        dims.add_argument("--dim", type=_positive_int, dest="dims_single")
        p.add_argument("--tol-psd", type=_tol, default=la.TOL_PSD)
        if name == "verify-concave":
            p.add_argument("--square-only", action="store_true", help="no rectangular contractions")
        if name == "verify-jensen":
            p.add_argument("--k", type=_positive_int, default=3, help="number of terms")

    p = sub.add_parser("demo-counterexample", help="recompute the x^2 counterexample", allow_abbrev=False)
    p.add_argument("--output", "-o", default="-")

    p = sub.add_parser("eval-pick", help="evaluate a Pick function from its representation",
                       epilog=COMPLEX_GRAMMAR, allow_abbrev=False)
    p.add_argument("--spec", default="sqrt", help="'sqrt' or a Pick spec JSON file")
    p.add_argument("--z", type=parse_complex, required=True)
    p.add_argument("--quad-tol", type=_tol, default=1e-6)
    p.add_argument("--output", "-o", default="-")

    sub.add_parser("info", help="print version, defaults and the function registry", allow_abbrev=False)
    return parser


def _write(text: str, target: str) -> None:
    if target == "-":
        sys.stdout.write(text)
    else:
        Path(target).write_text(text, encoding="utf-8")


def _merge(reports: Sequence[VerificationReport], check: str, seed: int, config: dict) -> VerificationReport:
    trials = sum(r.trials for r in reports)
    violations = sum(r.violations for r in reports)
    worst = max(reports, key=lambda r: r.max_violation)
    witness = None
    for r in reports:
        if r.worst_witness is not None and r is worst:
            witness = {"dim": r.config["dims"][0], **r.worst_witness}
    return VerificationReport(check, trials, violations, worst.max_violation, seed, config, witness)


def _operator_suite(args) -> VerificationReport:
    f = args.function
    dims = [args.dims_single] if args.dims_single else args.dims
    reports = []
    for n in dims:
        if args.command == "verify-monotone":
            reports.append(om.monotonicity_test(f, n, args.trials, args.seed, args.tol_psd,
                                                workers=args.workers).to_report())
        elif args.command == "verify-concave":
            reports.append(om.concavity_test(f, n, args.trials, args.seed, args.tol_psd,
                                             rectangular=not args.square_only, workers=args.workers))
        else:
            reports.append(om.jensen_test(f, n, args.k, args.trials, args.seed, args.tol_psd,
                                          workers=args.workers))
    config = {"function": f.label, "dims": dims, "tol_psd": args.tol_psd,
              "trials_per_dim": args.trials}
    if args.command == "verify-concave":
        config["rectangular"] = not args.square_only
    if args.command == "verify-jensen":
        config["k_terms"] = args.k
    check = {"verify-monotone": "operator_monotone", "verify-concave": "operator_concave",
             "verify-jensen": "jensen"}[args.command]
    return _merge(reports, check, args.seed, config)


def _run_suite(args) -> VerificationReport:
    cmd = args.command
    if cmd == "verify-dpi":
        if len(args.dims) != 3:
            raise QDPError(f"--dims for verify-dpi needs three dimensions d1,d2,d3, got {args.dims}")
        return verify.check_dpi(args.dims, args.trials, args.seed, args.tol_dpi, workers=args.workers)
    if cmd == "verify-divergence":
        return verify.check_divergence_monotonicity(args.dims, args.trials, args.seed, args.tol_dpi,
                                                    workers=args.workers)
    if cmd == "verify-uhlmann":
        return verify.check_uhlmann_lemma(args.dims, args.t_grid, args.trials, args.seed,
                                          x_count=args.x_count, tol_dpi=args.tol_dpi, workers=args.workers)
    if cmd == "verify-holevo":
        return verify.check_holevo(args.dims, args.povm_count, args.trials, args.seed, args.tol_dpi,
                                   workers=args.workers)
    return _operator_suite(args)


def _info() -> dict:
    return {
        "package": "qdpi",
        "version": __version__,
        "units": "nats (use --units bits to convert reports)",
        "defaults": {"tol_eig": la.TOL_EIG, "tol_herm": la.TOL_HERM, "tol_psd": la.TOL_PSD,
                     "tol_dom": la.TOL_DOM, "tol_dpi": verify.TOL_DPI, "quad_tol": 1e-6},
        "functions": ["pow:<mu>", "neg_inv", "affine:<a>,<b>", "log", "pick:<spec.json>"],
        "commands": ["verify-dpi", "verify-divergence", "verify-uhlmann", "verify-holevo",
                     "verify-monotone", "verify-concave", "verify-jensen", "demo-counterexample",
                     "eval-pick", "info"],
    }


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        default_seed = _default_seed()
    except argparse.ArgumentTypeError as exc:
        print(f"qdp: error: QDP_SEED: {exc}", file=sys.stderr)
        return 2
    parser = build_parser(default_seed)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else 2

    try:
        if args.command == "info":
            _write(canonical_json(_info()) + "\n", "-")
            return 0
        if args.command == "demo-counterexample":
            _write(canonical_json(om.square_counterexample()) + "\n", args.output)
            return 0
        if args.command == "eval-pick":
            if args.spec == "sqrt":
                spec = sqrt_pick_spec()
            else:
                spec = pick_from_json(load_json(args.spec))
            value = evaluate_pick(spec, args.z, args.quad_tol)
            out = {"z": [args.z.real, args.z.imag], "value": [value.real, value.imag]}
            _write(canonical_json(out) + "\n", args.output)
            return 0
        report = _run_suite(args)
        _write(report.in_units(args.units).to_json(), args.output)
        return 0 if report.passed else 1
    except (QDPError, OSError, json.JSONDecodeError) as exc:
        where = getattr(args, "spec", None) if isinstance(exc, (OSError, json.JSONDecodeError)) else None
        prefix = f"{where}: " if where else ""
        print(f"qdp: error: {prefix}{exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

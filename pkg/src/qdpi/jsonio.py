"""JSON formats for matrices, states, channels and Pick function specs.

Matrix:  ``{"rows": n, "cols": m, "data": [[re, im], ...]}`` (row-major)
Channel: ``{"dim_in": n, "dim_out": m, "kraus": [<matrix>, ...]}``
Pick:    ``{"alpha": a, "beta": b, "atoms": [{"delta": d, "gamma": g}],
           "density": {"lo": x0 | "-inf", "hi": x1, "kind": ...} | null,
           "excluded": [a, b] | null}``
"""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

from .channels import TOL_TP, KrausChannel, tp_defect
from .errors import InvalidChannel, InvalidPickSpec
from .linalg import matrix_from_json, matrix_to_json
from .pick import Atom, PickFunctionSpec, sqrt_neg_over_pi, table_density
from .states import DensityOperator


def state_from_json(obj: Any):
    return DensityOperator(matrix_from_json(obj))


def channel_to_json(ch) -> dict:
    return {"dim_in": ch.dim_in, "dim_out": ch.dim_out, "kraus": [matrix_to_json(k) for k in ch.kraus_ops]}


def channel_from_json(obj: Any):
    """Parse and re-validate a channel; the error reports the trace-preservation defect."""
    if not isinstance(obj, dict) or not isinstance(obj.get("kraus"), list) or not obj["kraus"]:
        raise InvalidChannel("channel JSON needs a nonempty 'kraus' list")
    ops = [matrix_from_json(k) for k in obj["kraus"]]
    dim_in, dim_out = obj.get("dim_in"), obj.get("dim_out")
    for i, k in enumerate(ops):
        if k.shape != (dim_out, dim_in):
            raise InvalidChannel(f"Kraus operator {i} has shape {k.shape}, expected ({dim_out}, {dim_in})")
    defect = tp_defect(ops)
    if defect > TOL_TP:
        raise InvalidChannel(f"not trace preserving: Frobenius defect of sum K^dagger K - 1 is {defect:.3e}")
    return KrausChannel(ops)


def _bound(v: Any, name: str) -> float:
    if isinstance(v, str):
        if v.replace("−", "-") in ("-inf", "inf", "+inf"):
            return float(v.replace("−", "-"))
        raise InvalidPickSpec(f"density bound {name} must be a number or '-inf'/'inf'")
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return float(v)
    raise InvalidPickSpec(f"density bound {name} must be a number, got {v!r}")


def pick_from_json(obj: Any):
    if not isinstance(obj, dict):
        raise InvalidPickSpec("Pick spec JSON must be an object")
    atoms = []
    for a in obj.get("atoms") or []:
        if not isinstance(a, dict) or not {"delta", "gamma"} <= a.keys():
            raise InvalidPickSpec(f"atom {a!r} needs 'delta' and 'gamma'")
        atoms.append(Atom(float(a["delta"]), float(a["gamma"])))
    density = None
    d = obj.get("density")
    if d is not None:
        kind = d.get("kind")
        if kind == "sqrt_neg_over_pi":
            density = sqrt_neg_over_pi(_bound(d.get("lo", "-inf"), "lo"), _bound(d.get("hi", 0.0), "hi"))
        elif kind == "table":
            density = table_density(d.get("xs", []), d.get("ws", []))
        else:
            raise InvalidPickSpec(f"unknown density kind {kind!r}")
    excluded = obj.get("excluded")
    if excluded is not None:
        if not (isinstance(excluded, list) and len(excluded) == 2):
            raise InvalidPickSpec("excluded must be [a, b] or null")
        excluded = (_bound(excluded[0], "excluded[0]"), _bound(excluded[1], "excluded[1]"))
    return PickFunctionSpec(float(obj.get("alpha", 0.0)), float(obj.get("beta", 0.0)),
                            tuple(atoms), density, excluded)


def pick_to_json(spec) -> dict:
    def bound(x):
        return x if math.isfinite(x) else ("-inf" if x < 0 else "inf")

    density = None
    if spec.density is not None:
        d = spec.density
        density = {"lo": bound(d.lo), "hi": bound(d.hi), "kind": d.kind, **d.params}
    return {
        "alpha": spec.alpha,
        "beta": spec.beta,
        "atoms": [{"delta": a.delta, "gamma": a.gamma} for a in spec.atoms],
        "density": density,
        "excluded": None if spec.excluded is None else [bound(spec.excluded[0]), bound(spec.excluded[1])],
    }


def load_json(path: str | Path) -> Any:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)

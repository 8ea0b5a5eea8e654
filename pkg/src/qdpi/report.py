"""Verification reports, canonical JSON output and seeded trial execution."""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Iterable, Optional

import numpy as np

LN2 = math.log(2.0)


def format_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if x == 0.0:
        return "0.0"
    s = format(x, ".17g")
    if "e" not in s and "." not in s:
        s += ".0"
    return s


def canonical_json(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """Serialize with stable key order and 17-significant-digit floats.

    Dict keys keep insertion order, so callers control the layout.
    """
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {canonical_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(canonical_json(v) for v in obj) + "]"
        items = [pad + canonical_json(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


@dataclass(frozen=True)
class VerificationReport:
    """Aggregated outcome of a randomized inequality suite.

    ``max_violation`` is the magnitude of the most negative slack observed
    (0 when every slack was nonnegative). ``entropic`` names the fields that
    carry nats and are rescaled by :meth:`in_units`.
    """

    check: str
    trials: int
    violations: int
    max_violation: float
    seed: int
    config: dict = field(default_factory=dict)
    worst_witness: Optional[dict] = None
    entropic: tuple = ()

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def in_units(self, units: str) -> "VerificationReport":
        if units == "nats":
            return self
        if units != "bits":
            raise ValueError(f"unknown units {units!r}")
        cfg = dict(self.config)
        mv = self.max_violation
        for key in self.entropic:
            if key == "max_violation":
                mv = mv / LN2
            elif key in cfg and isinstance(cfg[key], float):
                cfg[key] = cfg[key] / LN2
        cfg["units"] = "bits"
        return replace(self, max_violation=mv, config=cfg)

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "trials": self.trials,
            "violations": self.violations,
            "max_violation": float(self.max_violation),
            "seed": self.seed,
            "config": {k: self.config[k] for k in sorted(self.config)},
            "pass": self.passed,
            "worst_witness": self.worst_witness,
        }

    def to_json(self) -> str:
        return canonical_json(self.to_dict()) + "\n"

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} {self.check}: {self.violations}/{self.trials} violations, "
                f"max violation {self.max_violation:.3e}")


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Generator for trial ``index`` of a suite; independent of execution order."""
    return np.random.default_rng([int(seed), int(index)])


def run_trials(trial: Callable[[int, np.random.Generator], Any], trials: int, seed: int,
               workers: int = 1) -> list:
    """Run ``trial(index, rng)`` for each index; results come back in index order."""
    def job(i: int):
        return trial(i, trial_rng(seed, i))

    if workers <= 1:
        return [job(i) for i in range(trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(job, range(trials)))


@dataclass
class SlackTally:
    """Associative accumulator of per-trial slacks (order of adds does not matter
    for the totals; ties for the worst witness go to the lowest trial index)."""

    tol: float
    trials: int = 0
    violations: int = 0
    min_slack: float = math.inf
    worst_index: int = -1
    worst_witness: Optional[dict] = None

    def add(self, index: int, slack: float, ok: Optional[bool] = None,
            witness: Optional[Callable[[], dict]] = None) -> None:
        self.trials += 1
        bad = (slack < -self.tol) if ok is None else not ok
        if bad:
            self.violations += 1
        if slack < self.min_slack or (slack == self.min_slack and index < self.worst_index):
            self.min_slack = slack
            self.worst_index = index
            self.worst_witness = witness() if witness is not None else None

    @property
    def max_violation(self) -> float:
        return max(0.0, -self.min_slack) if math.isfinite(self.min_slack) else 0.0

    def report(self, check: str, seed: int, config: dict, entropic: Iterable[str] = ()) -> VerificationReport:
        cfg = dict(config)
        cfg.setdefault("tol", self.tol)
        cfg["min_slack"] = float(self.min_slack) if math.isfinite(self.min_slack) else 0.0
        witness = None
        if self.worst_witness is not None and self.min_slack < 0:
            witness = {"trial": self.worst_index, **self.worst_witness}
        return VerificationReport(check, self.trials, self.violations, self.max_violation, int(seed),
                                  cfg, witness, tuple(entropic))

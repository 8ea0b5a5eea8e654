"""Randomized certification of operator monotonicity, operator concavity and
Jensen's operator inequality.

Each tester samples matrix instances from a seeded generator (one derived
generator per trial) and records the smallest eigenvalue of the difference
that the inequality says is positive semidefinite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import linalg as la
from .jsonio import matrix_to_json
from .pick import PickFunctionSpec, pick_on_reals
from .report import SlackTally, VerificationReport, run_trials

_WINDOW = 10.0


@dataclass(frozen=True)
class ScalarFunction:
    """A vectorized real function together with its domain interval."""

    label: str
    fn: Callable[[np.ndarray], np.ndarray] = field(compare=False)
    domain: la.Domain = la.REALS

    def __call__(self, x):
        return self.fn(x)

    def of(self, a) -> np.ndarray:
        return la.matrix_function(self.fn, a, self.domain)

    def sampling_window(self, margin: float = 0.01) -> tuple[float, float]:
        """Finite sub-interval of the domain used for random spectra.

        Unbounded ends are cut at distance 10 from the other end (or from 0),
        then 1% of the window length is trimmed on both sides.
        """
        lo, hi = self.domain.lo, self.domain.hi
        if not math.isfinite(lo) and not math.isfinite(hi):
            lo, hi = -_WINDOW, _WINDOW
        elif not math.isfinite(lo):
            lo = hi - _WINDOW
        elif not math.isfinite(hi):
            hi = lo + _WINDOW
        pad = margin * (hi - lo)
        return lo + pad, hi - pad


def power(mu: float) -> ScalarFunction:
    mu = float(mu)
    return ScalarFunction(f"pow:{mu:g}", lambda x: np.power(x, mu), la.NONNEGATIVE)


def neg_inv() -> ScalarFunction:
    return ScalarFunction("neg_inv", lambda x: -1.0 / x, la.POSITIVE)


def affine(alpha: float, beta: float) -> ScalarFunction:
    return ScalarFunction(f"affine:{alpha:g},{beta:g}", lambda x: alpha * x + beta, la.REALS)


def log() -> ScalarFunction:
    return ScalarFunction("log", np.log, la.POSITIVE)


def from_pick(spec: PickFunctionSpec, label: str = "pick") -> ScalarFunction:
    """Real restriction of a Pick function to its excluded interval."""
    if spec.excluded is None:
        raise ValueError("Pick spec needs an excluded interval to define a real function")
    a, b = spec.excluded
    return ScalarFunction(label, pick_on_reals(spec), la.Domain(a, b, False, False))


def parse_function(text: str) -> ScalarFunction:
    """Parse the registry syntax ``pow:<mu>``, ``neg_inv``, ``affine:<a>,<b>``, ``log``."""
    name, _, arg = text.partition(":")
    if name == "pow" and arg:
        return power(float(arg))
    if name == "neg_inv" and not arg:
        return neg_inv()
    if name == "log" and not arg:
        return log()
    if name == "affine" and arg:
        parts = arg.split(",")
        if len(parts) == 2:
            alpha, beta = float(parts[0]), float(parts[1])
            if alpha <= 0:
                raise ValueError("affine slope must be positive")
            return affine(alpha, beta)
    raise ValueError(f"unknown function {text!r}; expected pow:<mu>, neg_inv, affine:<a>,<b> or log")


@dataclass(frozen=True)
class MonotonicityVerdict:
    label: str
    order: int
    trials: int
    violations: int
    max_violation: float
    witness: Optional[tuple] = None
    seed: int = 0
    tol_psd: float = la.TOL_PSD

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_report(self, check: str = "operator_monotone") -> VerificationReport:
        witness = None
        if self.witness is not None:
            b, c = self.witness
            witness = {"B": matrix_to_json(b), "C": matrix_to_json(c)}
        cfg = {"function": self.label, "dims": [self.order], "tol_psd": self.tol_psd}
        return VerificationReport(check, self.trials, self.violations, self.max_violation,
                                  self.seed, cfg, witness)


def random_hermitian_in(lo: float, hi: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Random Hermitian matrix with eigenvalues uniform in ``[lo, hi]``."""
    lam = rng.uniform(lo, hi, n)
    u = la.random_unitary(n, rng)
    m = (u * lam) @ la.adjoint(u)
    return 0.5 * (m + la.adjoint(m))


def random_psd(n: int, rng: np.random.Generator, rank: Optional[int] = None) -> np.ndarray:
    g = la.random_complex((n, n if rank is None else rank), rng)
    m = g @ la.adjoint(g)
    return 0.5 * (m + la.adjoint(m))


def monotonicity_gap(f: ScalarFunction, b, c) -> float:
    """Smallest eigenvalue of ``f(c) - f(b)``."""
    return la.min_eigenvalue(f.of(c) - f.of(b))


def sample_ordered_pair(f: ScalarFunction, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """``B`` with spectrum in the sampling window and ``C = B + P`` for PSD ``P``
    scaled so the spectrum of ``C`` stays inside the window."""
    lo, hi = f.sampling_window()
    b = random_hermitian_in(lo, hi, n, rng)
    p = random_psd(n, rng, rank=int(rng.integers(1, n + 1)))
    room = hi - la.eigvalsh(b)[-1]
    p *= rng.uniform(0.0, 1.0) * room / max(la.operator_norm(p), 1e-300)
    c = b + p
    return b, 0.5 * (c + la.adjoint(c))


def monotonicity_test(f: ScalarFunction, n: int, trials: int, seed: int = 0,
                      tol_psd: float = la.TOL_PSD, inject: Sequence[tuple] = (),
                      workers: int = 1) -> MonotonicityVerdict:
    """Check ``B <= C  =>  f(B) <= f(C)`` on random ordered pairs of order ``n``.

    Pairs in ``inject`` are evaluated as given (their premise is not
    re-imposed) and counted as extra trials ahead of the random ones.
    """
    pairs = [(la.as_matrix(b), la.as_matrix(c)) for b, c in inject]

    def trial(i, rng):
        b, c = pairs[i] if i < len(pairs) else sample_ordered_pair(f, n, rng)
        return monotonicity_gap(f, b, c), b, c

    tally = SlackTally(tol_psd)
    worst = None
    for i, (gap, b, c) in enumerate(run_trials(trial, len(pairs) + trials, seed, workers)):
        before = tally.min_slack
        tally.add(i, gap)
        if tally.min_slack < before:
            worst = (b, c)
    witness = worst if tally.violations else None
    return MonotonicityVerdict(f.label, n, tally.trials, tally.violations, tally.max_violation,
                               witness, seed, tol_psd)


def concavity_gap(f: ScalarFunction, x, a) -> float:
    """Smallest eigenvalue of ``f(a^dagger x a) - a^dagger f(x) a``."""
    a = la.as_matrix(a)
    ad = la.adjoint(a)
    lhs = f.of(0.5 * (ad @ x @ a + la.adjoint(ad @ x @ a)))
    rhs = ad @ f.of(x) @ a
    return la.min_eigenvalue(lhs - 0.5 * (rhs + la.adjoint(rhs)))


def random_contraction(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    a = la.random_complex((rows, cols), rng)
    return a * (rng.uniform(0.0, 1.0) / la.operator_norm(a))


def _psd_in_window(f: ScalarFunction, n: int, rng: np.random.Generator) -> np.ndarray:
    """PSD matrix with spectrum uniform in the sampling window of ``f`` intersected with [0, inf)."""
    lo, hi = f.sampling_window()
    return random_hermitian_in(max(lo, 0.0), hi, n, rng)


def concavity_test(f: ScalarFunction, n: int, trials: int, seed: int = 0,
                   tol_psd: float = la.TOL_PSD, rectangular: bool = True,
                   workers: int = 1) -> VerificationReport:
    """Check ``f(a^dagger x a) >= a^dagger f(x) a`` for PSD ``x`` and contractions ``a``.

    With ``rectangular`` the contraction maps a space of dimension n-1, n or
    n+1 into the n-dimensional space carrying ``x``.
    """
    def trial(i, rng):
        x = _psd_in_window(f, n, rng)
        m = int(rng.integers(max(1, n - 1), n + 2)) if rectangular else n
        a = random_contraction(n, m, rng)
        return concavity_gap(f, x, a), x, a

    tally = SlackTally(tol_psd)
    for i, (gap, x, a) in enumerate(run_trials(trial, trials, seed, workers)):
        tally.add(i, gap, witness=lambda x=x, a=a: {"x": matrix_to_json(x), "a": matrix_to_json(a)})
    cfg = {"function": f.label, "dims": [n], "rectangular": rectangular, "tol_psd": tol_psd}
    return tally.report("operator_concave", seed, cfg)


def jensen_gap(f: ScalarFunction, xs: Sequence, as_: Sequence) -> float:
    """Smallest eigenvalue of ``f(sum a_i^dagger x_i a_i) - sum a_i^dagger f(x_i) a_i``."""
    inner = sum(la.adjoint(a) @ x @ a for x, a in zip(xs, as_))
    outer = sum(la.adjoint(a) @ f.of(x) @ a for x, a in zip(xs, as_))
    lhs = f.of(0.5 * (inner + la.adjoint(inner)))
    return la.min_eigenvalue(lhs - 0.5 * (outer + la.adjoint(outer)))


def random_jensen_family(n: int, k: int, rng: np.random.Generator) -> list[np.ndarray]:
    """``k`` matrices scaled so that ``sum a_i^dagger a_i <= r * 1`` with random ``r <= 1``."""
    as_ = [la.random_complex((n, n), rng) for _ in range(k)]
    total = sum(la.adjoint(a) @ a for a in as_)
    s = la.operator_norm(total)
    factor = math.sqrt(rng.uniform(0.0, 1.0) / s)
    return [a * factor for a in as_]


def jensen_test(f: ScalarFunction, n: int, k: int, trials: int, seed: int = 0,
                tol_psd: float = la.TOL_PSD, workers: int = 1) -> VerificationReport:
    """Check Jensen's operator inequality for ``k``-term families."""
    def trial(i, rng):
        xs = [_psd_in_window(f, n, rng) for _ in range(k)]
        as_ = random_jensen_family(n, k, rng)
        return jensen_gap(f, xs, as_), xs, as_

    tally = SlackTally(tol_psd)
    for i, (gap, xs, as_) in enumerate(run_trials(trial, trials, seed, workers)):
        tally.add(i, gap, witness=lambda xs=xs, as_=as_: {
            "x": [matrix_to_json(x) for x in xs], "a": [matrix_to_json(a) for a in as_]})
    cfg = {"function": f.label, "dims": [n], "k_terms": k, "tol_psd": tol_psd}
    return tally.report("jensen", seed, cfg)


# A 2x2 pair whose squares are not ordered.
COUNTEREXAMPLE_B = np.array([[3.0, 1.0], [1.0, 3.0]], dtype=np.complex128)
COUNTEREXAMPLE_C = np.array([[3.1, 0.0], [0.0, 3.1]], dtype=np.complex128)


def square_counterexample() -> dict:
    """Recompute every ordering fact about the printed ``x^2`` counterexample.

    ``B = [[2,2],[2,2]] + [[1,-1],[-1,1]] = [[3,1],[1,3]]`` and
    ``C = 3.1 * 1``. The squares are ``[[10,6],[6,10]]`` and ``9.61 * 1``.
    """
    b, c = COUNTEREXAMPLE_B, COUNTEREXAMPLE_C
    parts = (np.array([[2.0, 2.0], [2.0, 2.0]]), np.array([[1.0, -1.0], [-1.0, 1.0]]))
    sq = power(2.0)
    b2, c2 = sq.of(b), sq.of(c)
    premise_eigs = la.eigvalsh(c - b)
    conclusion_eigs = la.eigvalsh(c2 - b2)
    return {
        "B_parts": [matrix_to_json(p) for p in parts],
        "B": matrix_to_json(b),
        "C": matrix_to_json(c),
        "B_squared": matrix_to_json(b2),
        "C_squared": matrix_to_json(c2),
        "premise_B_le_C": bool(la.loewner_le(b, c)),
        "premise_eigenvalues_C_minus_B": [float(v) for v in premise_eigs],
        "conclusion_B2_le_C2": bool(la.loewner_le(b2, c2)),
        "conclusion_eigenvalues_C2_minus_B2": [float(v) for v in conclusion_eigs],
    }

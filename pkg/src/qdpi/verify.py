"""Randomized verification suites for the monotonicity chain

    Uhlmann's lemma -> divergence monotonicity -> data processing -> Holevo bound.

Every suite draws each trial from its own generator derived from
``(seed, trial_index)`` and returns a :class:`~qdpi.report.VerificationReport`.
Slacks are "right-hand side minus left-hand side", so a negative slack
beyond the tolerance is a violation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import channels as chn
from . import linalg as la
from .channels import KrausChannel
from .errors import DimensionMismatch, SingularReference
from .jsonio import channel_to_json
from .report import SlackTally, VerificationReport, run_trials
from .states import DensityOperator, as_state, random_density, relative_entropy, von_neumann_entropy

TOL_DPI = 1e-8
TOL_ROUTE = 1e-8
TOL_EDGE = 1e-9
TOL_JOINT = 1e-10
POSITIVITY_FLOOR = 1e-6


@dataclass(frozen=True)
class JointState:
    """Classical-quantum state ``sum_i l_i |a_i><a_i| (x) W(|a_i><a_i|)``."""

    state: DensityOperator
    marginal_a: DensityOperator
    marginal_b: DensityOperator
    basis: np.ndarray
    weights: np.ndarray

    @property
    def dims(self) -> tuple[int, int]:
        return self.marginal_a.dim, self.marginal_b.dim

    def marginal_defect(self) -> float:
        m = self.state.matrix
        da = np.abs(la.partial_trace(m, self.dims, 1) - self.marginal_a.matrix).max()
        db = np.abs(la.partial_trace(m, self.dims, 0) - self.marginal_b.matrix).max()
        return float(max(da, db))


def random_eigenbasis(a, rng: np.random.Generator, tol: float = 1e-9) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and an eigenbasis of ``a`` rotated randomly inside each
    degenerate eigenspace (eigenvalues within ``tol`` are grouped)."""
    e = la.eigh(np.asarray(a))
    lam, u = e.eigenvalues, e.eigenvectors.copy()
    start = 0
    for stop in range(1, len(lam) + 1):
        if stop == len(lam) or lam[stop] - lam[stop - 1] > tol:
            if stop - start > 1:
                u[:, start:stop] = u[:, start:stop] @ la.random_unitary(stop - start, rng)
            start = stop
    return lam, u


def joint_state(a, w: KrausChannel, basis: Optional[tuple] = None) -> JointState:
    """Build the joint input/output state of ``w`` fed with ``a``.

    ``basis`` may supply ``(eigenvalues, eigenvectors)`` of ``a``; by default
    the Jacobi eigenbasis is used.
    """
    a = as_state(a)
    if w.dim_in != a.dim:
        raise DimensionMismatch(f"channel input dim {w.dim_in} != state dim {a.dim}")
    if basis is None:
        e = a.eig()
        lam, u = e.eigenvalues, e.eigenvectors
    else:
        lam, u = basis
    lam = np.clip(lam, 0.0, None)
    da, db = a.dim, w.dim_out
    m = np.zeros((da * db, da * db), dtype=np.complex128)
    for li, v in zip(lam, u.T):
        if li == 0.0:
            continue
        p = np.outer(v, v.conj())
        m += li * np.kron(p, chn.apply(w, p))
    out_b = chn.apply(w, a.matrix)
    return JointState(DensityOperator(0.5 * (m + la.adjoint(m))), a,
                      DensityOperator(0.5 * (out_b + la.adjoint(out_b))), u, lam)


def mutual_information_from_joint(j: JointState) -> float:
    """``H(A) + H(B) - H(A,B)``."""
    return (von_neumann_entropy(j.marginal_a.matrix) + von_neumann_entropy(j.marginal_b.matrix)
            - von_neumann_entropy(j.state.matrix))


def mutual_information_divergence(j: JointState) -> float:
    """``D((A,B) || A (x) B)``."""
    return relative_entropy(j.state.matrix, np.kron(j.marginal_a.matrix, j.marginal_b.matrix))


def mutual_information(a, w: KrausChannel) -> float:
    """Mutual information ``I(A; W)`` in nats via the entropy formula."""
    return mutual_information_from_joint(joint_state(a, w))


def mutual_information_routes(a, w: KrausChannel) -> tuple[float, float]:
    """Entropy-formula and divergence-formula values of ``I(A; W)``."""
    j = joint_state(a, w)
    return mutual_information_from_joint(j), mutual_information_divergence(j)


def eigenbasis_spread(a, w: KrausChannel, rng: np.random.Generator) -> float:
    """``|I_1 - I_2|`` for two random eigenbasis choices of ``a``.

    Zero whenever ``a`` has a simple spectrum; for degenerate ``a`` the joint
    state, and with it the mutual information, can depend on the choice.
    """
    i1 = mutual_information_from_joint(joint_state(a, w, random_eigenbasis(as_state(a).matrix, rng)))
    i2 = mutual_information_from_joint(joint_state(a, w, random_eigenbasis(as_state(a).matrix, rng)))
    return abs(i1 - i2)


def _kraus_count(rng: np.random.Generator, dim_in: int, dim_out: int) -> int:
    low = -(-dim_in // dim_out)
    return int(rng.integers(low, dim_in * dim_out + 1))


def _random_channel(rng, dim_in, dim_out) -> KrausChannel:
    return chn.random_channel(dim_in, dim_out, _kraus_count(rng, dim_in, dim_out), rng)


def _nats(values: Sequence[str]) -> tuple:
    return ("max_violation", "min_slack", *values)


def divergence_slack(ch: KrausChannel, a1, a2) -> tuple[float, float, float]:
    """``(D(a1||a2) - D(ch(a1)||ch(a2)), D_in, D_out)``."""
    d_in = relative_entropy(np.asarray(a1), np.asarray(a2))
    if math.isinf(d_in):
        return math.inf, d_in, math.nan
    d_out = relative_entropy(chn.apply(ch, a1), chn.apply(ch, a2))
    return d_in - d_out, d_in, d_out


def check_divergence_monotonicity(dims: Sequence[int] = (2, 3, 4), trials: int = 1000, seed: int = 0,
                                  tol_dpi: float = TOL_DPI, workers: int = 1) -> VerificationReport:
    """``D(ch(A1)||ch(A2)) <= D(A1||A2)`` for random channels and state pairs."""
    dims = list(dims)

    def trial(i, rng):
        d_in, d_out = int(rng.choice(dims)), int(rng.choice(dims))
        ch = _random_channel(rng, d_in, d_out)
        a1, a2 = random_density(d_in, rng), random_density(d_in, rng)
        slack, d_a, _ = divergence_slack(ch, a1.matrix, a2.matrix)
        return slack, d_a, ch, a1, a2

    tally = SlackTally(tol_dpi)
    infinite = 0
    max_div = 0.0
    for i, (slack, d_a, ch, a1, a2) in enumerate(run_trials(trial, trials, seed, workers)):
        if math.isinf(d_a):
            infinite += 1
            tally.add(i, 0.0, ok=True)
            continue
        max_div = max(max_div, d_a)
        tally.add(i, slack, witness=lambda ch=ch, a1=a1, a2=a2: {
            "channel": channel_to_json(ch), "A1": la.matrix_to_json(a1.matrix),
            "A2": la.matrix_to_json(a2.matrix)})
    cfg = {"dims": dims, "tol_dpi": tol_dpi, "infinite_trials": infinite, "max_input_divergence": max_div}
    return tally.report("divergence_monotonicity", seed, cfg, _nats(["max_input_divergence"]))


def _floored_positive(d: int, rng: np.random.Generator) -> np.ndarray:
    m = random_density(d, rng).matrix * rng.uniform(0.5, 2.0)
    return la.matrix_function(lambda x: np.maximum(x, POSITIVITY_FLOOR), m)


def _power(e: la.HermitianEigensystem, p: float) -> np.ndarray:
    lam = e.eigenvalues
    lam = np.where(lam > 1e-12 * max(lam[-1], 0.0), lam, 0.0)
    return e.reconstruct(lam ** p)


def uhlmann_sides(beta, s1, t1, s2, t2, x, t: float) -> tuple[float, float]:
    """``tr(beta(x)^dagger S2^t beta(x) T2^(1-t))`` and ``tr(x^dagger S1^t x T1^(1-t))``.

    ``s1`` etc. are eigensystems; ``beta`` maps the first system into the second.
    """
    bx = beta(x)
    lhs = np.trace(la.adjoint(bx) @ _power(s2, t) @ bx @ _power(t2, 1.0 - t))
    rhs = np.trace(la.adjoint(x) @ _power(s1, t) @ x @ _power(t1, 1.0 - t))
    return float(lhs.real), float(rhs.real)


def check_uhlmann_lemma(dims: Sequence[int] = (2, 3), t_grid_size: int = 11, trials: int = 300,
                        seed: int = 0, x_count: int = 5, inflate_fraction: float = 0.5,
                        tol_dpi: float = TOL_DPI, tol_edge: float = TOL_EDGE,
                        workers: int = 1) -> VerificationReport:
    """Uhlmann's lemma for a channel ``ch: A2 -> A1`` with dual ``beta: A1 -> A2``.

    Premises ``ch(S2) <= S1`` and ``ch(T2) <= T1`` hold by construction
    (equality, or equality plus a random PSD term) and are re-verified. The
    conclusion is checked on a uniform t-grid for ``x_count`` random
    (non-Hermitian) ``x`` plus ``x = 1``. On equality trials the ``x = 1``
    edge values ``t = 0`` and ``t = 1`` must agree to ``tol_edge``.
    """
    dims = list(dims)
    grid = np.linspace(0.0, 1.0, t_grid_size)

    def trial(i, rng):
        resampled = 0
        while True:
            d1, d2 = int(rng.choice(dims)), int(rng.choice(dims))
            ch = _random_channel(rng, d2, d1)
            s2, t2 = _floored_positive(d2, rng), _floored_positive(d2, rng)
            s1, t1 = chn.apply(ch, s2), chn.apply(ch, t2)
            inflated = bool(rng.uniform() < inflate_fraction)
            if inflated:
                for m in (s1, t1):
                    g = la.random_complex((d1, d1), rng)
                    m += rng.uniform(0.0, 0.5) * (g @ la.adjoint(g)) / d1
            s1, t1 = 0.5 * (s1 + la.adjoint(s1)), 0.5 * (t1 + la.adjoint(t1))
            if la.min_eigenvalue(t1) > POSITIVITY_FLOOR * 1e-2:
                break
            resampled += 1
            if resampled > 100:
                raise SingularReference("could not sample an invertible T1")
        premise = min(la.min_eigenvalue(s1 - chn.apply(ch, s2)), la.min_eigenvalue(t1 - chn.apply(ch, t2)))
        beta = chn.dual(ch)
        es1, et1, es2, et2 = la.eigh(s1), la.eigh(t1), la.eigh(s2), la.eigh(t2)
        xs = [la.identity(d1)] + [la.random_complex((d1, d1), rng) for _ in range(x_count)]
        worst = math.inf
        worst_at = None
        edge = 0.0
        for t in grid:
            for k, x in enumerate(xs):
                lhs, rhs = uhlmann_sides(beta, es1, et1, es2, et2, x, t)
                slack = rhs - lhs
                if slack < worst:
                    worst, worst_at = slack, (float(t), k)
                if k == 0 and not inflated and t in (0.0, 1.0):
                    edge = max(edge, abs(slack))
        return worst, worst_at, edge, premise, inflated, resampled, ch, s2, t2, s1, t1

    tally = SlackTally(tol_dpi)
    edge_max = 0.0
    edge_bad = premise_bad = resamples = inflated_trials = 0
    min_premise = math.inf
    for i, res in enumerate(run_trials(trial, trials, seed, workers)):
        worst, worst_at, edge, premise, inflated, resampled, ch, s2, t2, s1, t1 = res
        edge_max = max(edge_max, edge)
        min_premise = min(min_premise, premise)
        resamples += resampled
        inflated_trials += inflated
        edge_ok = edge <= tol_edge
        premise_ok = premise >= -la.TOL_PSD
        edge_bad += not edge_ok
        premise_bad += not premise_ok
        tally.add(i, worst, ok=(worst >= -tol_dpi and edge_ok and premise_ok),
                  witness=lambda: {"t": worst_at[0], "x_index": worst_at[1], "channel": channel_to_json(ch),
                                   "S2": la.matrix_to_json(s2), "T2": la.matrix_to_json(t2),
                                   "S1": la.matrix_to_json(s1), "T1": la.matrix_to_json(t1)})
    cfg = {"dims": dims, "t_grid_size": t_grid_size, "x_count": x_count, "tol_dpi": tol_dpi,
           "tol_edge": tol_edge, "max_edge_defect": edge_max, "edge_failures": edge_bad,
           "premise_failures": premise_bad, "min_premise_eigenvalue": float(min_premise),
           "singular_resamples": resamples, "inflated_trials": inflated_trials}
    return tally.report("uhlmann_lemma", seed, cfg)


@dataclass(frozen=True)
class DPIInstance:
    """Everything measured on one (A, W, D) triple."""

    info_w: float
    info_dw: float
    slack: float
    divergence_slack: float
    route_defect: float
    joint_defect: float
    marginal_defect: float


def dpi_instance(a, w: KrausChannel, d: KrausChannel) -> DPIInstance:
    """Measure both sides of ``I(A; D o W) <= I(A; W)`` and the proof route.

    The proof route pushes the joint state and the product of its marginals
    through ``1 (x) D`` and compares divergences.
    """
    a = as_state(a)
    j_w = joint_state(a, w)
    dw = chn.compose(d, w)
    j_dw = joint_state(a, dw, (j_w.weights, j_w.basis))
    ent_w, ent_dw = mutual_information_from_joint(j_w), mutual_information_from_joint(j_dw)
    div_w, div_dw = mutual_information_divergence(j_w), mutual_information_divergence(j_dw)
    lifted = chn.tensor_with_identity(d, a.dim)
    pushed_joint = chn.apply(lifted, j_w.state.matrix)
    pushed_product = chn.apply(lifted, np.kron(j_w.marginal_a.matrix, j_w.marginal_b.matrix))
    proof_slack = div_w - relative_entropy(pushed_joint, pushed_product)
    slack = ent_w - ent_dw
    route = max(abs(ent_w - div_w), abs(ent_dw - div_dw), abs(slack - proof_slack))
    return DPIInstance(ent_w, ent_dw, slack, proof_slack, route,
                       float(np.abs(pushed_joint - j_dw.state.matrix).max()),
                       max(j_w.marginal_defect(), j_dw.marginal_defect()))


def identity_processing_slack(a, w: KrausChannel) -> float:
    """``I(A; W) - I(A; 1 o W)``, which must vanish."""
    return dpi_instance(a, w, chn.identity_channel(w.dim_out)).slack


def _tally_dpi(results, tol_dpi: float, tol_route: float, tol_edge: float = TOL_EDGE):
    tally = SlackTally(tol_dpi)
    stats = {"max_route_defect": 0.0, "max_joint_defect": 0.0, "max_marginal_defect": 0.0,
             "max_mutual_information": 0.0, "route_failures": 0, "joint_failures": 0,
             "max_identity_slack": 0.0, "identity_failures": 0,
             "max_eigenbasis_spread": 0.0, "eigenbasis_failures": 0}
    for i, (inst, spread, identity_slack, witness) in enumerate(results):
        stats["max_identity_slack"] = max(stats["max_identity_slack"], abs(identity_slack))
        identity_ok = abs(identity_slack) <= tol_edge
        stats["identity_failures"] += not identity_ok
        # the joint state is basis dependent for degenerate inputs; sampled states have simple spectra
        stats["max_eigenbasis_spread"] = max(stats["max_eigenbasis_spread"], spread)
        basis_ok = spread <= tol_route
        stats["eigenbasis_failures"] += not basis_ok
        stats["max_route_defect"] = max(stats["max_route_defect"], inst.route_defect)
        stats["max_joint_defect"] = max(stats["max_joint_defect"], inst.joint_defect, inst.marginal_defect)
        stats["max_mutual_information"] = max(stats["max_mutual_information"], inst.info_w)
        route_ok = inst.route_defect <= tol_route
        joint_ok = max(inst.joint_defect, inst.marginal_defect) <= TOL_JOINT
        stats["route_failures"] += not route_ok
        stats["joint_failures"] += not joint_ok
        slack = min(inst.slack, inst.divergence_slack)
        tally.add(i, slack, ok=(slack >= -tol_dpi and route_ok and joint_ok and identity_ok and basis_ok), witness=witness)
    del stats["max_marginal_defect"]
    return tally, stats


def check_dpi(dims: Sequence[int] = (3, 3, 2), trials: int = 500, seed: int = 0,
              tol_dpi: float = TOL_DPI, tol_route: float = TOL_ROUTE,
              workers: int = 1) -> VerificationReport:
    """``I(A; D o W) <= I(A; W)`` for random ``A``, ``W: d1 -> d2``, ``D: d2 -> d3``."""
    d1, d2, d3 = (int(v) for v in dims)

    def trial(i, rng):
        a = random_density(d1, rng)
        w = _random_channel(rng, d1, d2)
        d = _random_channel(rng, d2, d3)
        inst = dpi_instance(a, w, d)
        spread = eigenbasis_spread(a, w, rng)
        witness = lambda: {"A": la.matrix_to_json(a.matrix), "W": channel_to_json(w),  # noqa: E731
                           "D": channel_to_json(d)}
        return inst, spread, identity_processing_slack(a, w), witness

    tally, stats = _tally_dpi(run_trials(trial, trials, seed, workers), tol_dpi, tol_route)
    cfg = {"dims": [d1, d2, d3], "tol_dpi": tol_dpi, "tol_route": tol_route, "tol_edge": TOL_EDGE, **stats}
    return tally.report("dpi", seed, cfg, _nats(["max_route_defect", "max_mutual_information", "max_identity_slack", "max_eigenbasis_spread"]))


def check_holevo(dims: Sequence[int] = (2, 3, 4), povm_count: Sequence[int] | int = (2, 4),
                 trials: int = 300, seed: int = 0, tol_dpi: float = TOL_DPI,
                 tol_route: float = TOL_ROUTE, workers: int = 1) -> VerificationReport:
    """Data processing with ``D`` a measurement into a diagonal algebra.

    ``povm_count`` is a fixed number of outcomes or an inclusive ``(lo, hi)``
    range sampled per trial.
    """
    dims = list(dims)
    lo, hi = (povm_count, povm_count) if isinstance(povm_count, int) else tuple(povm_count)
    if lo < 2:
        raise ValueError("povm_count must be at least 2")

    def trial(i, rng):
        d1, d2 = int(rng.choice(dims)), int(rng.choice(dims))
        k = int(rng.integers(lo, hi + 1))
        a = random_density(d1, rng)
        w = _random_channel(rng, d1, d2)
        m = chn.measurement_channel(chn.random_povm(d2, k, rng))
        inst = dpi_instance(a, w, m)
        spread = eigenbasis_spread(a, w, rng)
        witness = lambda: {"A": la.matrix_to_json(a.matrix), "W": channel_to_json(w),  # noqa: E731
                           "measurement": channel_to_json(m)}
        return inst, spread, identity_processing_slack(a, w), witness

    tally, stats = _tally_dpi(run_trials(trial, trials, seed, workers), tol_dpi, tol_route)
    cfg = {"dims": dims, "povm_count": [lo, hi], "tol_dpi": tol_dpi, "tol_route": tol_route,
           "tol_edge": TOL_EDGE, **stats}
    return tally.report("holevo", seed, cfg, _nats(["max_route_defect", "max_mutual_information", "max_identity_slack", "max_eigenbasis_spread"]))

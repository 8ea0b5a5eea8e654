"""Quantum channels in Kraus form, with Choi and Stinespring views.

A channel ``A -> sum_i K_i A K_i^dagger`` acts on density matrices (the
Schroedinger picture). Its dual ``B -> sum_i K_i^dagger B K_i`` acts on
observables and is unital exactly when the channel is trace preserving.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import linalg as la
from .errors import DimensionMismatch, InfeasibleDims, InvalidChannel, InvalidPOVM
from .report import SlackTally, VerificationReport, run_trials

TOL_TP = 1e-10


def tp_defect(kraus: Sequence[np.ndarray]) -> float:
    """Frobenius norm of ``sum K^dagger K - 1``."""
    dim_in = kraus[0].shape[1]
    s = sum(la.adjoint(k) @ k for k in kraus)
    return float(np.linalg.norm(s - la.identity(dim_in)))


@dataclass(frozen=True, eq=False)
class KrausChannel:
    kraus_ops: tuple
    dim_in: int
    dim_out: int

    def __init__(self, kraus_ops: Sequence, tol_tp: float = TOL_TP):
        ops = tuple(la.as_matrix(k, copy=True) for k in kraus_ops)
        if not ops:
            raise InvalidChannel("empty Kraus family")
        shape = ops[0].shape
        if any(k.shape != shape for k in ops):
            raise InvalidChannel("Kraus operators have differing shapes")
        for k in ops:
            k.setflags(write=False)
        defect = tp_defect(ops)
        if defect > tol_tp:
            raise InvalidChannel(f"not trace preserving: ||sum K^dagger K - 1||_F = {defect:.3e}")
        object.__setattr__(self, "kraus_ops", ops)
        object.__setattr__(self, "dim_out", shape[0])
        object.__setattr__(self, "dim_in", shape[1])

    def __repr__(self) -> str:
        return f"KrausChannel(dim_in={self.dim_in}, dim_out={self.dim_out}, kraus={len(self.kraus_ops)})"

    def __len__(self) -> int:
        return len(self.kraus_ops)

    def __call__(self, a) -> np.ndarray:
        return apply(self, a)

    def stacked(self) -> np.ndarray:
        return np.stack(self.kraus_ops)


def apply(ch: KrausChannel, a) -> np.ndarray:
    """``sum_i K_i a K_i^dagger``."""
    a = np.asarray(a, dtype=np.complex128)
    if a.shape != (ch.dim_in, ch.dim_in):
        raise DimensionMismatch(f"channel expects {ch.dim_in}x{ch.dim_in} input, got {a.shape}")
    k = ch.stacked()
    return np.einsum("kij,jl,kml->im", k, a, k.conj())


@dataclass(frozen=True)
class DualMap:
    """The unital map ``B -> sum_i K_i^dagger B K_i`` (Heisenberg picture)."""

    channel: KrausChannel

    def __call__(self, b) -> np.ndarray:
        b = np.asarray(b, dtype=np.complex128)
        ch = self.channel
        if b.shape != (ch.dim_out, ch.dim_out):
            raise DimensionMismatch(f"dual map expects {ch.dim_out}x{ch.dim_out} input, got {b.shape}")
        k = ch.stacked()
        return np.einsum("kji,jl,klm->im", k.conj(), b, k)

    def unitality_defect(self) -> float:
        ch = self.channel
        return float(np.linalg.norm(self(la.identity(ch.dim_out)) - la.identity(ch.dim_in)))


def dual(ch: KrausChannel) -> DualMap:
    return DualMap(ch)


def compose(d: KrausChannel, w: KrausChannel) -> KrausChannel:
    """Channel ``d o w`` (apply ``w`` first) with Kraus family ``{D_j W_i}``."""
    if w.dim_out != d.dim_in:
        raise DimensionMismatch(f"cannot compose: w outputs {w.dim_out}, d expects {d.dim_in}")
    return KrausChannel([dj @ wi for dj in d.kraus_ops for wi in w.kraus_ops], tol_tp=1e-9)


def tensor_with_identity(d: KrausChannel, left_dim: int) -> KrausChannel:
    """``1 (x) d``: identity on a ``left_dim`` factor, ``d`` on the second factor."""
    eye = la.identity(left_dim)
    return KrausChannel([np.kron(eye, k) for k in d.kraus_ops], tol_tp=1e-9)


@dataclass(frozen=True)
class ChoiMatrix:
    """``sum_ij map(|i><j|) (x) |i><j|``, output factor first."""

    matrix: np.ndarray
    dim_in: int
    dim_out: int

    def is_completely_positive(self, tol_psd: float = la.TOL_PSD) -> bool:
        return la.is_psd(self.matrix, tol_psd)

    def input_marginal(self) -> np.ndarray:
        # trace over the output factor; the identity for trace-preserving maps
        return la.partial_trace(self.matrix, (self.dim_out, self.dim_in), 0)


def choi_of_map(fn: Callable[[np.ndarray], np.ndarray], dim_in: int, dim_out: int) -> ChoiMatrix:
    """Choi matrix of an arbitrary linear map given as a callable."""
    m = np.zeros((dim_out * dim_in, dim_out * dim_in), dtype=np.complex128)
    for i in range(dim_in):
        for j in range(dim_in):
            e = np.zeros((dim_in, dim_in), dtype=np.complex128)
            e[i, j] = 1.0
            m += np.kron(np.asarray(fn(e)), e)
    return ChoiMatrix(m, dim_in, dim_out)


def choi_matrix(ch: KrausChannel) -> ChoiMatrix:
    return choi_of_map(lambda e: apply(ch, e), ch.dim_in, ch.dim_out)


def channels_equivalent(a: KrausChannel, b: KrausChannel, tol: float = la.TOL_EIG * 10) -> bool:
    """Equality of channels as equality of Choi matrices (Kraus families are not unique)."""
    if (a.dim_in, a.dim_out) != (b.dim_in, b.dim_out):
        return False
    return float(np.max(np.abs(choi_matrix(a).matrix - choi_matrix(b).matrix))) <= tol


def transpose_map_choi(dim: int) -> ChoiMatrix:
    """Choi matrix of the transpose map, which is positive but not completely positive."""
    return choi_of_map(lambda e: e.T, dim, dim)


@dataclass(frozen=True)
class StinespringDilation:
    """Isometry ``V: C^dim_in -> C^dim_out (x) C^m`` with ``V^dagger (B (x) 1_m) V = dual(B)``.

    ``V|v> = sum_i (K_i|v>) (x) |i>``; the representation is ``rho(B) = B (x) 1_m``.
    """

    isometry: np.ndarray
    dim_in: int
    dim_out: int
    multiplicity: int

    def representation(self, b) -> np.ndarray:
        return np.kron(np.asarray(b, dtype=np.complex128), la.identity(self.multiplicity))

    def dual_apply(self, b) -> np.ndarray:
        v = self.isometry
        return la.adjoint(v) @ self.representation(b) @ v

    def channel_apply(self, a) -> np.ndarray:
        """The channel itself: trace out the environment from ``V a V^dagger``."""
        v = self.isometry
        return la.partial_trace(v @ np.asarray(a) @ la.adjoint(v), (self.dim_out, self.multiplicity), 1)

    def isometry_defect(self) -> float:
        v = self.isometry
        return float(np.max(np.abs(la.adjoint(v) @ v - la.identity(self.dim_in))))


def stinespring(ch: KrausChannel) -> StinespringDilation:
    m = len(ch.kraus_ops)
    # row index (o, i) with the output index outermost
    v = np.transpose(ch.stacked(), (1, 0, 2)).reshape(ch.dim_out * m, ch.dim_in)
    return StinespringDilation(v, ch.dim_in, ch.dim_out, m)


def identity_channel(dim: int) -> KrausChannel:
    return KrausChannel([la.identity(dim)])


def unitary_channel(u) -> KrausChannel:
    return KrausChannel([la.as_matrix(u)])


def completely_depolarizing(dim_in: int, dim_out: int | None = None) -> KrausChannel:
    """Constant channel ``A -> tr(A) 1/dim_out``."""
    dim_out = dim_in if dim_out is None else dim_out
    ops = []
    for i in range(dim_out):
        for j in range(dim_in):
            k = np.zeros((dim_out, dim_in), dtype=np.complex128)
            k[i, j] = 1.0 / math.sqrt(dim_out)
            ops.append(k)
    return KrausChannel(ops)


def classical_channel(stochastic) -> KrausChannel:
    """Embed a column-stochastic matrix ``P[out, in]`` as a map between diagonal algebras."""
    p = np.asarray(stochastic, dtype=np.float64)
    if p.ndim != 2 or np.any(p < 0) or not np.allclose(p.sum(axis=0), 1.0, atol=1e-12, rtol=0):
        raise InvalidChannel("expected a nonnegative column-stochastic matrix")
    ops = []
    for i in range(p.shape[0]):
        for j in range(p.shape[1]):
            if p[i, j] > 0:
                k = np.zeros(p.shape, dtype=np.complex128)
                k[i, j] = math.sqrt(p[i, j])
                ops.append(k)
    return KrausChannel(ops)


def validate_povm(povm: Sequence, tol_psd: float = la.TOL_PSD, tol_tp: float = TOL_TP) -> list[np.ndarray]:
    if len(povm) == 0:
        raise InvalidPOVM("empty POVM")
    elems = [la.as_matrix(e) for e in povm]
    d = elems[0].shape[0]
    for idx, e in enumerate(elems):
        if e.shape != (d, d):
            raise InvalidPOVM(f"element {idx} has shape {e.shape}, expected {(d, d)}")
        if la.hermiticity_defect(e) > la.TOL_HERM:
            raise InvalidPOVM(f"element {idx} is not Hermitian")
        lmin = la.min_eigenvalue(e)
        if lmin < -tol_psd:
            raise InvalidPOVM(f"element {idx} is not positive semidefinite (min eigenvalue {lmin:.3g})")
    defect = float(np.linalg.norm(sum(elems) - la.identity(d)))
    if defect > tol_tp:
        raise InvalidPOVM(f"elements do not sum to the identity (Frobenius defect {defect:.3e})")
    return elems


def measurement_channel(povm: Sequence) -> KrausChannel:
    """``A -> sum_i tr(E_i A) |i><i|`` into the diagonal algebra of size ``len(povm)``.

    Realized by the Kraus operators ``|i><k| sqrt(E_i)``.
    """
    elems = validate_povm(povm)
    d = elems[0].shape[0]
    n = len(elems)
    ops = []
    for i, e in enumerate(elems):
        root = la.sqrtm_psd(e, tol_dom=la.TOL_PSD)
        for k in range(d):
            op = np.zeros((n, d), dtype=np.complex128)
            op[i, :] = root[k, :]
            ops.append(op)
    return KrausChannel(ops, tol_tp=1e-9)


def random_povm(dim: int, outcomes: int, rng: np.random.Generator) -> list[np.ndarray]:
    """``E_i = G^{-1/2} F_i G^{-1/2}`` with random PSD ``F_i`` and ``G = sum F_i``."""
    fs = []
    for _ in range(outcomes):
        g = la.random_complex((dim, dim), rng)
        fs.append(g @ la.adjoint(g))
    inv_root = la.matrix_function(lambda x: 1.0 / np.sqrt(x), sum(fs), la.POSITIVE)
    out = []
    for f in fs:
        e = inv_root @ f @ inv_root
        out.append(0.5 * (e + la.adjoint(e)))
    return out


def gram_schmidt(a: np.ndarray) -> np.ndarray:
    """Orthonormalize the columns of ``a`` (modified Gram-Schmidt, two passes)."""
    q = np.array(a, dtype=np.complex128)
    n = q.shape[1]
    for j in range(n):
        for _ in range(2):
            for i in range(j):
                q[:, j] -= np.vdot(q[:, i], q[:, j]) * q[:, i]
        norm = np.linalg.norm(q[:, j])
        if norm == 0.0:
            raise InfeasibleDims("columns are linearly dependent")
        q[:, j] /= norm
    return q


def random_channel(dim_in: int, dim_out: int, kraus_count: int, rng: np.random.Generator) -> KrausChannel:
    """Slice a random isometry ``C^dim_in -> C^(dim_out*kraus_count)`` into Kraus blocks."""
    if kraus_count < 1:
        raise InfeasibleDims("kraus_count must be at least 1")
    if dim_out * kraus_count < dim_in:
        raise InfeasibleDims(
            f"dim_out * kraus_count = {dim_out * kraus_count} < dim_in = {dim_in}; no isometry exists")
    v = gram_schmidt(la.random_complex((dim_out * kraus_count, dim_in), rng))
    return KrausChannel([v[i * dim_out:(i + 1) * dim_out, :] for i in range(kraus_count)])


def schwarz_gap(ch: KrausChannel, x) -> float:
    """Smallest eigenvalue of ``beta(x^dagger x) - beta(x)^dagger beta(x)`` for the dual ``beta``."""
    beta = dual(ch)
    x = la.as_matrix(x)
    bx = beta(x)
    diff = beta(la.adjoint(x) @ x) - la.adjoint(bx) @ bx
    return la.min_eigenvalue(0.5 * (diff + la.adjoint(diff)))


def schwarz_check(ch: KrausChannel, trials: int, seed: int = 0,
                  tol_psd: float = la.TOL_PSD) -> VerificationReport:
    """Test the Schwarz inequality of the dual map on random, generally non-normal ``x``."""
    def trial(i, rng):
        x = la.random_complex((ch.dim_out, ch.dim_out), rng)
        return schwarz_gap(ch, x), x

    tally = SlackTally(tol_psd)
    for i, (gap, x) in enumerate(run_trials(trial, trials, seed)):
        tally.add(i, gap, witness=lambda x=x: {"x": la.matrix_to_json(x)})
    cfg = {"dims": [ch.dim_in, ch.dim_out], "kraus_count": len(ch), "tol_psd": tol_psd}
    return tally.report("schwarz", seed, cfg)

"""Density operators, von Neumann entropy and relative entropy (divergence).

All logarithms are natural; entropic quantities are in nats.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg as la
from .errors import DimensionMismatch, InvalidState, SingularReference

TOL_TRACE = 1e-10
TOL_SUPP = 1e-9


@dataclass(frozen=True)
class DensityOperator:
    """Positive semidefinite, unit-trace matrix.

    Construction validates both invariants; use :meth:`from_matrix` to get
    an error message naming the one that failed.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = la.check_hermitian(self.matrix)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        problem = _state_problem(m, la.TOL_PSD, TOL_TRACE)
        if problem:
            raise InvalidState(problem)

    @classmethod
    def from_matrix(cls, m) -> "DensityOperator":
        return cls(la.as_matrix(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eig(self) -> la.HermitianEigensystem:
        return la.eigh(self.matrix)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


def _state_problem(m: np.ndarray, tol_psd: float, tol_trace: float) -> str:
    tr = complex(np.trace(m))
    if abs(tr - 1.0) > tol_trace:
        return f"trace is {tr.real:.12g}{tr.imag:+.3g}j, expected 1 (tol {tol_trace:g})"
    lmin = la.min_eigenvalue(m)
    if lmin < -tol_psd:
        return f"not positive semidefinite: min eigenvalue {lmin:.6g} (tol {tol_psd:g})"
    return ""


def as_state(a) -> DensityOperator:
    return a if isinstance(a, DensityOperator) else DensityOperator.from_matrix(a)


def maximally_mixed(dim: int) -> DensityOperator:
    return DensityOperator(la.identity(dim) / dim)


def pure_state(vector: Sequence[complex]) -> DensityOperator:
    v = np.asarray(vector, dtype=np.complex128).reshape(-1)
    norm = np.linalg.norm(v)
    if not math.isclose(norm, 1.0, abs_tol=1e-10):
        raise InvalidState(f"state vector has norm {norm:.12g}, expected 1")
    return DensityOperator(np.outer(v, v.conj()))


def diagonal_state(probabilities: Sequence[float]) -> DensityOperator:
    p = np.asarray(probabilities, dtype=np.float64)
    if np.any(p < 0):
        raise InvalidState("probability vector has negative entries")
    return DensityOperator(la.embed_diagonal(p))


def random_density(dim: int, rng: np.random.Generator) -> DensityOperator:
    """``G G^dagger / tr(G G^dagger)`` with ``G`` standard complex Gaussian."""
    g = la.random_complex((dim, dim), rng)
    w = g @ la.adjoint(g)
    w = w / np.trace(w).real
    return DensityOperator(0.5 * (w + la.adjoint(w)))


def support_projector(a, tol_supp: float = TOL_SUPP) -> np.ndarray:
    """Projector onto the span of eigenvectors with eigenvalue > ``tol_supp``."""
    e = la.eigh(np.asarray(a))
    keep = (e.eigenvalues > tol_supp).astype(np.float64)
    return e.reconstruct(keep)


def _xlogx(lam: np.ndarray) -> np.ndarray:
    pos = lam > 0
    out = np.zeros_like(lam)
    out[pos] = lam[pos] * np.log(lam[pos])
    return out


def von_neumann_entropy(a) -> float:
    """``-tr(a log a)`` in nats, with ``0 log 0 = 0``."""
    lam = la.eigh(np.asarray(a)).eigenvalues
    return float(-np.sum(_xlogx(lam)))


def _outside_mass(a: np.ndarray, eb: la.HermitianEigensystem, tol_supp: float) -> float:
    q = eb.reconstruct((eb.eigenvalues <= tol_supp).astype(np.float64))
    return la.operator_norm(q @ a @ q)


def support_contained(a, b, tol_supp: float = TOL_SUPP) -> bool:
    """Numerical test of ``supp a <= supp b``.

    The mass of ``a`` outside ``supp b``, measured as the operator norm of
    ``(1 - P_b) a (1 - P_b)``, must not exceed ``dim * tol_supp``.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"states of shapes {a.shape} and {b.shape}")
    return _outside_mass(a, la.eigh(b), tol_supp) <= a.shape[0] * tol_supp


def relative_entropy(a, b, tol_supp: float = TOL_SUPP) -> float:
    """Divergence ``D(a||b) = tr(a (log a - log b))`` in nats.

    Returns ``math.inf`` when the support of ``a`` is not contained in the
    support of ``b``. Otherwise ``log b`` is taken on ``supp b`` only.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"states of shapes {a.shape} and {b.shape}")
    eb = la.eigh(b)
    if _outside_mass(a, eb, tol_supp) > a.shape[0] * tol_supp:
        return math.inf
    keep = eb.eigenvalues > tol_supp
    v = eb.eigenvectors[:, keep]
    # diagonal of a in b's eigenbasis
    weights = np.real(np.einsum("ij,ik,kj->j", v.conj(), a, v))
    cross = float(np.sum(weights * np.log(eb.eigenvalues[keep])))
    return float(np.sum(_xlogx(la.eigh(a).eigenvalues))) - cross


def _trace_power_pair(ea: la.HermitianEigensystem, eb: la.HermitianEigensystem, mu: float) -> float:
    # tr(a^mu b^(1-mu)) from the two eigensystems
    pa = np.clip(ea.eigenvalues, 0, None) ** mu
    pb = np.clip(eb.eigenvalues, 0, None) ** (1.0 - mu)
    overlap = np.abs(la.adjoint(ea.eigenvectors) @ eb.eigenvectors) ** 2
    return float(pa @ overlap @ pb)


def relative_entropy_via_limit(a, b, h: float = 1e-5, richardson: bool = True,
                               tol_supp: float = TOL_SUPP) -> float:
    """Divergence as the one-sided derivative of ``g(mu) = tr(a^mu b^(1-mu))`` at 1.

    Uses ``(g(1) - g(1-h)) / h`` with ``g(1) = 1``; with ``richardson`` the
    steps ``h`` and ``h/2`` are combined to cancel the O(h) term.

    Raises
    ------
    SingularReference
        If ``b`` has an eigenvalue ``<= tol_supp``.
    """
    ea = la.eigh(np.asarray(a))
    eb = la.eigh(np.asarray(b))
    if eb.eigenvalues[0] <= tol_supp:
        raise SingularReference(f"reference has eigenvalue {eb.eigenvalues[0]:.3g} <= {tol_supp:g}")
    g1 = float(np.sum(ea.eigenvalues))

    def slope(step: float) -> float:
        return (g1 - _trace_power_pair(ea, eb, 1.0 - step)) / step

    if not richardson:
        return slope(h)
    return 2.0 * slope(h / 2) - slope(h)

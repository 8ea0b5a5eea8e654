"""Dense complex linear algebra and spectral functional calculus.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. The Hermitian
eigensolver is a cyclic complex Jacobi iteration compiled with numba; every
other routine here is built on top of it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Optional, Sequence

import numpy as np
from numba import njit

from .errors import (
    DimensionMismatch,
    DomainViolation,
    InvalidMatrix,
    NoConvergence,
    NotHermitian,
)

TOL_EIG = 1e-12
TOL_HERM = 1e-10
TOL_PSD = 1e-9
TOL_DOM = 1e-10
MAX_SWEEPS = 100


def as_matrix(a, *, copy: bool = False) -> np.ndarray:
    """Coerce ``a`` to a finite 2-D complex128 array."""
    m = np.array(a, dtype=np.complex128, copy=copy) if copy else np.asarray(a, dtype=np.complex128)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise InvalidMatrix(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidMatrix("matrix has non-finite entries")
    return m


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)


def zeros(n: int, m: Optional[int] = None) -> np.ndarray:
    return np.zeros((n, n if m is None else m), dtype=np.complex128)


def embed_diagonal(values: Sequence[float]) -> np.ndarray:
    return np.diag(np.asarray(values, dtype=np.complex128))


def adjoint(a: np.ndarray) -> np.ndarray:
    return np.conj(np.transpose(a))


def add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape != b.shape:
        raise DimensionMismatch(f"cannot add {a.shape} and {b.shape}")
    return a + b


def scale(c: complex, a: np.ndarray) -> np.ndarray:
    return c * a


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def trace(a: np.ndarray) -> complex:
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"trace of non-square matrix {a.shape}")
    return complex(np.trace(a))


def frobenius_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product tr(a^dagger b)."""
    if a.shape != b.shape:
        raise DimensionMismatch(f"inner product of {a.shape} and {b.shape}")
    return complex(np.vdot(a, b))


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product, first factor's index outermost."""
    return np.kron(a, b)


def partial_trace(a: np.ndarray, dims: tuple[int, int], which: int) -> np.ndarray:
    """Trace out factor ``which`` (0 or 1) of a bipartite operator.

    ``dims`` gives the dimensions of the two factors, in the same order as
    they appear in :func:`kron`.
    """
    d0, d1 = dims
    if a.shape != (d0 * d1, d0 * d1):
        raise DimensionMismatch(f"matrix of shape {a.shape} does not match dims {dims}")
    t = a.reshape(d0, d1, d0, d1)
    if which == 0:
        return np.einsum("ijik->jk", t)
    if which == 1:
        return np.einsum("ijkj->ik", t)
    raise ValueError(f"factor index must be 0 or 1, got {which}")


def hermiticity_defect(a: np.ndarray) -> float:
    return float(np.max(np.abs(a - adjoint(a)))) if a.size else 0.0


def check_hermitian(a, tol_herm: float = TOL_HERM) -> np.ndarray:
    """Validate Hermiticity within ``tol_herm`` and return the symmetrized matrix."""
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise NotHermitian(f"matrix of shape {a.shape} is not square")
    defect = hermiticity_defect(a)
    if defect > tol_herm:
        raise NotHermitian(f"max |a - a^dagger| = {defect:.3e} exceeds {tol_herm:.1e}")
    return 0.5 * (a + adjoint(a))


@njit(cache=True)
def _jacobi(a, tol, max_sweeps):
    # cyclic complex Jacobi; a is overwritten
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    total = 0.0
    for i in range(n):
        for j in range(n):
            total += a[i, j].real ** 2 + a[i, j].imag ** 2
    scale = math.sqrt(total)
    polish = False
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += 2.0 * (a[p, q].real ** 2 + a[p, q].imag ** 2)
        if polish or off == 0.0:
            return v, sweep, True
        if math.sqrt(off) <= tol * scale:
            # one extra sweep; convergence is quadratic so this reaches roundoff
            polish = True
        elif sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                ph = apq / mag
                phc = ph.conjugate()
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                if theta >= 0.0:
                    t = 1.0 / (theta + math.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # U = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] on columns p, q
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * phc * akq
                    a[k, q] = s * akp + c * phc * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * ph * aqk
                    a[q, k] = s * apk + c * ph * aqk
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * phc * vkq
                    v[k, q] = s * vkp + c * phc * vkq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
    return v, max_sweeps, False


@dataclass(frozen=True)
class HermitianEigensystem:
    """Spectral decomposition ``a = U diag(eigenvalues) U^dagger``.

    ``eigenvalues`` ascend; the columns of ``eigenvectors`` are orthonormal.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self, values: Optional[np.ndarray] = None) -> np.ndarray:
        lam = self.eigenvalues if values is None else values
        u = self.eigenvectors
        return (u * lam) @ adjoint(u)

    def apply(self, f: Callable[[np.ndarray], np.ndarray], domain: Optional["Domain"] = None,
              tol_dom: float = TOL_DOM) -> np.ndarray:
        lam = self.eigenvalues if domain is None else domain.admit(self.eigenvalues, tol_dom)
        out = np.asarray(f(lam), dtype=np.float64)
        if not np.all(np.isfinite(out)):
            raise DomainViolation("function produced non-finite values on the spectrum")
        m = self.reconstruct(out)
        return 0.5 * (m + adjoint(m))


def eigh(a, tol_eig: float = TOL_EIG, tol_herm: float = TOL_HERM,
         max_sweeps: int = MAX_SWEEPS) -> HermitianEigensystem:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Raises
    ------
    NotHermitian
        If ``max |a - a^dagger| > tol_herm``.
    NoConvergence
        If the off-diagonal Frobenius mass does not drop below
        ``tol_eig * ||a||_F`` within ``max_sweeps`` sweeps.
    """
    h = np.array(check_hermitian(a, tol_herm), dtype=np.complex128, order="C")
    v, sweeps, ok = _jacobi(h, tol_eig, max_sweeps)
    if not ok:
        raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")
    lam = np.real(np.diag(h)).copy()
    order = np.argsort(lam, kind="stable")
    return HermitianEigensystem(lam[order], v[:, order])


def eigvalsh(a, **kw) -> np.ndarray:
    return eigh(a, **kw).eigenvalues


@dataclass(frozen=True)
class Domain:
    """Real interval on which a scalar function is defined.

    Eigenvalues up to ``tol_dom`` outside a closed endpoint are clamped onto
    it; anything further out (or touching an open endpoint) is rejected.
    """

    lo: float = -math.inf
    hi: float = math.inf
    lo_closed: bool = True
    hi_closed: bool = True

    def admit(self, values: np.ndarray, tol_dom: float = TOL_DOM) -> np.ndarray:
        v = np.array(values, dtype=np.float64)
        if math.isfinite(self.lo):
            bad = v < self.lo - tol_dom if self.lo_closed else v <= self.lo
            if np.any(bad):
                raise DomainViolation(f"eigenvalue {v[bad].min():.6g} below domain {self}")
            v = np.maximum(v, self.lo)
        if math.isfinite(self.hi):
            bad = v > self.hi + tol_dom if self.hi_closed else v >= self.hi
            if np.any(bad):
                raise DomainViolation(f"eigenvalue {v[bad].max():.6g} above domain {self}")
            v = np.minimum(v, self.hi)
        return v

    def __contains__(self, x: float) -> bool:
        above = x >= self.lo if self.lo_closed else x > self.lo
        below = x <= self.hi if self.hi_closed else x < self.hi
        return above and below

    def __str__(self) -> str:
        left = "[" if self.lo_closed and math.isfinite(self.lo) else "("
        right = "]" if self.hi_closed and math.isfinite(self.hi) else ")"
        return f"{left}{self.lo:g}, {self.hi:g}{right}"


REALS = Domain()
NONNEGATIVE = Domain(0.0, math.inf)
POSITIVE = Domain(0.0, math.inf, lo_closed=False)


def matrix_function(f: Callable[[np.ndarray], np.ndarray], a, domain: Optional[Domain] = None,
                    tol_dom: float = TOL_DOM, tol_herm: float = TOL_HERM) -> np.ndarray:
    """Return ``f(a) = sum_i f(a_i) |a_i><a_i|`` for Hermitian ``a``.

    ``f`` must accept a real numpy array of eigenvalues. When ``domain`` is
    given, eigenvalues are validated (and boundary jitter clamped) first.
    """
    return eigh(a, tol_herm=tol_herm).apply(f, domain, tol_dom)


def sqrtm_psd(a, tol_dom: float = TOL_DOM) -> np.ndarray:
    return matrix_function(np.sqrt, a, NONNEGATIVE, tol_dom)


def min_eigenvalue(a, tol_herm: float = TOL_HERM) -> float:
    return float(eigh(a, tol_herm=tol_herm).eigenvalues[0])


def is_psd(a, tol_psd: float = TOL_PSD, tol_herm: float = TOL_HERM) -> bool:
    """True iff the smallest eigenvalue of Hermitian ``a`` is >= -tol_psd."""
    return min_eigenvalue(a, tol_herm) >= -tol_psd


def loewner_le(b, c, tol_psd: float = TOL_PSD, tol_herm: float = TOL_HERM) -> bool:
    """Operator order ``b <= c``."""
    return is_psd(as_matrix(c) - as_matrix(b), tol_psd, tol_herm)


def operator_norm(a) -> float:
    """Largest singular value, as sqrt of the top eigenvalue of a^dagger a."""
    a = as_matrix(a)
    gram = adjoint(a) @ a
    top = eigh(0.5 * (gram + adjoint(gram))).eigenvalues[-1]
    return math.sqrt(max(top, 0.0))


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed-enough unitary from the eigenvectors of a random Hermitian."""
    g = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    return eigh(0.5 * (g + adjoint(g))).eigenvectors


def random_complex(shape, rng: np.random.Generator) -> np.ndarray:
    """Matrix of independent standard complex Gaussians (E|z|^2 = 1)."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2)


# Matrix JSON: {"rows": n, "cols": m, "data": [[re, im], ...]}, row-major.
def matrix_to_json(a) -> dict:
    a = np.asarray(a, dtype=np.complex128)
    flat = a.reshape(-1)
    return {"rows": int(a.shape[0]), "cols": int(a.shape[1]),
            "data": [[float(z.real), float(z.imag)] for z in flat]}


def _finite_number(v: Any) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def matrix_from_json(obj: Any) -> np.ndarray:
    if not isinstance(obj, dict):
        raise InvalidMatrix("matrix JSON must be an object")
    rows, cols, data = obj.get("rows"), obj.get("cols"), obj.get("data")
    if not (isinstance(rows, int) and isinstance(cols, int) and rows > 0 and cols > 0):
        raise InvalidMatrix(f"rows/cols must be positive integers, got {rows!r}/{cols!r}")
    if not isinstance(data, list) or len(data) != rows * cols:
        got = len(data) if isinstance(data, list) else type(data).__name__
        raise InvalidMatrix(f"data must hold rows*cols = {rows * cols} entries, got {got}")
    out = np.empty(rows * cols, dtype=np.complex128)
    for i, entry in enumerate(data):
        if not (isinstance(entry, list) and len(entry) == 2 and all(_finite_number(v) for v in entry)):
            raise InvalidMatrix(f"entry {i} must be a [re, im] pair of finite numbers, got {entry!r}")
        out[i] = complex(entry[0], entry[1])
    return out.reshape(rows, cols)

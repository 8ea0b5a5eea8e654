"""Pick functions through their integral representation.

A Pick function is stored as the data ``(alpha, beta, mu)`` of

    phi(z) = alpha z + beta + int (1/(x - z) - x/(x^2 + 1)) dmu(x)

with ``mu`` split into point masses and an absolutely continuous part.
Point masses enter in the rational form ``gamma / (delta - z)``; the
compensating constant is absorbed into ``beta``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import quadrature
from .errors import InvalidPickSpec, PoleEvaluation, QuadratureFailure

QUAD_TOL = 1e-6
_U_MAX = 1e12


@dataclass(frozen=True)
class Atom:
    delta: float
    gamma: float


@dataclass(frozen=True)
class Density:
    """Density ``w(x) >= 0`` of the continuous part of the measure on ``[lo, hi]``."""

    lo: float
    hi: float
    kind: str
    weight: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    params: dict = field(default_factory=dict, compare=False)

    def __call__(self, x):
        return self.weight(np.asarray(x, dtype=np.float64))


def sqrt_neg_over_pi(lo: float = -math.inf, hi: float = 0.0) -> Density:
    if hi > 0:
        raise InvalidPickSpec("sqrt_neg_over_pi density lives on x <= 0")
    return Density(lo, hi, "sqrt_neg_over_pi", lambda x: np.sqrt(np.clip(-x, 0.0, None)) / math.pi)


def table_density(xs: Sequence[float], ws: Sequence[float]) -> Density:
    """Piecewise-linear density through the points ``(xs[i], ws[i])``."""
    x = np.asarray(xs, dtype=np.float64)
    w = np.asarray(ws, dtype=np.float64)
    if x.ndim != 1 or x.shape != w.shape or x.size < 2:
        raise InvalidPickSpec("table density needs matching xs/ws with at least two points")
    if np.any(np.diff(x) <= 0):
        raise InvalidPickSpec("table xs must be strictly increasing")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise InvalidPickSpec("table weights must be finite and nonnegative")
    return Density(float(x[0]), float(x[-1]), "table",
                   lambda t: np.interp(t, x, w, left=0.0, right=0.0),
                   {"xs": x.tolist(), "ws": w.tolist()})


@dataclass(frozen=True)
class PickFunctionSpec:
    alpha: float = 0.0
    beta: float = 0.0
    atoms: tuple = ()
    density: Optional[Density] = None
    excluded: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(a if isinstance(a, Atom) else Atom(*a) for a in self.atoms))
        if self.excluded is not None:
            object.__setattr__(self, "excluded", (float(self.excluded[0]), float(self.excluded[1])))
        _validate(self)

    def __call__(self, z: complex, quad_tol: float = QUAD_TOL) -> complex:
        return evaluate_pick(self, z, quad_tol)


def _validate(spec: PickFunctionSpec) -> None:
    if not (math.isfinite(spec.alpha) and spec.alpha >= 0):
        raise InvalidPickSpec(f"alpha must be >= 0, got {spec.alpha}")
    if not math.isfinite(spec.beta):
        raise InvalidPickSpec("beta must be finite")
    for atom in spec.atoms:
        if not (atom.gamma > 0 and math.isfinite(atom.gamma) and math.isfinite(atom.delta)):
            raise InvalidPickSpec(f"atom {atom} needs finite location and positive weight")
    if spec.density is not None:
        d = spec.density
        if not d.lo < d.hi:
            raise InvalidPickSpec(f"density support [{d.lo}, {d.hi}] is empty")
        _check_integrable(d)
    if spec.excluded is not None:
        a, b = spec.excluded
        if not a < b:
            raise InvalidPickSpec(f"excluded interval ({a}, {b}) is empty")
        for atom in spec.atoms:
            if a < atom.delta < b:
                raise InvalidPickSpec(f"atom at {atom.delta} lies in the excluded interval")
        if spec.density is not None and spec.density.lo < b and spec.density.hi > a:
            raise InvalidPickSpec("density support meets the excluded interval")


def _substitution(d: Density):
    """Map the density's support onto finite or half-infinite ``u`` ranges.

    Returns a list of ``(x_of_u, jacobian, u_max_or_None, u_of_x)``.
    """
    lo, hi = d.lo, d.hi
    if math.isfinite(lo) and math.isfinite(hi):
        return [(lambda u: lo + u, lambda u: np.ones_like(u), hi - lo, lambda x: x - lo)]
    pieces = []
    if not math.isfinite(lo):
        top = hi if math.isfinite(hi) else 0.0
        pieces.append((lambda u, t=top: t - u * u, lambda u: 2.0 * u, None,
                       lambda x, t=top: math.sqrt(max(t - x, 0.0))))
    if not math.isfinite(hi):
        bot = lo if math.isfinite(lo) else 0.0
        pieces.append((lambda u, b=bot: b + u * u, lambda u: 2.0 * u, None,
                       lambda x, b=bot: math.sqrt(max(x - b, 0.0))))
    return pieces


def _check_integrable(d: Density) -> None:
    # mu must satisfy int w(x)/(x^2+1) dx < infinity; test tail decay numerically
    for x_of_u, jac, span, _ in _substitution(d):
        if span is not None:
            grid = np.linspace(d.lo, d.hi, 257)  # finite support: bounded w suffices
            if not np.all(np.isfinite(d(grid))) or np.any(d(grid) < 0):
                raise InvalidPickSpec("density must be finite and nonnegative on its support")
            continue

        def h(u):
            x = x_of_u(np.asarray([u], dtype=np.float64))
            return abs(float((d(x) / (x * x + 1.0) * jac(np.asarray([u])))[0])) * u

        t1, t2 = h(1e3), h(1e6)
        if not (t2 < 1e-12 or t2 < 0.5 * t1):
            raise InvalidPickSpec("density is not integrable against 1/(x^2+1): tail does not decay")


def _pole_check(spec: PickFunctionSpec, z: complex) -> None:
    for atom in spec.atoms:
        if z == atom.delta:
            raise PoleEvaluation(f"z = {z} coincides with the atom at {atom.delta}")
    if z.imag == 0.0:
        x = z.real
        d = spec.density
        if d is not None and d.lo <= x <= d.hi:
            raise PoleEvaluation(f"real z = {x} lies in the closed support [{d.lo}, {d.hi}] of the measure")
        if spec.excluded is not None and not spec.excluded[0] < x < spec.excluded[1]:
            raise PoleEvaluation(f"real z = {x} is outside the excluded interval {spec.excluded}")


def _tail_cutoff(g: Callable[[np.ndarray], np.ndarray], target: float, start: float) -> float:
    u = max(start, 1.0)
    while u < _U_MAX:
        probe = np.array([u, 2.0 * u])
        if np.all(np.abs(g(probe)) * probe <= target):
            return u
        u *= 10.0
    raise QuadratureFailure("measure tail does not decay fast enough to truncate")


def _density_integral(d: Density, z: complex, quad_tol: float) -> complex:
    total = 0j
    pieces = _substitution(d)
    for x_of_u, jac, span, u_of_x in pieces:
        def g(u, x_of_u=x_of_u, jac=jac):
            x = x_of_u(u)
            # 1/(x - z) - x/(x^2 + 1) without the cancellation at large |x|
            return (1.0 + x * z) / ((x - z) * (x * x + 1.0)) * d(x) * jac(u)

        tol = quad_tol / (2 * len(pieces))
        if span is not None:
            breaks = [0.0, span]
            if d.kind == "table":
                breaks += [x - d.lo for x in d.params["xs"]]
            if 0.0 < z.real - d.lo < span:
                breaks.append(z.real - d.lo)
            total += quadrature.integrate(g, breaks, tol)[0]
            continue
        u0 = u_of_x(z.real)
        upper = _tail_cutoff(g, tol / 10.0, 10.0 * (u0 + abs(z) ** 0.5 + 1.0))
        breaks = [0.0, upper]
        k = 1.0
        while k < upper:
            breaks.append(k)
            k *= 10.0
        if u0 > 0:
            w = abs(z.imag) / (2 * u0) if z.imag else 0.0
            breaks += [u0, max(u0 - w, 0.0), u0 + w]
        breaks = [b for b in breaks if 0.0 <= b <= upper]
        total += quadrature.integrate(g, breaks, tol)[0]
    return total


def evaluate_pick(spec: PickFunctionSpec, z: complex, quad_tol: float = QUAD_TOL) -> complex:
    """Evaluate ``phi(z)`` from its representing data.

    Raises
    ------
    PoleEvaluation
        If ``z`` hits an atom or the closed support of the density, or is a
        real point outside the excluded interval.
    QuadratureFailure
        If the adaptive quadrature cannot reach ``quad_tol``.
    """
    z = complex(z)
    _pole_check(spec, z)
    value = spec.alpha * z + spec.beta
    for atom in spec.atoms:
        value += atom.gamma / (atom.delta - z)
    if spec.density is not None:
        value += _density_integral(spec.density, z, quad_tol)
    if z.imag == 0.0:
        # conjugation symmetry makes phi real on the excluded interval
        value = complex(value.real, 0.0)
    return value


def sqrt_pick_spec() -> PickFunctionSpec:
    """Representation of the principal square root on the cut plane.

    ``alpha = 0``, ``beta = 1/sqrt(2)`` and density ``sqrt(-x)/pi`` on
    ``(-inf, 0]``; the function is real and increasing on ``(0, inf)``.
    """
    return PickFunctionSpec(0.0, 1.0 / math.sqrt(2.0), (), sqrt_neg_over_pi(), (0.0, math.inf))


def rational_pick_spec(alpha: float, beta: float, atoms: Sequence, excluded: Optional[tuple] = None) -> PickFunctionSpec:
    """``alpha z + beta + sum gamma_i / (delta_i - z)``."""
    return PickFunctionSpec(alpha, beta, tuple(atoms), None, excluded)


def pick_on_reals(spec: PickFunctionSpec, quad_tol: float = QUAD_TOL) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized real restriction of ``spec`` to its excluded interval."""
    def f(x):
        x = np.asarray(x, dtype=np.float64)
        return np.array([evaluate_pick(spec, complex(t), quad_tol).real for t in x.reshape(-1)]).reshape(x.shape)
    return f

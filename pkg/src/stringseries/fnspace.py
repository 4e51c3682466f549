"""Functions on an interval and the derivative estimators built on them.

A :class:`FunctionSpec` is either closed form (a vectorised callable) or a
set of samples on a uniform grid that includes both endpoints. Everything
downstream (extensions, decompositions, Fourier coefficients) consumes this
one type.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np
from numpy.polynomial import Polynomial

__all__ = [
    "SMOOTH",
    "Interval",
    "FunctionSpec",
    "BoundaryData",
    "UnreliableDerivativeError",
    "FUNCTIONS",
    "register",
    "make_function",
    "sample",
    "fd_weights",
    "one_sided_derivative",
    "fd_derivative",
    "sinpi",
    "cospi",
]

# claimed_smoothness used for analytic functions
SMOOTH = 99

Endpoint = Literal["left", "right"]

# 10 nodes: the base stencil is exact on polynomials of degree <= 9
_STENCIL_POINTS = 10
# sampled data: grid steps q, q/2, q/4, q/8
_SAMPLED_LEVELS = 4
# closed forms: steps L/18 down to L/288, evaluated in extended precision
_CLOSED_LEVELS = 5


class UnreliableDerivativeError(ArithmeticError):
    """Raised when Richardson extrapolation of a derivative does not settle."""

    def __init__(self, message: str, order: int, estimates=()):
        super().__init__(message)
        self.order = order
        self.estimates = tuple(estimates)


@dataclass(frozen=True)
class Interval:
    left: float
    right: float

    def __post_init__(self):
        if not (math.isfinite(self.left) and math.isfinite(self.right)):
            raise ValueError(f"interval endpoints must be finite, got {self}")
        if not self.left < self.right:
            raise ValueError(f"need left < right, got [{self.left}, {self.right}]")

    @property
    def length(self) -> float:
        return self.right - self.left

    def grid(self, n_points: int) -> np.ndarray:
        return np.linspace(self.left, self.right, n_points)

    def contains(self, x, slack: float = 0.0) -> bool:
        x = np.asarray(x)
        return bool(np.all((x >= self.left - slack) & (x <= self.right + slack)))


@dataclass(frozen=True, eq=False)
class FunctionSpec:
    """A real function on an interval.

    Exactly one of ``func`` (closed form) or ``values`` (uniform samples,
    endpoints included) is set. ``polynomial`` may accompany a closed form
    when the function is known to be a polynomial; it enables exact moment
    integrals in :mod:`stringseries.fourier`.

    ``claimed_smoothness`` is asserted by the caller and never verified
    globally.
    """

    domain: Interval
    func: Callable[[np.ndarray], np.ndarray] | None = None
    values: np.ndarray | None = None
    claimed_smoothness: int = 0
    polynomial: Polynomial | None = None
    label: str = ""

    def __post_init__(self):
        if (self.func is None) == (self.values is None):
            raise ValueError("give exactly one of func or values")
        if self.claimed_smoothness < 0:
            raise ValueError("claimed_smoothness must be >= 0")
        if self.values is not None:
            vals = np.array(self.values, dtype=float)
            if vals.ndim != 1 or vals.size < 9:
                raise ValueError("sampled functions need a 1-D array of at least 9 values")
            if not np.all(np.isfinite(vals)):
                bad = int(np.flatnonzero(~np.isfinite(vals))[0])
                raise ValueError(f"non-finite sample at index {bad}")
            vals.setflags(write=False)
            object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, func, domain: Interval, claimed_smoothness: int = SMOOTH,
                      label: str = "") -> FunctionSpec:
        return cls(domain, func=func, claimed_smoothness=claimed_smoothness, label=label)

    @classmethod
    def from_polynomial(cls, poly: Polynomial, domain: Interval, label: str = "") -> FunctionSpec:
        poly = Polynomial(np.asarray(poly.coef, dtype=float))
        return cls(domain, func=poly, claimed_smoothness=SMOOTH, polynomial=poly, label=label)

    @classmethod
    def from_samples(cls, values, domain: Interval, claimed_smoothness: int = 0,
                     label: str = "") -> FunctionSpec:
        return cls(domain, values=values, claimed_smoothness=claimed_smoothness, label=label)

    @property
    def is_sampled(self) -> bool:
        return self.values is not None

    @property
    def n_points(self) -> int | None:
        return None if self.values is None else self.values.size

    @property
    def grid(self) -> np.ndarray:
        if self.values is None:
            raise AttributeError("closed-form functions have no grid")
        return self.domain.grid(self.values.size)

    @property
    def spacing(self) -> float:
        return self.domain.length / (self.values.size - 1)

    def __call__(self, x):
        """Evaluate at ``x``; sampled functions interpolate linearly.

        Closed forms keep ``np.longdouble`` inputs in extended precision.
        """
        x = np.asarray(x)
        dtype = np.longdouble if x.dtype == np.longdouble else float
        x = x.astype(dtype, copy=False)
        if self.func is not None:
            out = np.asarray(self.func(x), dtype=dtype)
            return np.broadcast_to(out, x.shape).copy() if out.shape != x.shape else out
        return np.interp(x, self.grid, self.values)

    def samples(self, n_points: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(grid, values)``; closed forms are evaluated on a fresh grid."""
        if self.values is not None:
            return self.grid, np.array(self.values)
        x = self.domain.grid(n_points or 1025)
        return x, self(x)

    def with_domain(self, domain: Interval) -> FunctionSpec:
        return FunctionSpec(domain, func=self.func, values=self.values,
                            claimed_smoothness=self.claimed_smoothness,
                            polynomial=self.polynomial, label=self.label)


@dataclass(frozen=True)
class BoundaryData:
    """One-sided derivative of a given order at one endpoint."""

    endpoint: Endpoint
    order: int
    value: float

    def __post_init__(self):
        if self.endpoint not in ("left", "right"):
            raise ValueError(f"endpoint must be 'left' or 'right', got {self.endpoint!r}")
        if self.order < 0:
            raise ValueError("order must be >= 0")


# -- registry of closed forms ------------------------------------------------

FUNCTIONS: dict[str, Callable[..., FunctionSpec]] = {}


def register(name: str):
    def deco(builder):
        FUNCTIONS[name] = builder
        return builder
    return deco


def _domain(L: float, symmetric: bool) -> Interval:
    return Interval(-L if symmetric else 0.0, L)


@register("zero")
def _zero(L=1.0, symmetric=False):
    return FunctionSpec.from_polynomial(Polynomial([0.0]), _domain(L, symmetric), label="zero")


@register("poly")
def _poly(coefficients, L=1.0, symmetric=False):
    coefficients = [float(c) for c in coefficients]
    if not coefficients:
        raise ValueError("poly needs at least one coefficient")
    return FunctionSpec.from_polynomial(Polynomial(coefficients), _domain(L, symmetric),
                                        label=f"poly{coefficients}")


@register("bump")
def _bump(power=1, amplitude=1.0, L=1.0, symmetric=False):
    """amplitude * x**p * (L - x)**p"""
    p = int(power)
    if p < 1:
        raise ValueError("bump power must be >= 1")
    poly = amplitude * Polynomial([0.0, 1.0]) ** p * Polynomial([L, -1.0]) ** p
    return FunctionSpec.from_polynomial(poly, _domain(L, symmetric),
                                        label=f"{amplitude}*x^{p}(L-x)^{p}")


def _as_real(x) -> np.ndarray:
    """Float array, keeping extended precision when given."""
    x = np.asarray(x)
    return x if x.dtype == np.longdouble else x.astype(float, copy=False)


def sinpi(x):
    """sin(pi x), exact at integers and accurate to relative precision near them.

    The argument is reduced into [-1/2, 1/2] with subtractions that are exact
    in floating point, so round-off does not leak in near the zeros.
    """
    x = _as_real(x)
    r = np.remainder(x, 2.0)
    s = np.where(r <= 0.5, r, np.where(r < 1.5, 1.0 - r, r - 2.0))
    return np.sin(np.pi * s)


def cospi(x):
    """cos(pi x) via :func:`sinpi`, exact at half-integers."""
    x = _as_real(x)
    r = np.remainder(x, 2.0)
    s = np.where(r <= 1.0, 0.5 - r, r - 1.5)
    return sinpi(s)


@register("sine_mode")
def _sine_mode(mode=1, amplitude=1.0, L=1.0, symmetric=False):
    k = mode / L
    return FunctionSpec.from_callable(lambda x: amplitude * sinpi(k * x), _domain(L, symmetric),
                                      label=f"{amplitude}*sin({mode}pi x/L)")


@register("cosine_mode")
def _cosine_mode(mode=1, amplitude=1.0, L=1.0, symmetric=False):
    k = mode / L
    return FunctionSpec.from_callable(lambda x: amplitude * cospi(k * x), _domain(L, symmetric),
                                      label=f"{amplitude}*cos({mode}pi x/L)")


@register("one_minus_cos")
def _one_minus_cos(mode=1, amplitude=1.0, L=1.0, symmetric=False):
    """amplitude * (1 - cos(2 pi mode x / L))"""
    k = mode / L
    # 1 - cos(2a) = 2 sin(a)^2 keeps relative accuracy near the zeros
    return FunctionSpec.from_callable(lambda x: 2.0 * amplitude * sinpi(k * x) ** 2,
                                      _domain(L, symmetric),
                                      label=f"{amplitude}*(1-cos(2pi {mode} x/L))")


def make_function(name: str, L: float = 1.0, symmetric: bool = False, **params) -> FunctionSpec:
    """Build a closed-form function from the registry.

    >>> f = make_function("poly", coefficients=[0, 1, -1])
    >>> float(f(0.5))
    0.25
    """
    try:
        builder = FUNCTIONS[name]
    except KeyError:
        raise KeyError(f"unknown function {name!r}; known: {sorted(FUNCTIONS)}") from None
    return builder(L=L, symmetric=symmetric, **params)


# -- sampling and derivatives ------------------------------------------------

def sample(f: FunctionSpec, n_points: int) -> FunctionSpec:
    """Evaluate a closed-form function on a uniform grid including both endpoints."""
    if n_points < 9:
        raise ValueError("n_points must be >= 9")
    x = f.domain.grid(n_points)
    y = f(x)
    bad = ~np.isfinite(y)
    if bad.any():
        raise ValueError(f"non-finite value at x={float(x[bad][0])!r}")
    return FunctionSpec.from_samples(y, f.domain, f.claimed_smoothness, label=f.label)


def fd_weights(offsets, order: int, dtype=float) -> np.ndarray:
    """Finite-difference weights for the ``order``-th derivative at 0.

    Fornberg's recursion on arbitrary (distinct) node offsets measured in
    units of the step, carried out in ``dtype``.
    """
    x = np.asarray(offsets, dtype=dtype)
    n = x.size - 1
    if order > n:
        raise ValueError(f"{x.size} nodes cannot resolve derivative order {order}")
    c = np.zeros((n + 1, order + 1), dtype=dtype)
    c[0, 0] = 1.0
    c1, c4 = 1.0, x[0]
    for i in range(1, n + 1):
        mn = min(i, order)
        c2, c5, c4 = 1.0, c4, x[i]
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, order]


def _tableau(estimates: list[float], lead: int, safe: float = 2.0) -> tuple[float, float]:
    """Neville tableau over halving steps; best entry and its error estimate.

    ``lead`` is the leading truncation order of the raw estimates. Stops
    early once the diagonal grows by ``safe`` over the best error so far,
    the usual sign that round-off has taken over.
    """
    best, err = estimates[0], math.inf
    prev = [estimates[0]]
    for i in range(1, len(estimates)):
        row = [estimates[i]]
        for q in range(1, i + 1):
            fac = 2.0 ** (lead + q - 1)
            row.append((fac * row[q - 1] - prev[q - 1]) / (fac - 1.0))
            e = max(abs(row[q] - row[q - 1]), abs(row[q] - prev[q - 1]))
            if e <= err:
                best, err = row[q], e
        if abs(row[i] - prev[i - 1]) >= safe * err:
            break
        prev = row
    return best, err


def one_sided_derivative(f: FunctionSpec, endpoint: Endpoint, order: int,
                         rtol: float = 1e-3) -> float:
    """Estimate ``f^(order)`` from inside the domain at one endpoint.

    Closed forms use a 10-node one-sided stencil at five halving steps from
    h = length/18, combined by Richardson extrapolation. Nodes, weights and
    function values are carried in ``np.longdouble``, which keeps round-off
    out of fourth differences whenever the callable computes with numpy
    ufuncs (on platforms where longdouble is wider than double). The base
    stencil is exact for polynomials of degree <= 9. Sampled functions use
    the same scheme on grid multiples q, q/2, q/4, q/8.

    Raises:
        UnreliableDerivativeError: if the extrapolation error estimate exceeds
            ``rtol * max(1, |value|)``.
    """
    if endpoint not in ("left", "right"):
        raise ValueError(f"endpoint must be 'left' or 'right', got {endpoint!r}")
    if not 0 <= order <= 4:
        raise ValueError("supported derivative orders are 0..4")
    x0 = f.domain.left if endpoint == "left" else f.domain.right
    direction = 1.0 if endpoint == "left" else -1.0
    if order == 0:
        return float(f(x0)) if not f.is_sampled else float(f.values[0 if endpoint == "left" else -1])

    if f.is_sampled:
        nodes = np.arange(_STENCIL_POINTS)
        w = fd_weights(nodes, order)
        vals = f.values if endpoint == "left" else f.values[::-1]
        q = 8 * ((vals.size - 1) // (8 * (_STENCIL_POINTS - 1)))
        if q == 0:
            raise ValueError(f"need at least {8 * (_STENCIL_POINTS - 1) + 1} samples "
                             f"for one-sided derivatives, got {vals.size}")
        d = f.spacing
        estimates = []
        for step in (q >> i for i in range(_SAMPLED_LEVELS)):
            idx = (nodes * step).astype(int)
            estimates.append(float(np.dot(w, vals[idx])) / (direction * step * d) ** order)
    else:
        wide = np.longdouble
        nodes = np.arange(_STENCIL_POINTS, dtype=wide)
        w = fd_weights(nodes, order, dtype=wide)
        h = wide(f.domain.length) / (2 * (_STENCIL_POINTS - 1))
        estimates = []
        for _ in range(_CLOSED_LEVELS):
            y = f(wide(x0) + direction * nodes * h)
            estimates.append(float(np.dot(w, y) / (direction * h) ** order))
            h /= 2

    value, err = _tableau(estimates, _STENCIL_POINTS - order)
    if not math.isfinite(value) or err > rtol * max(1.0, abs(value)):
        raise UnreliableDerivativeError(
            f"unreliable derivative of order {order} at {endpoint} endpoint: "
            f"estimates {estimates}, error estimate {err:.3g}",
            order, estimates)
    return value


def fd_derivative(f: FunctionSpec, order: int) -> FunctionSpec:
    """Grid derivative of a sampled function, second-order accurate everywhere.

    Central stencils in the interior; at the ends the stencil shifts to
    ``order + 2`` consecutive nodes, which keeps the accuracy at two.
    """
    if not f.is_sampled:
        raise ValueError("fd_derivative needs a sampled function; call sample() first")
    if order not in (1, 2, 3, 4):
        raise ValueError("order must be in {1, 2, 3, 4}")
    y = f.values
    n = y.size
    width = order + 2 if order % 2 else order + 1
    if n < order + 2:
        raise ValueError(f"{n} points is too few for an order-{order} stencil")
    h = f.spacing
    r = width // 2
    out = np.empty(n)

    w = fd_weights(np.arange(-r, r + 1), order)
    interior = np.zeros(n - 2 * r)
    for j, wj in enumerate(w):
        interior += wj * y[j:n - 2 * r + j]
    out[r:n - r] = interior

    edge = order + 2
    for i in list(range(r)) + list(range(n - r, n)):
        start = min(max(i - r, 0), n - edge)
        idx = np.arange(start, start + edge)
        out[i] = np.dot(fd_weights(idx - i, order), y[idx])
    out /= h ** order
    return FunctionSpec.from_samples(out, f.domain, max(f.claimed_smoothness - order, 0),
                                     label=f"d{order}({f.label})")

"""Odd and even extensions from [0, L] to [-L, L], plus seam and parity checks.

The interval [-L, L] is treated with its endpoints identified, so an
extension has two seams: ``"0"`` and ``"L"`` (the latter joins x -> L from
below with x -> -L from above).

A note on parity: the derivative of an even function is odd. The even
extension's first derivative is therefore antisymmetric, whatever wording
one finds elsewhere; :func:`parity_check` tests exactly that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from numpy.polynomial import Polynomial

from .fnspace import (FunctionSpec, Interval, UnreliableDerivativeError,
                      one_sided_derivative)

__all__ = [
    "SeamReport",
    "ExtensionResult",
    "odd_extend",
    "even_extend",
    "combine",
    "add_branches",
    "seam_smoothness",
    "parity_check",
    "check_vanishing_ends",
]

Parity = Literal["odd", "even", "neither"]

ENDPOINT_ATOL = 1e-9
SEAM_TOL = 1e-5
MAX_SEAM_ORDER = 4


@dataclass(frozen=True)
class SeamReport:
    """Continuity verified at one seam.

    ``order`` is the largest k such that one-sided derivatives of orders
    0..k agree (-1 if even the values disagree). ``indeterminate_at`` is the
    first order whose estimate could not be trusted, if any.
    """

    seam: str
    order: int
    checked_through: int
    indeterminate_at: int | None = None
    mismatches: tuple[float, ...] = ()


@dataclass(frozen=True, eq=False)
class ExtensionResult:
    """A function on [-L, L] assembled from a branch on each half.

    ``right`` lives on [0, L] and ``left`` on [-L, 0]; each is smooth on its
    own closed half, which is what makes seam derivatives estimable.
    """

    right: FunctionSpec
    left: FunctionSpec
    parity: str
    seam_reports: dict[str, SeamReport] = field(default_factory=dict)

    @property
    def L(self) -> float:
        return self.right.domain.right

    @property
    def domain(self) -> Interval:
        return Interval(-self.L, self.L)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.empty(x.shape)
        pos = x >= 0
        out[pos] = self.right(x[pos])
        out[~pos] = self.left(x[~pos])
        return out

    @property
    def h(self) -> FunctionSpec:
        """The extension as a single closed-form function on [-L, L]."""
        smooth = min(self.right.claimed_smoothness, self.left.claimed_smoothness)
        if self.seam_reports:
            smooth = min([smooth] + [r.order for r in self.seam_reports.values()])
        return FunctionSpec.from_callable(self, self.domain, max(smooth, 0),
                                          label=f"{self.parity}({self.right.label})")

    @property
    def verified_order(self) -> int:
        """Smallest seam class over both seams, -1 if not yet checked."""
        if not self.seam_reports:
            return -1
        return min(r.order for r in self.seam_reports.values())

    def with_seams(self, max_order: int, tol: float = SEAM_TOL) -> ExtensionResult:
        return ExtensionResult(self.right, self.left, self.parity,
                               seam_smoothness(self, max_order, tol))


def check_vanishing_ends(f: FunctionSpec):
    """Raise ValueError unless f(0) and f(L) vanish (relative to max |f|)."""
    x = np.array([f.domain.left, f.domain.right])
    ends = f.values[[0, -1]] if f.is_sampled else f(x)
    _, vals = f.samples(257)
    scale = max(1.0, float(np.max(np.abs(vals))))
    if np.any(np.abs(ends) > ENDPOINT_ATOL * scale):
        raise ValueError(
            f"f must vanish at both endpoints to extend continuously; "
            f"got f({x[0]:g})={ends[0]:.3g}, f({x[1]:g})={ends[1]:.3g}")


def _mirror(f: FunctionSpec, sign: float) -> FunctionSpec:
    """The branch x -> sign * f(-x) on [-L, 0]."""
    L = f.domain.right
    dom = Interval(-L, 0.0)
    label = f"mirror({f.label})"
    if f.is_sampled:
        return FunctionSpec.from_samples(sign * f.values[::-1], dom, f.claimed_smoothness,
                                         label=label)
    if f.polynomial is not None:
        c = f.polynomial.coef
        flipped = Polynomial(sign * c * (-1.0) ** np.arange(c.size))
        return FunctionSpec.from_polynomial(flipped, dom, label=label)
    func = f.func
    return FunctionSpec.from_callable(lambda x: sign * func(-np.asarray(x)), dom,
                                      f.claimed_smoothness, label=label)


def _extend(f: FunctionSpec, sign: float, parity: str) -> ExtensionResult:
    if f.domain.left != 0.0:
        raise ValueError("extensions start from a function on [0, L]")
    check_vanishing_ends(f)
    ext = ExtensionResult(f, _mirror(f, sign), parity)
    return ext.with_seams(min(f.claimed_smoothness, MAX_SEAM_ORDER))


def odd_extend(f: FunctionSpec) -> ExtensionResult:
    """Extend by h(x) = -f(-x) on [-L, 0).

    Example:
        >>> from stringseries.fnspace import make_function
        >>> h = odd_extend(make_function("poly", coefficients=[0, 1, -1]))
        >>> float(h(-0.5))
        -0.25
    """
    return _extend(f, -1.0, "odd")


def even_extend(f: FunctionSpec) -> ExtensionResult:
    """Extend by h(x) = f(-x) on [-L, 0).

    f(0) = f(L) = 0 is still required, so that odd and even pieces can be
    summed into one continuous function.
    """
    return _extend(f, 1.0, "even")


def add_branches(p: FunctionSpec, q: FunctionSpec) -> FunctionSpec:
    """Pointwise sum of two functions on the same interval."""
    label = f"{p.label}+{q.label}"
    if p.polynomial is not None and q.polynomial is not None:
        return FunctionSpec.from_polynomial(p.polynomial + q.polynomial, p.domain, label)
    return FunctionSpec.from_callable(lambda x: p(x) + q(x), p.domain,
                                      min(p.claimed_smoothness, q.claimed_smoothness),
                                      label=label)


def combine(a: ExtensionResult, b: ExtensionResult, max_order: int | None = None,
            tol: float = SEAM_TOL) -> ExtensionResult:
    """Pointwise sum of two extensions, branch by branch."""
    if not math.isclose(a.L, b.L):
        raise ValueError("extensions live on different intervals")
    parity = a.parity if a.parity == b.parity else "mixed"
    out = ExtensionResult(add_branches(a.right, b.right), add_branches(a.left, b.left), parity)
    if max_order is None:
        max_order = min(out.right.claimed_smoothness, MAX_SEAM_ORDER)
    return out.with_seams(max_order, tol)


def seam_smoothness(h: ExtensionResult, max_order: int, tol: float = SEAM_TOL
                    ) -> dict[str, SeamReport]:
    """Verified continuity class at each seam.

    Orders 0..max_order are compared in turn; two estimates a, b agree when
    ``|a - b| <= tol * (1 + max(|a|, |b|))``.
    """
    if not 0 <= max_order <= MAX_SEAM_ORDER:
        raise ValueError(f"max_order must be in 0..{MAX_SEAM_ORDER}")
    sides = {
        # seam: (branch approached from the right, its endpoint,
        #        branch approached from the left, its endpoint)
        "0": (h.right, "left", h.left, "right"),
        "L": (h.left, "left", h.right, "right"),
    }
    reports = {}
    for seam, (upper, up_end, lower, low_end) in sides.items():
        order, indeterminate, mismatches = -1, None, []
        for k in range(max_order + 1):
            try:
                a = one_sided_derivative(upper, up_end, k)
                b = one_sided_derivative(lower, low_end, k)
            except UnreliableDerivativeError:
                indeterminate = k
                break
            gap = abs(a - b)
            mismatches.append(gap)
            if gap > tol * (1.0 + max(abs(a), abs(b))):
                break
            order = k
        reports[seam] = SeamReport(seam, order, max_order, indeterminate, tuple(mismatches))
    return reports


def parity_check(h, n_probe: int = 257, tol: float = 1e-12,
                 seed: int | None = None) -> tuple[Parity, float]:
    """Classify a function on [-L, L] as odd, even or neither.

    Returns the class and the deviation ``max |h(-x) -/+ h(x)|`` of the
    better-fitting parity. Sampled inputs are compared on their own grid
    (which is symmetric); closed forms are probed on ``n_probe`` points,
    optionally jittered with ``seed``.
    """
    if isinstance(h, ExtensionResult):
        h = h.h
    dom = h.domain
    if not math.isclose(dom.left, -dom.right):
        raise ValueError("parity needs a domain symmetric about 0")
    if h.is_sampled:
        v = h.values
        w = v[::-1]
    else:
        x = dom.grid(n_probe)
        if seed is not None:
            rng = np.random.default_rng(seed)
            x = x + rng.uniform(-0.5, 0.5, x.size) * dom.length / (n_probe - 1)
            x = np.clip(x, dom.left, dom.right)
        v, w = h(x), h(-x)
    odd_dev = float(np.max(np.abs(w + v)))
    even_dev = float(np.max(np.abs(w - v)))
    scale = max(1.0, float(np.max(np.abs(v))))
    if odd_dev <= tol * scale and odd_dev <= even_dev:
        return "odd", odd_dev
    if even_dev <= tol * scale:
        return "even", even_dev
    return "neither", min(odd_dev, even_dev)

"""Fourier coefficients, decay bounds and partial sums.

Conventions, fixed once for the whole package:

* complex coefficient on [-L, L]:
  ``c_m = 1/(2L) * integral_{-L}^{L} h(x) exp(-i pi m x / L) dx``
* sine coefficient on [0, L]:
  ``b_m = 2/L * integral_0^L f(x) sin(pi m x / L) dx``

For the odd extension h of f the two agree through ``c_m = -i b_m / 2``,
so writing ``c_m = i e_m`` gives ``b_m = -2 e_m``.

Integrals are computed by adaptive composite Simpson with at least
``8 |m|`` panels per half interval, refined by doubling until the
Simpson error estimate drops below ``tol * (1 + |value|)``. Polynomial
integrands can instead use exact trigonometric moments (``method="exact"``).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial
from scipy.integrate import simpson, trapezoid

from .extend import ExtensionResult
from .fnspace import FunctionSpec, Interval, cospi, fd_derivative, sample, sinpi

__all__ = [
    "QuadratureError",
    "DecayBound",
    "integrate",
    "trig_moment",
    "complex_coefficient",
    "complex_coefficients",
    "sine_coefficient",
    "sine_coefficients",
    "decay_bound",
    "sinpi",
    "cospi",
    "compensated_sum",
    "partial_sum",
    "uniform_error",
    "loglog_slope",
    "coefficient_table",
    "write_coefficient_csv",
]

QUAD_TOL = 1e-10
MAX_PANELS = 2 ** 21
BOUND_POINTS = 4097


class QuadratureError(ArithmeticError):
    """Adaptive quadrature did not meet its tolerance; ``trace`` holds
    ``(panels, value, error_estimate)`` for each refinement."""

    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = list(trace)


def _simpson_sum(y: np.ndarray, h: float):
    return h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum())


def integrate(func, a: float, b: float, min_panels: int = 16, tol: float = QUAD_TOL):
    """Adaptive composite Simpson; returns ``(value, error_estimate)``.

    Panels double until ``|S_2n - S_n| / 15 <= tol * (1 + |S_2n|)``. S_2n is
    returned as is: integrands whose odd derivatives vanish at the ends
    converge faster than h^4, and a Richardson step would overshoot.
    """
    n = max(16, min_panels + (min_panels % 2))
    x = np.linspace(a, b, n + 1)
    y = func(x)
    prev = _simpson_sum(y, (b - a) / n)
    trace = [(n, prev, math.inf)]
    while True:
        n *= 2
        # reuse the previous nodes; only midpoints are new
        mid = func(a + (b - a) * (np.arange(1, n, 2) / n))
        y2 = np.empty(n + 1, dtype=np.result_type(y, mid))
        y2[0::2] = y
        y2[1::2] = mid
        y = y2
        cur = _simpson_sum(y, (b - a) / n)
        err = abs(cur - prev) / 15.0
        trace.append((n, cur, err))
        if err <= tol * (1.0 + abs(cur)):
            return cur, err
        if n >= MAX_PANELS:
            raise QuadratureError(
                f"Simpson quadrature on [{a}, {b}] stalled at {n} panels (error {err:.3g})",
                trace)
        prev = cur


def trig_moment(poly: Polynomial, a: float, b: float, k: float) -> complex:
    """Exact ``integral_a^b p(x) exp(-i k x) dx`` for a polynomial p.

    Uses the antiderivative ``-exp(-ikx) * sum_j p^(j)(x) / (ik)^(j+1)``.
    """
    if k == 0.0:
        P = poly.integ()
        return complex(P(b) - P(a))
    total = 0j
    d = poly
    ik = 1j * k
    denom = ik
    for _ in range(poly.degree() + 1):
        total += (d(b) * np.exp(-ik * b) - d(a) * np.exp(-ik * a)) / denom
        d = d.deriv()
        denom *= ik
    return -total


def _branches(h) -> list[FunctionSpec]:
    """Pieces to integrate separately over [-L, L] (split at 0)."""
    if isinstance(h, ExtensionResult):
        return [h.left, h.right]
    if h.is_sampled:
        return [h]
    if not math.isclose(h.domain.left, -h.domain.right):
        raise ValueError("complex coefficients need a function on [-L, L]")
    L = h.domain.right
    return [h.with_domain(Interval(-L, 0.0)), h.with_domain(Interval(0.0, L))]


def _resolve_method(pieces, method: str) -> str:
    if method == "auto":
        return "exact" if all(p.polynomial is not None for p in pieces) else "quadrature"
    if method == "exact" and any(p.polynomial is None for p in pieces):
        raise ValueError("method='exact' needs polynomial pieces")
    if method not in ("exact", "quadrature"):
        raise ValueError(f"unknown method {method!r}")
    return method


def complex_coefficient(h, m: int, tol: float = QUAD_TOL, method: str = "quadrature") -> complex:
    """``c_m`` of a function on [-L, L] (a FunctionSpec or an ExtensionResult).

    Example:
        >>> from stringseries.fnspace import make_function
        >>> c = complex_coefficient(make_function("sine_mode", symmetric=True), 1)
        >>> round(c.imag, 12)
        -0.5
    """
    pieces = _branches(h)
    L = h.L if isinstance(h, ExtensionResult) else h.domain.right
    k = math.pi * m / L
    total = 0j
    if pieces[0].is_sampled:
        x = pieces[0].grid
        return complex(simpson(pieces[0].values * np.exp(-1j * k * x), x=x)) / (2 * L)
    if _resolve_method(pieces, method) == "exact":
        for p in pieces:
            total += trig_moment(p.polynomial, p.domain.left, p.domain.right, k)
        return complex(total / (2 * L))
    for p in pieces:
        value, _ = integrate(lambda x, p=p: p(x) * np.exp(-1j * k * x),
                             p.domain.left, p.domain.right, 8 * abs(m), tol)
        total += value
    return complex(total / (2 * L))


def complex_coefficients(h, modes, tol: float = QUAD_TOL, method: str = "quadrature") -> np.ndarray:
    return np.array([complex_coefficient(h, int(m), tol, method) for m in modes])


def sine_coefficient(f: FunctionSpec, m: int, tol: float = QUAD_TOL,
                     method: str = "quadrature") -> float:
    """``b_m = 2/L * integral_0^L f(x) sin(pi m x / L) dx``.

    Example:
        >>> from stringseries.fnspace import make_function
        >>> round(sine_coefficient(make_function("sine_mode"), 1), 12)
        1.0
    """
    if m < 1:
        raise ValueError("sine modes start at m = 1")
    if f.domain.left != 0.0:
        raise ValueError("sine coefficients need a function on [0, L]")
    L = f.domain.right
    k = math.pi * m / L
    if f.is_sampled:
        x = f.grid
        return 2.0 / L * float(simpson(f.values * np.sin(k * x), x=x))
    if _resolve_method([f], method) == "exact":
        return 2.0 / L * -trig_moment(f.polynomial, 0.0, L, k).imag
    value, _ = integrate(lambda x: f(x) * np.sin(k * x), 0.0, L, 8 * m, tol)
    return float(2.0 / L * value)


def sine_coefficients(f: FunctionSpec, M: int, tol: float = QUAD_TOL,
                      method: str = "quadrature") -> np.ndarray:
    """``b_1 .. b_M`` as an array (index m-1 holds mode m)."""
    if method == "exact" or (method == "auto" and f.polynomial is not None):
        if f.polynomial is None:
            raise ValueError("method='exact' needs a polynomial")
        return _sine_moments(f.polynomial, f.domain.right, M)
    return np.array([sine_coefficient(f, m, tol, method) for m in range(1, M + 1)])


def _sine_moments(poly: Polynomial, L: float, M: int) -> np.ndarray:
    """All exact sine coefficients of a polynomial at once.

    Integrating by parts twice per step, with sin(kL) = 0 and cos(kL) = (-1)^m:
    ``integral_0^L p sin(kx) dx = sum_j (-1)^j (p^(2j)(0) - (-1)^m p^(2j)(L)) / k^(2j+1)``.
    """
    m = np.arange(1, M + 1)
    k = math.pi * m / L
    cos_kL = np.where(m % 2, -1.0, 1.0)
    total = np.zeros(M)
    d = poly
    for j in range(poly.degree() // 2 + 1):
        total += (-1) ** j * (d(0.0) - cos_kL * d(L)) / k ** (2 * j + 1)
        d = d.deriv(2)
    return 2.0 / L * total


@dataclass(frozen=True)
class DecayBound:
    """``|c_m| <= C / m**n``; ``verified`` is False when the seam check did not
    confirm the smoothness the bound assumes."""

    n: int
    C: float
    verified: bool = True

    def __call__(self, m):
        m = np.asarray(m, dtype=float)
        return self.C / m ** self.n

    def tail(self, M: int) -> float:
        """Upper bound on ``sum_{|m| > M} C / |m|**n`` (needs n >= 2)."""
        if self.n < 2:
            return math.inf
        return 2.0 * self.C * M ** (1 - self.n) / (self.n - 1)


def _l1_norm_of_derivative(piece: FunctionSpec, n: int, n_points: int) -> float:
    s = sample(piece, n_points) if not piece.is_sampled else piece
    d = s if n == 0 else fd_derivative(s, n)
    return float(trapezoid(np.abs(d.values), d.grid))


def decay_bound(h, n: int, n_points: int = BOUND_POINTS) -> DecayBound:
    """The coefficient bound ``C = L^(n-1) ||h^(n)||_L1(-L,L) / (2 pi^n)``.

    The L1 norm comes from grid finite differences on ``n_points`` points.
    For an :class:`ExtensionResult` each half is differentiated on its own
    so that a seam never sits inside a stencil.
    """
    if not 0 <= n <= 4:
        raise ValueError("decay bounds are supported for n in 0..4")
    if isinstance(h, ExtensionResult):
        L = h.L
        half = (n_points + 1) // 2
        norm = sum(_l1_norm_of_derivative(p, n, half) for p in (h.left, h.right))
        verified = n == 0 or n <= h.verified_order
    else:
        L = h.domain.right
        norm = _l1_norm_of_derivative(h, n, n_points)
        verified = n <= h.claimed_smoothness
    C = L ** (n - 1) * norm / (2.0 * math.pi ** n)
    return DecayBound(n, C, verified)


def compensated_sum(terms, axis: int = -1) -> np.ndarray:
    """Sum along ``axis`` with compensation (math.fsum per row, or Neumaier)."""
    terms = np.moveaxis(np.asarray(terms, dtype=float), axis, -1)
    shape = terms.shape[:-1]
    rows = terms.reshape(-1, terms.shape[-1])
    if rows.shape[0] <= rows.shape[1]:
        out = np.array([math.fsum(r) for r in rows])
    else:
        s = np.zeros(rows.shape[0])
        c = np.zeros(rows.shape[0])
        for col in rows.T:
            t = s + col
            big = np.abs(s) >= np.abs(col)
            c += np.where(big, (s - t) + col, (col - t) + s)
            s = t
        out = s + c
    return out.reshape(shape) if shape else float(out[0])


def partial_sum(coeffs, M: int, x, L: float):
    """``sum_{m=1}^{M} b_m sin(pi m x / L)``."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.size < M:
        raise ValueError(f"need {M} coefficients, got {coeffs.size}")
    x = np.asarray(x, dtype=float)
    m = np.arange(1, M + 1)
    terms = coeffs[:M] * sinpi(np.multiply.outer(x, m) / L)
    return compensated_sum(terms)


def uniform_error(f: FunctionSpec, M: int, coeffs=None, n_points: int = 1025,
                  method: str = "quadrature") -> float:
    """Sup over a uniform grid of ``|f - S_M f|``."""
    if coeffs is None:
        coeffs = sine_coefficients(f, M, method=method)
    x = f.domain.grid(n_points)
    return float(np.max(np.abs(f(x) - partial_sum(coeffs, M, x, f.domain.right))))


def loglog_slope(modes, values, floor: float = 0.0) -> float:
    """Least-squares slope of log|value| against log(mode).

    Entries with ``|value| <= floor`` are skipped (structural zeros, e.g.
    even modes of a function symmetric about L/2).
    """
    modes = np.asarray(modes, dtype=float)
    values = np.abs(np.asarray(values))
    keep = values > floor
    if keep.sum() < 2:
        raise ValueError("need at least two nonzero values to fit a slope")
    slope, _ = np.polyfit(np.log(modes[keep]), np.log(values[keep]), 1)
    return float(slope)


def coefficient_table(ext: ExtensionResult, M: int, n: int | None = None,
                      tol: float = QUAD_TOL, method: str = "quadrature") -> dict[str, np.ndarray]:
    """Columns mode, value, bound, measured_ratio for m = 1..M.

    ``value`` is ``|c_m|`` of the extension, ``bound`` is ``C/m^n`` with n the
    verified seam class (capped at 4) unless given.
    """
    if n is None:
        n = min(max(ext.verified_order, 0), 4)
    modes = np.arange(1, M + 1)
    values = np.abs(complex_coefficients(ext, modes, tol, method))
    bound = decay_bound(ext, n)(modes)
    return {"mode": modes, "value": values, "bound": bound, "measured_ratio": values / bound}


def write_coefficient_csv(path, table: dict[str, np.ndarray], comments=()) -> None:
    """CSV with a header row and LF endings; leading ``#`` lines carry metadata."""
    with open(path, "w", newline="") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        w = csv.writer(fh, lineterminator="\n")
        cols = list(table)
        w.writerow(cols)
        for row in zip(*(table[c] for c in cols)):
            w.writerow([int(v) if c == "mode" else format(float(v), ".17g")
                        for c, v in zip(cols, row)])

"""Modal solution of the fixed-end string and its independent checks.

The displacement F(x, t) on [0, L] solves ``F_tt = (T/mu) F_xx`` with
``F(0, t) = F(L, t) = 0``. Each sine mode m evolves as

    A_m(t) = K_m cos(omega_m t) + S_m sin(omega_m t),
    omega_m = pi m c / L,  c = sqrt(T / mu),

with ``K_m`` the sine coefficients of the initial displacement and
``S_m = b_m(initial velocity) / omega_m``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.integrate import quad, trapezoid

from .extend import check_vanishing_ends, odd_extend
from .fnspace import FunctionSpec, cospi, sinpi
from .fourier import DecayBound, compensated_sum, decay_bound, loglog_slope, sine_coefficients

__all__ = [
    "WaveParams",
    "ModalAmplitudes",
    "EndpointTrace",
    "ConvergenceReport",
    "solve",
    "evaluate",
    "velocity",
    "dalembert_oracle",
    "residual",
    "endpoint_curvature_limit",
    "energy",
    "energy_by_quadrature",
    "convergence_report",
]

DEFAULT_MODES = 200


@dataclass(frozen=True)
class WaveParams:
    """Tension T, linear density mu and length L of the string."""

    T: float = 1.0
    mu: float = 1.0
    L: float = 1.0

    def __post_init__(self):
        for name in ("T", "mu", "L"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value}")

    @property
    def c(self) -> float:
        """Wave speed sqrt(T/mu)."""
        return math.sqrt(self.T / self.mu)

    @property
    def period(self) -> float:
        """2L/c, a common period of every mode."""
        return 2.0 * self.L / self.c

    def omega(self, m):
        return math.pi * np.asarray(m, dtype=float) * self.c / self.L


@dataclass(frozen=True, eq=False)
class ModalAmplitudes:
    """``cos_amplitudes[m-1] = K_m`` and ``sin_amplitudes[m-1] = S_m``."""

    params: WaveParams
    cos_amplitudes: np.ndarray
    sin_amplitudes: np.ndarray

    def __post_init__(self):
        if self.cos_amplitudes.shape != self.sin_amplitudes.shape:
            raise ValueError("amplitude arrays must have equal length")
        if not (np.all(np.isfinite(self.cos_amplitudes))
                and np.all(np.isfinite(self.sin_amplitudes))):
            raise ValueError("modal amplitudes must be finite")
        self.cos_amplitudes.setflags(write=False)
        self.sin_amplitudes.setflags(write=False)

    @property
    def M(self) -> int:
        return self.cos_amplitudes.size

    @property
    def modes(self) -> np.ndarray:
        return np.arange(1, self.M + 1)

    def truncated(self, M: int) -> ModalAmplitudes:
        if not 1 <= M <= self.M:
            raise ValueError(f"M must be in 1..{self.M}")
        return ModalAmplitudes(self.params, self.cos_amplitudes[:M].copy(),
                               self.sin_amplitudes[:M].copy())

    def phase(self, t):
        """``m c t / L`` with shape ``t.shape + (M,)``; omega_m t = pi * phase."""
        p = self.params
        return np.multiply.outer(np.asarray(t, dtype=float) * (p.c / p.L), self.modes)

    def time_factors(self, t) -> np.ndarray:
        """A_m(t), shape ``t.shape + (M,)``."""
        ph = self.phase(t)
        return self.cos_amplitudes * cospi(ph) + self.sin_amplitudes * sinpi(ph)

    def time_derivatives(self, t) -> np.ndarray:
        """A_m'(t), shape ``t.shape + (M,)``."""
        ph = self.phase(t)
        w = self.params.omega(self.modes)
        return w * (self.sin_amplitudes * cospi(ph) - self.cos_amplitudes * sinpi(ph))


def _check_initial(f: FunctionSpec, params: WaveParams, what: str):
    if f.domain.left != 0.0 or not math.isclose(f.domain.right, params.L):
        raise ValueError(f"{what} must live on [0, {params.L}], got {f.domain}")
    check_vanishing_ends(f)


def solve(f0: FunctionSpec, g0: FunctionSpec, params: WaveParams, M: int = DEFAULT_MODES,
          method: str = "auto") -> ModalAmplitudes:
    """Modal amplitudes for initial displacement f0 and velocity g0.

    Args:
        method: coefficient method passed to
            :func:`stringseries.fourier.sine_coefficients`; ``"auto"`` uses
            exact moments for polynomials and quadrature otherwise.

    Example:
        >>> from stringseries.fnspace import make_function
        >>> sol = solve(make_function("sine_mode"), make_function("zero"), WaveParams(), 3)
        >>> bool(np.allclose(sol.cos_amplitudes, [1.0, 0.0, 0.0], atol=1e-12))
        True
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    _check_initial(f0, params, "initial displacement")
    _check_initial(g0, params, "initial velocity")
    K = sine_coefficients(f0, M, method=method)
    S = sine_coefficients(g0, M, method=method) / params.omega(np.arange(1, M + 1))
    return ModalAmplitudes(params, K, S)


def _space_basis(sol: ModalAmplitudes, x) -> np.ndarray:
    return sinpi(np.multiply.outer(np.asarray(x, dtype=float) / sol.params.L, sol.modes))


def evaluate(sol: ModalAmplitudes, x, t) -> np.ndarray:
    """Truncated series F(x, t); x and t broadcast against each other.

    Example:
        >>> from stringseries.fnspace import make_function
        >>> sol = solve(make_function("sine_mode"), make_function("zero"), WaveParams(), 1)
        >>> float(evaluate(sol, 0.5, 0.5))
        0.0
    """
    x, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
    return compensated_sum(sol.time_factors(t) * _space_basis(sol, x))


def velocity(sol: ModalAmplitudes, x, t) -> np.ndarray:
    """Truncated series for F_t(x, t)."""
    x, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
    return compensated_sum(sol.time_derivatives(t) * _space_basis(sol, x))


def _odd_periodic(f: FunctionSpec, y: np.ndarray) -> np.ndarray:
    """Odd 2L-periodic extension of f evaluated at y."""
    L = f.domain.right
    r = np.remainder(y, 2.0 * L)
    r = np.where(r > L, r - 2.0 * L, r)  # now in (-L, L]
    return np.sign(r) * f(np.abs(r))


def _velocity_antiderivative(g0: FunctionSpec):
    """y -> integral_0^y of the odd 2L-periodic extension of g0.

    The extension is odd with zero mean over a period, so its antiderivative
    is even and 2L-periodic; only ``s -> integral_0^s g0`` on [0, L] is needed.
    """
    L = g0.domain.right
    if g0.polynomial is not None:
        prim = g0.polynomial.integ()
        base = lambda s: prim(s) - prim(0.0)  # noqa: E731
    else:
        base = np.vectorize(lambda s: quad(g0.func, 0.0, s, epsabs=1e-14, epsrel=1e-12,
                                           limit=200)[0])

    def G(y):
        r = np.remainder(y, 2.0 * L)
        r = np.where(r > L, 2.0 * L - r, r)  # even fold into [0, L]
        return base(r)

    return G


def dalembert_oracle(f0: FunctionSpec, g0: FunctionSpec, params: WaveParams, x, t) -> np.ndarray:
    """Traveling-wave solution, independent of the modal expansion.

    ``F = [h(x - ct) + h(x + ct)] / 2 + (G(x + ct) - G(x - ct)) / (2c)`` with
    h the odd 2L-periodic extension of f0 and G an antiderivative of the
    same extension of g0.
    """
    _check_initial(f0, params, "initial displacement")
    _check_initial(g0, params, "initial velocity")
    x, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
    c = params.c
    lo, hi = x - c * t, x + c * t
    out = 0.5 * (_odd_periodic(f0, lo) + _odd_periodic(f0, hi))
    if g0.polynomial is None or np.any(g0.polynomial.coef):
        G = _velocity_antiderivative(g0)
        out = out + (G(hi) - G(lo)) / (2.0 * c)
    return out


def residual(field_fn, x, t, h: float, params: WaveParams) -> float:
    """max |F_tt - (T/mu) F_xx| over the mesh, by central differences of step h.

    ``field_fn`` is a :class:`ModalAmplitudes` or any callable ``F(x, t)``.
    The mesh must stay at least h inside (0, L) in x.
    """
    F = (lambda a, b: evaluate(field_fn, a, b)) if isinstance(field_fn, ModalAmplitudes) else field_fn
    x, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
    if np.any(x - h < 0.0) or np.any(x + h > params.L):
        raise ValueError("residual mesh must lie at least h inside (0, L)")
    centre = 2.0 * F(x, t)
    f_tt = (F(x, t + h) - centre + F(x, t - h)) / h ** 2
    f_xx = (F(x + h, t) - centre + F(x - h, t)) / h ** 2
    return float(np.max(np.abs(f_tt - params.T / params.mu * f_xx)))


@dataclass(frozen=True)
class EndpointTrace:
    """F_xx next to each end: ``left[i] = F_xx(eps[i], t)``,
    ``right[i] = F_xx(L - eps[i], t)``."""

    t: float
    eps: tuple[float, ...]
    left: tuple[float, ...]
    right: tuple[float, ...]

    def pairs(self) -> list[tuple[float, float]]:
        return list(zip(self.eps, self.left))

    def fitted_slope_bound(self) -> float:
        """Smallest K with ``|F_xx| <= K eps`` at both ends over the trace."""
        eps = np.asarray(self.eps)
        return float(max(np.max(np.abs(self.left) / eps), np.max(np.abs(self.right) / eps)))


def endpoint_curvature_limit(sol: ModalAmplitudes, t: float, eps_list) -> EndpointTrace:
    """Analytic modal F_xx at distance eps from each end.

    Uses ``F_xx = -sum_m A_m(t) (pi m / L)^2 sin(pi m x / L)`` term by term, so
    no finite-difference noise enters. A truncated series resolves the limit
    only for eps well above L/M.
    """
    eps = np.asarray(eps_list, dtype=float)
    if eps.ndim != 1 or eps.size == 0:
        raise ValueError("eps_list must be a non-empty 1-D sequence")
    if np.any(np.diff(eps) >= 0):
        raise ValueError("eps_list must be strictly decreasing")
    L = sol.params.L
    if np.any(eps <= 0) or np.any(eps >= L):
        raise ValueError("eps must lie in (0, L)")
    weights = sol.time_factors(t) * (math.pi * sol.modes / L) ** 2
    left = -compensated_sum(weights * _space_basis(sol, eps))
    right = -compensated_sum(weights * _space_basis(sol, L - eps))
    return EndpointTrace(float(t), tuple(eps.tolist()), tuple(np.atleast_1d(left).tolist()),
                         tuple(np.atleast_1d(right).tolist()))


def energy(sol: ModalAmplitudes, t) -> np.ndarray:
    """``E(t) = integral_0^L (mu F_t^2 + T F_x^2) / 2 dx`` from the modal form.

    Orthogonality gives ``(L/4) sum_m [mu A_m'^2 + T (pi m / L)^2 A_m^2]``.
    """
    p = sol.params
    k2 = (math.pi * sol.modes / p.L) ** 2
    terms = p.mu * sol.time_derivatives(t) ** 2 + p.T * k2 * sol.time_factors(t) ** 2
    return p.L / 4.0 * compensated_sum(terms)


def energy_by_quadrature(sol: ModalAmplitudes, t: float, n_points: int = 4097) -> float:
    """Same energy by trapezoid quadrature of the series for F_t and F_x."""
    p = sol.params
    x = np.linspace(0.0, p.L, n_points)
    ft = velocity(sol, x, t)
    k = math.pi * sol.modes / p.L
    cos_basis = cospi(np.multiply.outer(x / p.L, sol.modes))
    fx = compensated_sum(sol.time_factors(t) * k * cos_basis)
    return float(trapezoid(0.5 * (p.mu * ft ** 2 + p.T * fx ** 2), x))


@dataclass
class ConvergenceReport:
    """Diagnostics aligned by truncation order."""

    truncations: list[int]
    sup_errors: list[float]
    residual_maxima: list[float]
    endpoint_traces: list[dict] = field(default_factory=list)
    decay_slopes: dict[str, float] = field(default_factory=dict)
    tail_bounds: list[float] = field(default_factory=list)
    energy_drift: float = 0.0
    metadata: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True, default=float)


def convergence_report(f0: FunctionSpec, g0: FunctionSpec, params: WaveParams,
                       truncations, eps_list, times=(0.0, 0.3, 1.7),
                       mesh=(65, 17), residual_step: float = 1e-3) -> ConvergenceReport:
    """Run the modal solution at each truncation against the oracle.

    ``sup_errors[i]`` is the max difference from :func:`dalembert_oracle` on
    an ``nx`` by ``nt`` mesh over [0, L] x [0, 2L/c]; ``residual_maxima[i]`` the
    finite-difference PDE residual on the interior of that mesh. Tail bounds
    add the decay bounds of the odd extensions of f0 and g0 at their verified
    smoothness orders; they are infinite when an order is too low to sum.
    """
    truncations = sorted(int(m) for m in truncations)
    full = solve(f0, g0, params, truncations[-1])
    nx, nt = mesh
    x = np.linspace(0.0, params.L, nx)
    t = np.linspace(0.0, params.period, nt)
    X, Tm = np.meshgrid(x, t)
    reference = dalembert_oracle(f0, g0, params, X, Tm)
    inner = slice(1, -1)
    sup, res, tails = [], [], []
    ext = odd_extend(f0)
    order = max(ext.verified_order, 0)
    bound = decay_bound(ext, min(order, 4)) if order >= 2 else None
    # S_m = b_m(g0) / omega_m gains one power of m over the g0 bound
    g_order = min(max(odd_extend(g0).verified_order, 0), 4)
    if g_order >= 1:
        g_bound = decay_bound(odd_extend(g0), g_order)
        g_bound = DecayBound(g_order + 1, g_bound.C * params.L / (math.pi * params.c))
    else:
        g_bound = None
    for M in truncations:
        sol = full.truncated(M)
        sup.append(float(np.max(np.abs(evaluate(sol, X, Tm) - reference))))
        res.append(residual(sol, X[:, inner], Tm[:, inner], residual_step, params))
        # sum_{m>M} |b_m| = sum_{|m|>M} |c_m| for an odd extension
        tail = bound.tail(M) if bound is not None else math.inf
        tails.append(tail + (g_bound.tail(M) if g_bound is not None else math.inf))
    traces = []
    for tt in times:
        tr = endpoint_curvature_limit(full, tt, eps_list)
        traces.append({"t": tr.t, "eps": list(tr.eps), "left": list(tr.left),
                       "right": list(tr.right), "K": tr.fitted_slope_bound()})
    modes = full.modes
    window = (modes >= 8) & (modes <= min(128, full.M))
    slopes = {}
    if window.sum() >= 2:
        K = np.abs(full.cos_amplitudes[window])
        # skip modes that vanish by symmetry
        floor = 1e-12 * K.max()
        if np.count_nonzero(K > floor) >= 2:
            slopes["displacement"] = loglog_slope(modes[window], K, floor=floor)
    e = energy(full, t)
    drift = float(np.max(np.abs(e - e[0])) / max(abs(e[0]), 1e-300))
    return ConvergenceReport(truncations, sup, res, traces, slopes, tails, drift,
                             {"seam_order": order})

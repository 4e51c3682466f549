"""The acceptance suite: eleven end-to-end checks with fixed tolerances.

Each check returns a :class:`CriterionResult`; :func:`run_all` runs them in
order. The CLI ``verify`` command and ``tests/test_acceptance.py`` both use
this module, so the two can never disagree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.special import zeta

from .decompose import (build_boundary_matrix, boundary_polynomial, compose_extension,
                        decompose, influence_coefficients)
from .fnspace import BoundaryData, FunctionSpec, make_function, one_sided_derivative
from .fourier import complex_coefficients, decay_bound, loglog_slope, uniform_error
from .wave import (WaveParams, dalembert_oracle, endpoint_curvature_limit, energy, evaluate,
                   residual, solve)

__all__ = ["CriterionResult", "CRITERIA", "run_all", "exact_boundary_polynomial",
           "odd_cube_tail"]


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    measured: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        details = ", ".join(f"{k}={_fmt(v)}" for k, v in self.measured.items())
        return f"[{status}] {self.number:2d}. {self.title}: {details}"


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.3g}"
    return str(v)


def _test_functions() -> dict[str, FunctionSpec]:
    return {
        "x(1-x)": make_function("poly", coefficients=[0, 1, -1]),
        "sin(pi x)": make_function("sine_mode"),
        "x^3(1-x)^3": make_function("bump", power=3),
    }


def odd_cube_tail(M: int) -> float:
    """``sum_{odd m > M} m^-3`` via the Hurwitz zeta function."""
    first = M + 1 if M % 2 == 0 else M + 2
    return float(zeta(3, first / 2.0)) / 8.0


def exact_boundary_polynomial(left, right, n: int, L: Fraction) -> list[Fraction]:
    """Reference solve in rational arithmetic (Gauss-Jordan on Fractions).

    Unknowns are the coefficients of x^0 .. x^(4n+1); conditions are the
    derivatives of orders 0..2n at 0 and at L, with ``left[k-1]`` and
    ``right[k-1]`` the targets for order 2k and zero for every other order.
    """
    size = 2 * (2 * n + 1)
    rows = []
    for end, x, targets in ((0, Fraction(0), left), (1, Fraction(L), right)):
        for j in range(2 * n + 1):
            # d^j/dx^j x^p = p!/(p-j)! x^(p-j); Fraction(0) ** 0 == 1
            row = [Fraction(math.perm(p, j)) * x ** (p - j) if p >= j else Fraction(0)
                   for p in range(size)]
            rhs = Fraction(targets[j // 2 - 1]) if j > 0 and j % 2 == 0 else Fraction(0)
            rows.append(row + [rhs])
    for col in range(size):
        pivot = next(r for r in range(col, size) if rows[r][col] != 0)
        rows[col], rows[pivot] = rows[pivot], rows[col]
        pv = rows[col][col]
        rows[col] = [v / pv for v in rows[col]]
        for r in range(size):
            if r != col and rows[r][col] != 0:
                fac = rows[r][col]
                rows[r] = [a - fac * b for a, b in zip(rows[r], rows[col])]
    return [rows[i][-1] for i in range(size)]


def criterion_1() -> CriterionResult:
    worst = 0.0
    for L in (0.5, 1.0, 2.0, 3.0):
        det = build_boundary_matrix(1, L).determinant
        worst = max(worst, abs(det - 2 * L ** 3) / (2 * L ** 3))
    return CriterionResult(1, "boundary matrix determinant 2L^3", worst <= 1e-10,
                           {"max_rel_error": worst})


def criterion_2() -> CriterionResult:
    x = np.linspace(0.0, 1.0, 1025)
    sum_err = deriv_err = 0.0
    for f in _test_functions().values():
        for n in (1, 2):
            parts = decompose(f, n)
            sum_err = max(sum_err, float(np.max(np.abs(parts.f1(x) + parts.f2(x) - f(x)))))
            for end in ("left", "right"):
                for k in range(2, 2 * n + 1, 2):
                    deriv_err = max(deriv_err, abs(one_sided_derivative(parts.f2, end, k)))
    # x(1-x), n = 1: targets f''(0) = f''(1) = -2, solved in rationals
    ref = exact_boundary_polynomial([-2], [-2], 1, Fraction(1))
    got = decompose(_test_functions()["x(1-x)"], 1).f1.coef
    got = np.pad(got, (0, len(ref) - got.size))
    closed_form = [0, 0, -1, 2, -1, 0]
    poly_err = max(float(np.max(np.abs(got - np.array(ref, dtype=float)))),
                   max(abs(float(r) - c) for r, c in zip(ref, closed_form)))
    ok = sum_err <= 1e-10 and deriv_err <= 1e-6 and poly_err <= 1e-9
    return CriterionResult(2, "decomposition identity", ok,
                           {"sum_error": sum_err, "f2_even_derivs": deriv_err,
                            "f1_vs_exact": poly_err})


def criterion_3() -> CriterionResult:
    x = np.linspace(0.0, 1.0, 1025)
    classes = {}
    restrict = 0.0
    ok = True
    for name, f in _test_functions().items():
        for n in (1, 2):
            ext = compose_extension(f, n, tol=1e-4)
            classes[f"{name},n={n}"] = ext.verified_order
            ok &= ext.verified_order >= 2 * n
            restrict = max(restrict, float(np.max(np.abs(ext(x) - f(x)))))
    ok &= restrict == 0.0
    return CriterionResult(3, "extension seam class", ok,
                           {"min_class_n1": min(v for k, v in classes.items() if k.endswith("1")),
                            "min_class_n2": min(v for k, v in classes.items() if k.endswith("2")),
                            "restriction_error": restrict})


def criterion_4() -> CriterionResult:
    ext = compose_extension(_test_functions()["x(1-x)"], 2)
    modes = np.arange(1, 257)
    values = np.abs(complex_coefficients(ext, modes))
    bound = decay_bound(ext, 4)
    ratio = float(np.max(values / bound(modes)))
    window = (modes >= 8) & (modes <= 128)
    slope = loglog_slope(modes[window], values[window])
    ok = ratio <= 1.0 and slope <= -3.7 and bound.verified
    return CriterionResult(4, "coefficient decay bound", ok,
                           {"C": bound.C, "max_ratio_to_bound": ratio, "slope_8_128": slope})


def criterion_5() -> CriterionResult:
    f = _test_functions()["x(1-x)"]
    errors = {M: uniform_error(f, M) for M in (9, 99)}
    bounds = {M: 8 / math.pi ** 3 * odd_cube_tail(M) for M in (9, 99)}
    single = uniform_error(_test_functions()["sin(pi x)"], 1)
    ok = (all(errors[M] <= bounds[M] for M in errors) and errors[99] < errors[9]
          and single <= 1e-12)
    return CriterionResult(5, "uniform convergence", ok,
                           {"err9": errors[9], "bound9": bounds[9], "err99": errors[99],
                            "bound99": bounds[99], "single_mode": single})


def _mesh(params: WaveParams, nx: int = 65, nt: int = 17):
    x = np.linspace(0.0, params.L, nx)
    t = np.linspace(0.0, params.period, nt)
    return np.meshgrid(x, t)


def criterion_6() -> CriterionResult:
    params = WaveParams(1.0, 1.0, 1.0)
    sol = solve(_test_functions()["sin(pi x)"], make_function("zero"), params, 8)
    X, T = _mesh(params)
    err = float(np.max(np.abs(evaluate(sol, X, T) - np.cos(np.pi * T) * np.sin(np.pi * X))))
    return CriterionResult(6, "single-mode exactness", err <= 1e-12, {"max_error": err})


def criterion_7() -> CriterionResult:
    params = WaveParams()
    f0, g0 = _test_functions()["x^3(1-x)^3"], make_function("zero")
    sol = solve(f0, g0, params, 200)
    X, T = _mesh(params)
    err = float(np.max(np.abs(evaluate(sol, X, T) - dalembert_oracle(f0, g0, params, X, T))))
    return CriterionResult(7, "modal series vs traveling-wave oracle", err <= 1e-6,
                           {"max_difference": err})


def criterion_8() -> CriterionResult:
    h = 1e-3
    worst = 0.0
    params = WaveParams()
    X, T = _mesh(params)
    for name in ("x^3(1-x)^3", "sin(pi x)", "x(1-x)"):
        sol = solve(_test_functions()[name], make_function("zero"), params, 200)
        worst = max(worst, residual(sol, X[:, 1:-1], T[:, 1:-1], h, params))
    # negative control: a static parabola is not a solution
    params = WaveParams(2.0, 0.5, 1.0)
    X, T = _mesh(params)
    static = residual(lambda x, t: x * (params.L - x) + 0.0 * t, X[:, 1:-1], T[:, 1:-1], h,
                      params)
    control_err = abs(static - 2 * params.T / params.mu)
    ok = worst <= 1e-4 and control_err <= 1e-6
    return CriterionResult(8, "PDE residual", ok,
                           {"max_residual": worst, "static_residual": static,
                            "control_error": control_err})


def criterion_9() -> CriterionResult:
    params = WaveParams()
    zero = make_function("zero")
    eps = np.logspace(-1, -4, 13)
    smooth = _test_functions()["x^3(1-x)^3"]
    sol, sol2 = solve(smooth, zero, params, 200), solve(smooth, zero, params, 400)
    K, drift = 0.0, 0.0
    for t in (0.0, 0.3, 1.7):
        k1 = endpoint_curvature_limit(sol, t, eps).fitted_slope_bound()
        k2 = endpoint_curvature_limit(sol2, t, eps).fitted_slope_bound()
        K = max(K, k1)
        # K must not grow with truncation, else the linear bound is an artifact
        drift = max(drift, abs(k2 - k1) / k1)
    # incompatible data: the trace settles at f''(0+) = -2
    rough = solve(_test_functions()["x(1-x)"], zero, params, 200_000)
    trace = endpoint_curvature_limit(rough, 0.0, [1e-1, 3e-2, 1e-2])
    gap = max(abs(v + 2.0) for v in trace.left + trace.right)
    ok = drift <= 0.05 and gap <= 1e-3
    return CriterionResult(9, "endpoint curvature limit", ok,
                           {"fitted_K": K, "K_drift_M200_M400": drift,
                            "x(1-x)_trace_gap_to_-2": gap})


def criterion_10(seed: int = 20240617) -> CriterionResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    tables = {}
    for _ in range(20):
        n = int(rng.integers(1, 3))
        L = float(rng.choice([0.5, 1.0, 2.0]))
        left, right = rng.normal(size=n), rng.normal(size=n)
        table = tables.setdefault((n, L), influence_coefficients(n, L))
        rebuilt = table.coefficients(left, right)
        data = [BoundaryData("left", 2 * k, left[k - 1]) for k in range(1, n + 1)]
        data += [BoundaryData("right", 2 * k, right[k - 1]) for k in range(1, n + 1)]
        direct = boundary_polynomial(data, n, L).coef
        direct = np.pad(direct, (0, rebuilt.size - direct.size))
        worst = max(worst, float(np.max(np.abs(rebuilt - direct))))
    return CriterionResult(10, "influence-table reconstruction", worst <= 1e-9,
                           {"max_coef_difference": worst})


def criterion_11() -> CriterionResult:
    cases = []
    for params in (WaveParams(), WaveParams(2.0, 0.5, 1.0), WaveParams(1.0, 4.0, 2.0)):
        L = params.L
        zero = make_function("zero", L=L)
        for name in ("sine_mode", "poly", "bump"):
            kw = {"poly": {"coefficients": [0, L, -1]}, "bump": {"power": 3}}.get(name, {})
            f = make_function(name, L=L, **kw)
            cases.append((f, zero, params))
            cases.append((zero, f, params))
        cases.append((make_function("bump", L=L, power=3), make_function("sine_mode", L=L),
                      params))
    worst = 0.0
    for f0, g0, params in cases:
        sol = solve(f0, g0, params, 200)
        e = energy(sol, np.linspace(0.0, params.period, 101))
        worst = max(worst, float(np.max(np.abs(e - e[0])) / abs(e[0])))
    return CriterionResult(11, "energy conservation", worst <= 1e-8,
                           {"solutions": len(cases), "max_rel_drift": worst})


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11]


def run_all() -> list[CriterionResult]:
    return [check() for check in CRITERIA]

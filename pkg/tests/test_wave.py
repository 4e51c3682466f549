import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stringseries.fnspace import FunctionSpec, Interval, make_function
from stringseries.wave import (ModalAmplitudes, WaveParams, convergence_report,
                               dalembert_oracle, endpoint_curvature_limit, energy,
                               energy_by_quadrature, evaluate, residual, solve, velocity)

ZERO = make_function("zero")
SINE = make_function("sine_mode")
BUMP = make_function("bump", power=3)
PARABOLA = make_function("poly", coefficients=[0, 1, -1])


def mesh(params, nx=33, nt=9):
    return np.meshgrid(np.linspace(0, params.L, nx), np.linspace(0, params.period, nt))


class TestParams:
    def test_derived_quantities(self):
        p = WaveParams(4.0, 1.0, 2.0)
        assert p.c == 2.0
        assert p.period == 2.0
        assert p.omega(3) == pytest.approx(3 * math.pi)

    @pytest.mark.parametrize("bad", [{"T": 0.0}, {"mu": -1.0}, {"L": math.nan},
                                     {"L": math.inf}])
    def test_rejects_invalid(self, bad):
        with pytest.raises(ValueError):
            WaveParams(**bad)


class TestSolve:
    def test_single_mode_closed_form(self):
        p = WaveParams(2.0, 0.5, 1.0)
        sol = solve(SINE, ZERO, p, 5)
        X, T = mesh(p)
        np.testing.assert_allclose(evaluate(sol, X, T),
                                   np.cos(2 * math.pi * T) * np.sin(math.pi * X), atol=1e-13)

    def test_velocity_only(self):
        # F = sin(pi x) sin(pi c t) / (pi c) for g0 = sin(pi x)
        p = WaveParams()
        sol = solve(ZERO, SINE, p, 4)
        X, T = mesh(p)
        np.testing.assert_allclose(evaluate(sol, X, T),
                                   np.sin(math.pi * X) * np.sin(math.pi * T) / math.pi,
                                   atol=1e-13)
        np.testing.assert_allclose(velocity(sol, X, T),
                                   np.sin(math.pi * X) * np.cos(math.pi * T), atol=1e-13)

    def test_boundary_values_are_exactly_zero(self):
        p = WaveParams(1.0, 1.0, 2.0)
        sol = solve(make_function("bump", power=2, L=2.0), make_function("zero", L=2.0), p, 64)
        t = np.linspace(0, 5, 23)
        assert np.all(evaluate(sol, 0.0, t) == 0.0)
        assert np.all(evaluate(sol, 2.0, t) == 0.0)

    def test_periodic_in_time(self):
        p = WaveParams(3.0, 1.0, 1.0)
        sol = solve(BUMP, PARABOLA, p, 60)
        x = np.linspace(0, 1, 17)
        np.testing.assert_allclose(evaluate(sol, x, 0.37), evaluate(sol, x, 0.37 + p.period),
                                   atol=1e-13)

    def test_initial_data_reproduced(self):
        sol = solve(BUMP, ZERO, WaveParams(), 200)
        x = np.linspace(0, 1, 65)
        np.testing.assert_allclose(evaluate(sol, x, 0.0), BUMP(x), atol=1e-9)

    def test_truncation(self):
        sol = solve(BUMP, ZERO, WaveParams(), 20)
        short = sol.truncated(5)
        assert short.M == 5
        np.testing.assert_array_equal(short.cos_amplitudes, sol.cos_amplitudes[:5])
        with pytest.raises(ValueError):
            sol.truncated(21)

    def test_amplitudes_read_only_and_finite(self):
        sol = solve(SINE, ZERO, WaveParams(), 3)
        with pytest.raises(ValueError):
            sol.cos_amplitudes[0] = 2.0
        with pytest.raises(ValueError):
            ModalAmplitudes(WaveParams(), np.array([np.nan]), np.array([0.0]))

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            solve(SINE, ZERO, WaveParams(), 0)
        with pytest.raises(ValueError):
            solve(SINE, ZERO, WaveParams(L=2.0), 4)
        with pytest.raises(ValueError, match="vanish"):
            solve(make_function("cosine_mode"), ZERO, WaveParams(), 4)


class TestOracle:
    @pytest.mark.parametrize("f0,g0", [(BUMP, ZERO), (ZERO, BUMP), (BUMP, SINE)])
    def test_matches_modal_series(self, f0, g0):
        p = WaveParams(2.0, 0.5, 1.0)
        sol = solve(f0, g0, p, 300)
        X, T = mesh(p)
        np.testing.assert_allclose(evaluate(sol, X, T), dalembert_oracle(f0, g0, p, X, T),
                                   atol=1e-8)

    def test_non_polynomial_velocity_uses_quadrature(self):
        g0 = FunctionSpec.from_callable(lambda x: np.sin(np.pi * x) ** 3, Interval(0, 1))
        p = WaveParams()
        X, T = mesh(p, 9, 5)
        # sin^3 = (3 sin(pi x) - sin(3 pi x)) / 4
        exact = (3 * np.sin(np.pi * X) * np.sin(np.pi * T) / np.pi
                 - np.sin(3 * np.pi * X) * np.sin(3 * np.pi * T) / (3 * np.pi)) / 4
        np.testing.assert_allclose(dalembert_oracle(ZERO, g0, p, X, T), exact, atol=1e-11)

    def test_half_period_reflection(self):
        # after L/c the displacement is -f0(L - x)
        p = WaveParams()
        f0 = make_function("poly", coefficients=[0, 2, -3, 1])  # x(1-x)(2-x)
        x = np.linspace(0, 1, 21)
        np.testing.assert_allclose(dalembert_oracle(f0, ZERO, p, x, 1.0), -f0(1 - x),
                                   atol=1e-14)


class TestResidual:
    def test_single_mode_is_small(self):
        p = WaveParams()
        X, T = mesh(p)
        sol = solve(SINE, ZERO, p, 1)
        assert residual(sol, X[:, 1:-1], T[:, 1:-1], 1e-3, p) <= 1e-5

    def test_static_parabola_control(self):
        # F = x(L - x) has F_tt = 0 and F_xx = -2, so the residual is 2 T / mu
        p = WaveParams(3.0, 2.0, 1.0)
        X, T = mesh(p)
        r = residual(lambda x, t: x * (1 - x) + 0 * t, X[:, 1:-1], T[:, 1:-1], 1e-3, p)
        assert r == pytest.approx(3.0, rel=1e-6)

    def test_mesh_must_be_interior(self):
        p = WaveParams()
        with pytest.raises(ValueError):
            residual(solve(SINE, ZERO, p, 1), 0.0, 0.0, 1e-3, p)


class TestEndpointTrace:
    def test_single_mode_curvature(self):
        sol = solve(SINE, ZERO, WaveParams(), 1)
        eps = [0.1, 0.01, 0.001]
        tr = endpoint_curvature_limit(sol, 0.0, eps)
        np.testing.assert_allclose(tr.left, -math.pi ** 2 * np.sin(math.pi * np.array(eps)),
                                   rtol=1e-12)
        np.testing.assert_allclose(tr.right, tr.left, rtol=1e-10)
        assert tr.fitted_slope_bound() == pytest.approx(math.pi ** 3, rel=1e-3)
        assert tr.pairs()[0] == (0.1, tr.left[0])

    @pytest.mark.parametrize("eps", [[], [0.1, 0.2], [0.5, 0.0], [[0.1]]])
    def test_rejects_bad_eps(self, eps):
        with pytest.raises(ValueError):
            endpoint_curvature_limit(solve(SINE, ZERO, WaveParams(), 1), 0.0, eps)


class TestEnergy:
    def test_single_mode_value(self):
        # (L/4) T pi^2 for F = sin(pi x) cos(pi t)
        sol = solve(SINE, ZERO, WaveParams(), 1)
        np.testing.assert_allclose(energy(sol, [0.0, 0.4]), math.pi ** 2 / 4, rtol=1e-14)

    def test_against_quadrature(self):
        p = WaveParams(2.0, 0.5, 1.0)
        sol = solve(BUMP, SINE, p, 100)
        for t in (0.0, 0.31):
            assert energy(sol, t) == pytest.approx(energy_by_quadrature(sol, t), rel=1e-9)

    @settings(max_examples=15, deadline=None)
    @given(st.floats(0.25, 4.0), st.floats(0.25, 4.0), st.floats(0.0, 10.0))
    def test_conserved(self, T, mu, t):
        p = WaveParams(T, mu, 1.0)
        sol = solve(BUMP, PARABOLA, p, 80)
        assert energy(sol, t) == pytest.approx(energy(sol, 0.0), rel=1e-12)


class TestReport:
    def test_alignment_and_json(self):
        p = WaveParams()
        rep = convergence_report(BUMP, ZERO, p, [50, 10, 100], [0.1, 0.01], times=(0.0, 0.5))
        assert rep.truncations == [10, 50, 100]
        assert len(rep.sup_errors) == len(rep.residual_maxima) == len(rep.tail_bounds) == 3
        assert rep.sup_errors[2] < rep.sup_errors[0]
        # the tail bound dominates the observed truncation error
        assert all(e <= b for e, b in zip(rep.sup_errors, rep.tail_bounds))
        assert len(rep.endpoint_traces) == 2
        assert rep.decay_slopes["displacement"] <= -3.5
        assert rep.energy_drift <= 1e-12
        data = json.loads(rep.to_json())
        assert data["metadata"]["seam_order"] == 3

    def test_velocity_tail_bound(self):
        rep = convergence_report(ZERO, BUMP, WaveParams(2.0, 0.5, 1.0), [4, 16], [0.1])
        assert all(0 < e <= b < math.inf for e, b in zip(rep.sup_errors, rep.tail_bounds))

    def test_rough_displacement_has_no_tail_bound(self):
        # the odd extension of x(1-x) is only class 1, too rough to sum C/m
        rep = convergence_report(PARABOLA, ZERO, WaveParams(), [10], [0.1])
        assert rep.tail_bounds == [math.inf]

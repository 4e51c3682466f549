import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial import Polynomial

from stringseries.fnspace import (FUNCTIONS, BoundaryData, FunctionSpec, Interval,
                                  UnreliableDerivativeError, cospi, fd_derivative, fd_weights,
                                  make_function, one_sided_derivative, sample, sinpi)

X = sp.symbols("x")


def exact_derivative(expr, order, at):
    return float(sp.diff(expr, X, order).subs(X, at))


class TestInterval:
    def test_length_and_grid(self):
        iv = Interval(-1.0, 3.0)
        assert iv.length == 4.0
        assert iv.grid(5).tolist() == [-1.0, 0.0, 1.0, 2.0, 3.0]

    @pytest.mark.parametrize("left,right", [(1.0, 1.0), (2.0, 1.0), (0.0, math.inf)])
    def test_rejects_bad_bounds(self, left, right):
        with pytest.raises(ValueError):
            Interval(left, right)

    def test_contains(self):
        iv = Interval(0.0, 1.0)
        assert iv.contains([0.0, 0.5, 1.0])
        assert not iv.contains(1.0 + 1e-9)
        assert iv.contains(1.0 + 1e-9, slack=1e-8)


class TestFunctionSpec:
    def test_needs_exactly_one_representation(self):
        with pytest.raises(ValueError):
            FunctionSpec(Interval(0, 1))
        with pytest.raises(ValueError):
            FunctionSpec(Interval(0, 1), func=np.sin, values=np.zeros(9))

    def test_sampled_validation(self):
        with pytest.raises(ValueError, match="at least 9"):
            FunctionSpec.from_samples(np.zeros(8), Interval(0, 1))
        vals = np.zeros(10)
        vals[4] = np.nan
        with pytest.raises(ValueError, match="index 4"):
            FunctionSpec.from_samples(vals, Interval(0, 1))

    def test_samples_are_read_only_copies(self):
        src = np.linspace(0, 1, 11)
        f = FunctionSpec.from_samples(src, Interval(0, 1))
        src[0] = 5.0
        assert f.values[0] == 0.0
        with pytest.raises(ValueError):
            f.values[0] = 1.0

    def test_sampled_evaluation_interpolates(self):
        f = FunctionSpec.from_samples(np.linspace(0, 2, 9), Interval(0, 1))
        assert f(0.3) == pytest.approx(0.6)
        assert f.spacing == pytest.approx(0.125)
        assert f.n_points == 9

    def test_closed_form_broadcasts_constants(self):
        f = FunctionSpec.from_callable(lambda x: 3.0, Interval(0, 1))
        assert f(np.zeros(4)).tolist() == [3.0] * 4

    def test_closed_form_keeps_extended_precision(self):
        f = make_function("poly", coefficients=[0, 1, -1])
        assert f(np.array([0.5], dtype=np.longdouble)).dtype == np.longdouble
        assert f(np.array([0.5])).dtype == np.float64

    def test_grid_only_for_samples(self):
        with pytest.raises(AttributeError):
            make_function("sine_mode").grid

    def test_with_domain_keeps_polynomial(self):
        f = make_function("bump", power=2)
        g = f.with_domain(Interval(-1, 1))
        assert g.polynomial is f.polynomial
        assert g.domain == Interval(-1, 1)


class TestBoundaryData:
    def test_validates(self):
        with pytest.raises(ValueError):
            BoundaryData("middle", 1, 0.0)
        with pytest.raises(ValueError):
            BoundaryData("left", -1, 0.0)


class TestRegistry:
    def test_known_names(self):
        assert {"zero", "poly", "bump", "sine_mode", "cosine_mode",
                "one_minus_cos"} <= set(FUNCTIONS)

    def test_unknown_name(self):
        with pytest.raises(KeyError, match="unknown function"):
            make_function("nope")

    def test_bump_matches_closed_form(self):
        f = make_function("bump", power=3, amplitude=2.0, L=2.0)
        x = np.linspace(0, 2, 17)
        np.testing.assert_allclose(f(x), 2 * x ** 3 * (2 - x) ** 3, atol=1e-12)

    def test_symmetric_domain(self):
        f = make_function("sine_mode", symmetric=True, L=2.0)
        assert f.domain == Interval(-2.0, 2.0)

    def test_one_minus_cos(self):
        f = make_function("one_minus_cos", mode=2, amplitude=0.5)
        x = np.linspace(0, 1, 33)
        np.testing.assert_allclose(f(x), 0.5 * (1 - np.cos(4 * np.pi * x)), atol=1e-15)

    def test_bump_rejects_nonpositive_power(self):
        with pytest.raises(ValueError):
            make_function("bump", power=0)


class TestTrig:
    def test_exact_zeros(self):
        assert np.all(sinpi(np.arange(-5.0, 6.0)) == 0.0)
        assert np.all(cospi(np.arange(-5.0, 6.0) + 0.5) == 0.0)

    def test_agrees_with_numpy(self):
        x = np.linspace(-4, 4, 2001)
        np.testing.assert_allclose(sinpi(x), np.sin(np.pi * x), atol=2e-15)
        np.testing.assert_allclose(cospi(x), np.cos(np.pi * x), atol=2e-15)

    def test_relative_accuracy_near_zero_crossing(self):
        d = 1e-12
        assert sinpi(1.0 - d) == pytest.approx(math.pi * d, rel=1e-10)


class TestSample:
    def test_sample_grid(self):
        s = sample(make_function("poly", coefficients=[0, 1]), 11)
        np.testing.assert_allclose(s.values, np.linspace(0, 1, 11))

    def test_sample_reports_bad_point(self):
        f = FunctionSpec.from_callable(lambda x: np.where(x == 0.5, np.nan, x), Interval(0, 1))
        with pytest.raises(ValueError, match="x=0.5"):
            sample(f, 11)

    def test_too_few_points(self):
        with pytest.raises(ValueError):
            sample(make_function("zero"), 5)


class TestFdWeights:
    def test_central_second_difference(self):
        np.testing.assert_allclose(fd_weights([-1, 0, 1], 2), [1, -2, 1])

    def test_one_sided_first_difference(self):
        np.testing.assert_allclose(fd_weights([0, 1, 2], 1), [-1.5, 2.0, -0.5])

    def test_too_few_nodes(self):
        with pytest.raises(ValueError):
            fd_weights([0, 1], 2)

    @given(st.integers(1, 4), st.integers(0, 9))
    def test_exact_on_monomials(self, order, degree):
        nodes = np.arange(10)
        w = fd_weights(nodes, order)
        expected = math.perm(degree, order) * 0.0 ** (degree - order) if degree >= order else 0.0
        powers = nodes.astype(float) ** degree
        scale = np.dot(np.abs(w), powers)
        assert abs(np.dot(w, powers) - expected) <= 1e-13 * scale


class TestOneSidedDerivative:
    def test_quadratic_examples(self):
        f = make_function("poly", coefficients=[0, 1, -1])
        assert one_sided_derivative(f, "left", 1) == pytest.approx(1.0, abs=1e-12)
        assert one_sided_derivative(f, "right", 1) == pytest.approx(-1.0, abs=1e-12)
        assert one_sided_derivative(f, "left", 2) == pytest.approx(-2.0, abs=1e-10)

    def test_sine_third_derivative(self):
        f = make_function("sine_mode")
        assert one_sided_derivative(f, "left", 3) == pytest.approx(-math.pi ** 3, rel=1e-9)

    @pytest.mark.parametrize("name,expr", [
        ("sine_mode", sp.sin(sp.pi * X)),
        ("one_minus_cos", 1 - sp.cos(2 * sp.pi * X)),
        ("bump", X ** 3 * (1 - X) ** 3),
    ])
    @pytest.mark.parametrize("order", [1, 2, 3, 4])
    def test_against_symbolic(self, name, expr, order):
        kw = {"power": 3} if name == "bump" else {}
        f = make_function(name, **kw)
        for end, at in (("left", 0), ("right", 1)):
            exact = exact_derivative(expr, order, at)
            got = one_sided_derivative(f, end, order)
            assert abs(got - exact) <= 1e-6 * (1 + abs(exact))

    def test_order_zero_is_value(self):
        f = make_function("poly", coefficients=[2, 1])
        assert one_sided_derivative(f, "right", 0) == 3.0

    def test_sampled_input(self):
        s = sample(make_function("sine_mode"), 2049)
        assert one_sided_derivative(s, "left", 1) == pytest.approx(math.pi, rel=1e-8)
        assert one_sided_derivative(s, "right", 2) == pytest.approx(0.0, abs=1e-6)

    def test_sampled_needs_enough_points(self):
        s = sample(make_function("sine_mode"), 33)
        with pytest.raises(ValueError, match="at least"):
            one_sided_derivative(s, "left", 1)

    def test_noisy_samples_are_rejected(self):
        rng = np.random.default_rng(3)
        x = np.linspace(0, 1, 1025)
        s = FunctionSpec.from_samples(np.sin(np.pi * x) + 1e-3 * rng.normal(size=x.size),
                                      Interval(0, 1), 4)
        with pytest.raises(UnreliableDerivativeError) as info:
            one_sided_derivative(s, "left", 4)
        assert info.value.order == 4
        assert len(info.value.estimates) == 4

    def test_rejects_bad_arguments(self):
        f = make_function("sine_mode")
        with pytest.raises(ValueError):
            one_sided_derivative(f, "middle", 1)
        with pytest.raises(ValueError):
            one_sided_derivative(f, "left", 5)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.floats(-3, 3), min_size=1, max_size=10), st.integers(1, 4),
           st.sampled_from(["left", "right"]))
    def test_polynomials_up_to_degree_nine(self, coef, order, end):
        p = Polynomial(coef)
        f = FunctionSpec.from_polynomial(p, Interval(0.0, 1.0))
        exact = p.deriv(order)(0.0 if end == "left" else 1.0)
        scale = 1 + np.abs(p.deriv(order).coef).sum()
        assert abs(one_sided_derivative(f, end, order) - exact) <= 1e-9 * scale


class TestFdDerivative:
    def test_second_order_accuracy_constant(self):
        # central differences: error h^2 |f''''| / 12, and |f''''| <= pi^4
        h = 1e-2
        s = sample(make_function("sine_mode"), 101)
        d = fd_derivative(s, 2)
        err = np.max(np.abs(d.values + math.pi ** 2 * np.sin(math.pi * d.grid)))
        assert err <= 1.001 * math.pi ** 4 / 12 * h ** 2

    @pytest.mark.parametrize("order", [1, 2, 3, 4])
    def test_converges_at_second_order(self, order):
        exact = {1: lambda x: math.pi * np.cos(math.pi * x),
                 2: lambda x: -math.pi ** 2 * np.sin(math.pi * x),
                 3: lambda x: -math.pi ** 3 * np.cos(math.pi * x),
                 4: lambda x: math.pi ** 4 * np.sin(math.pi * x)}[order]
        errs = []
        for n in (201, 401):
            d = fd_derivative(sample(make_function("sine_mode"), n), order)
            errs.append(np.max(np.abs(d.values - exact(d.grid))))
        assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.15)

    def test_requires_samples(self):
        with pytest.raises(ValueError):
            fd_derivative(make_function("sine_mode"), 1)

    def test_smoothness_drops(self):
        s = sample(make_function("sine_mode"), 65)
        assert fd_derivative(s, 2).claimed_smoothness == s.claimed_smoothness - 2

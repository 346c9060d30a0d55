import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinglass import NumericFailure, SeedSpec, expect_gauss, gauss_hermite_rule, psi
from spinglass.numerics import DEFAULT_ORDER


class TestGaussHermiteRule:
    def test_order_one_is_the_mean(self):
        rule = gauss_hermite_rule(1)
        assert rule.nodes.tolist() == [0.0]
        assert rule.weights.tolist() == [1.0]

    @pytest.mark.parametrize("order", [2, 5, 21, 101, 512])
    def test_weights_sum_to_one(self, order):
        rule = gauss_hermite_rule(order)
        assert abs(rule.weights.sum() - 1.0) < 1e-12
        # extreme-node weights underflow to 0 at high order; none may be negative
        assert np.all(rule.weights >= 0)

    @pytest.mark.parametrize("order", [2, 5, 21, 101, 512])
    def test_nodes_symmetric_about_zero(self, order):
        nodes = gauss_hermite_rule(order).nodes
        assert np.allclose(np.sort(nodes), np.sort(-nodes), atol=1e-12)

    def test_gaussian_moments(self):
        rule = gauss_hermite_rule(21)
        assert abs(expect_gauss(lambda z: z, rule)) < 1e-12
        assert abs(expect_gauss(lambda z: z**2, rule) - 1.0) < 1e-10
        assert abs(expect_gauss(lambda z: z**3, rule)) < 1e-12
        assert abs(expect_gauss(lambda z: z**4, rule) - 3.0) < 1e-10

    @pytest.mark.parametrize("order", [0, -1, 513])
    def test_order_out_of_range(self, order):
        with pytest.raises(ValueError, match="order"):
            gauss_hermite_rule(order)

    def test_rules_are_cached(self):
        assert gauss_hermite_rule(33) is gauss_hermite_rule(33)


class TestExpectGauss:
    def test_constant(self):
        assert expect_gauss(lambda z: np.ones_like(z), gauss_hermite_rule(7)) == pytest.approx(1.0)

    def test_odd_integrands_vanish(self):
        rule = gauss_hermite_rule(51)
        assert abs(expect_gauss(lambda z: z, rule)) < 1e-12
        assert abs(expect_gauss(np.tanh, rule)) < 1e-12

    def test_non_finite_integrand_raises(self):
        rule = gauss_hermite_rule(21)
        with pytest.raises(NumericFailure, match="non-finite"):
            expect_gauss(lambda z: np.where(z > 0, np.inf, 0.0), rule)


class TestPsi:
    def test_zero_argument(self):
        assert psi(0.0) == 0.0

    def test_negative_argument_rejected(self):
        with pytest.raises(ValueError, match="nonnegative"):
            psi(-0.1)

    def test_saturates_at_large_argument(self):
        assert psi(25.0) > 0.999

    def test_range_and_monotone(self):
        grid = [0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0]
        values = [psi(g) for g in grid]
        assert all(0 < v < 1 for v in values)
        assert all(a < b for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("gamma", [0.1, 0.5, 1.0, 2.0, 5.0])
    def test_first_moment_equals_second_moment(self, gamma):
        # E tanh(g + sqrt(g) z) = E tanh^2(g + sqrt(g) z) for z ~ N(0,1):
        # the defining identity of the Bayes-optimal temperature
        rule = gauss_hermite_rule(DEFAULT_ORDER)
        root = math.sqrt(gamma)
        second = expect_gauss(lambda z: np.tanh(gamma + root * z) ** 2, rule)
        assert abs(psi(gamma) - second) < 1e-10

    def test_matches_monte_carlo(self):
        rng = SeedSpec(314, 0).generator()
        z = rng.standard_normal(10_000_000)
        gamma = 1.3
        mc = float(np.mean(np.tanh(gamma + math.sqrt(gamma) * z)))
        se = float(np.std(np.tanh(gamma + math.sqrt(gamma) * z))) / math.sqrt(z.size)
        assert abs(psi(gamma) - mc) < 3 * se

    @given(st.floats(min_value=1e-6, max_value=50.0))
    @settings(max_examples=30, deadline=None)
    def test_values_in_unit_interval(self, gamma):
        assert 0.0 < psi(gamma) < 1.0


class TestSeedSpec:
    def test_same_spec_reproduces_identical_stream(self):
        a = SeedSpec(7, 3).generator().standard_normal(100)
        b = SeedSpec(7, 3).generator().standard_normal(100)
        assert np.array_equal(a, b)

    def test_distinct_streams_differ(self):
        a = SeedSpec(7, 0).generator().standard_normal(100)
        b = SeedSpec(7, 1).generator().standard_normal(100)
        assert not np.array_equal(a, b)

    def test_stream_derivation(self):
        spec = SeedSpec(9, 0)
        assert spec.stream(4) == SeedSpec(9, 4)
        assert spec.stream(4) is not spec

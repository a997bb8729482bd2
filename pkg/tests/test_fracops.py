import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracivp.fracops import (
    PowerSum,
    SampledFunction,
    rl_derivative,
    rl_integral,
    rl_integral_sampled,
)
from fracivp.specfun import gamma

orders = st.floats(min_value=0.05, max_value=0.95)

# coefficients bounded away from the 1e-15 pruning threshold
coefficients = st.tuples(
    st.sampled_from((-1.0, 1.0)), st.floats(min_value=1e-3, max_value=3.0)
).map(lambda sc: sc[0] * sc[1])


def power_sum_strategy(min_exponent: float) -> st.SearchStrategy:
    return st.lists(
        st.tuples(coefficients, st.floats(min_value=min_exponent, max_value=5.0)),
        min_size=1,
        max_size=5,
    ).map(PowerSum)


power_sums = power_sum_strategy(-0.9)

# exponents keeping mu - a > -1, so rl_derivative stays representable
derivable_power_sums = power_sum_strategy(0.05)


class TestPowerSum:
    def test_merge_and_sort(self):
        p = PowerSum([(2.0, 1.0), (1.0, 0.0), (3.0, 1.0)])
        assert p.terms == ((1.0, 0.0), (5.0, 1.0))

    def test_zero_coefficients_dropped(self):
        assert PowerSum([(1.0, 2.0), (-1.0, 2.0)]).terms == ()

    def test_integrability_guard(self):
        with pytest.raises(ValueError):
            PowerSum([(1.0, -1.0)])
        with pytest.raises(ValueError):
            PowerSum([(1.0, -1.5)])

    def test_evaluation(self):
        p = PowerSum([(1.0, 0.0), (2.0, 2.0)])
        assert p(3.0) == pytest.approx(19.0, rel=1e-15)
        assert p.value_at_zero() == 1.0
        assert PowerSum([(2.0, 0.5)]).value_at_zero() == 0.0
        assert PowerSum([(2.0, -0.5)]).value_at_zero() == math.inf


class TestExactOperators:
    def test_integral_of_one(self):
        for a in (0.3, 0.5, 0.7):
            p = rl_integral(PowerSum([(1.0, 0.0)]), a)
            assert p.terms == ((pytest.approx(1.0 / gamma(1.0 + a), rel=1e-14), a),)

    def test_integral_of_x_against_quadrature_oracle(self):
        # independent oracle: direct numerical integration of
        # (1/Gamma(1/2)) * int_0^1 s (1-s)^(-1/2) ds at 50 digits
        mpmath.mp.dps = 50
        oracle = float(
            mpmath.quad(lambda s: s * (1 - s) ** mpmath.mpf("-0.5"), [0, 1])
            / mpmath.gamma(mpmath.mpf("0.5"))
        )
        p = rl_integral(PowerSum([(1.0, 1.0)]), 0.5)
        assert float(p(1.0)) == pytest.approx(oracle, rel=1e-13)
        assert float(p(1.0)) == pytest.approx(0.752252778063675, rel=1e-13)

    def test_integral_of_zero(self):
        assert rl_integral(PowerSum([]), 0.5).terms == ()

    def test_derivative_of_constant(self):
        d = rl_derivative(PowerSum([(1.0, 0.0)]), 0.5)
        assert d.terms == ((pytest.approx(1.0 / gamma(0.5), rel=1e-14), -0.5),)

    def test_derivative_remark_expansion(self):
        # D^a[1 + x^2] = x^(-a)/Gamma(1-a) + 2 x^(2-a)/Gamma(3-a)
        a = 0.5
        d = rl_derivative(PowerSum([(1.0, 0.0), (1.0, 2.0)]), a)
        (c0, e0), (c1, e1) = d.terms
        assert (c0, e0) == (pytest.approx(1.0 / gamma(1.0 - a), rel=1e-14), -a)
        assert (c1, e1) == (pytest.approx(2.0 / gamma(3.0 - a), rel=1e-14), 2.0 - a)

    def test_half_derivative_of_sqrt(self):
        d = rl_derivative(PowerSum([(1.0, 0.5)]), 0.5)
        assert d.terms == ((pytest.approx(0.88622692545275801, rel=1e-13), 0.0),)

    def test_annihilates_critical_power(self):
        # D^a[x^(a-1)] = 0
        for a in (0.3, 0.5, 0.7):
            assert rl_derivative(PowerSum([(2.0, a - 1.0)]), a).terms == ()

    def test_termwise_matches_numeric_derivative_path(self):
        # cross-check D^a against d/dx I^(1-a) computed numerically:
        # product-integrate the samples, then centered differences.
        a = 0.4
        p = PowerSum([(1.0, 1.3), (0.5, 2.0)])
        grid = np.linspace(0.0, 1.0, 4097)
        tail = rl_integral_sampled(SampledFunction(grid, p(grid)), 1.0 - a)
        h = grid[1] - grid[0]
        numeric = (tail.values[2:] - tail.values[:-2]) / (2.0 * h)
        exact = rl_derivative(p, a)(grid[1:-1])
        interior = slice(200, -1)
        err = np.max(np.abs(numeric[interior] - exact[interior]))
        assert err < 1e-4

    @given(p=power_sums, a=orders)
    @settings(max_examples=150, deadline=None)
    def test_composition_identity(self, p, a):
        q = rl_derivative(rl_integral(p, a), a)
        assert len(q.terms) == len(p.terms)
        for (c1, e1), (c2, e2) in zip(p.terms, q.terms):
            assert c2 == pytest.approx(c1, rel=1e-11, abs=1e-13)
            assert e2 == pytest.approx(e1, abs=1e-11)

    @given(p=derivable_power_sums, q=derivable_power_sums, a=orders)
    @settings(max_examples=80, deadline=None)
    def test_linearity(self, p, q, a):
        for op in (rl_integral, rl_derivative):
            lhs = op(p + q, a)
            rhs = op(p, a) + op(q, a)
            xs = np.array([0.25, 0.7, 1.3])
            assert np.allclose(lhs(xs), rhs(xs), rtol=1e-12, atol=1e-12)


class TestSampledIntegral:
    def test_exact_on_constants(self):
        grid = np.linspace(0.0, 1.0, 65)
        for a in (0.3, 0.5, 0.7):
            out = rl_integral_sampled(SampledFunction(grid, np.ones_like(grid)), a)
            assert np.max(np.abs(out.values - grid**a / gamma(1.0 + a))) < 1e-12

    def test_exact_on_linears(self):
        grid = np.linspace(0.0, 1.0, 65)
        for a in (0.3, 0.5, 0.7):
            out = rl_integral_sampled(SampledFunction(grid, grid), a)
            ref = gamma(2.0) / gamma(2.0 + a) * grid ** (1.0 + a)
            assert np.max(np.abs(out.values - ref)) < 1e-12

    def test_second_order_on_smooth(self):
        errs = []
        for n in (33, 65, 129):
            grid = np.linspace(0.0, 1.0, n)
            out = rl_integral_sampled(SampledFunction(grid, grid**2), 0.5)
            ref = gamma(3.0) / gamma(3.5) * grid**2.5
            errs.append(np.max(np.abs(out.values - ref)))
        orders_measured = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
        assert min(orders_measured) >= 1.9

    def test_validation(self):
        with pytest.raises(ValueError):
            SampledFunction(np.array([0.1, 0.2]), np.array([1.0, 1.0]))
        with pytest.raises(ValueError):
            SampledFunction(np.array([0.0, 0.2, 0.1]), np.array([1.0, 1.0, 1.0]))
        with pytest.raises(ValueError):
            SampledFunction(np.array([0.0, 0.2]), np.array([1.0]))
        with pytest.raises(ValueError):
            SampledFunction(np.array([0.0, 0.2]), np.array([1.0, math.nan]))

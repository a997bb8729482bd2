import math

import mpmath
import numpy as np
import pytest

from fracivp.specfun import QuadratureRule, beta, gamma, jacobi_rule

A_GRID = (0.1, 0.25, 0.5, 0.75, 0.9)


class TestGamma:
    def test_factorials(self):
        assert gamma(1.0) == pytest.approx(1.0, rel=1e-15)
        assert gamma(5.0) == pytest.approx(24.0, rel=1e-14)

    def test_half(self):
        assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)

    def test_against_high_precision_oracle(self):
        # 50-digit reference; frozen spot value plus a sweep of the whole
        # contract range [1e-3, 50].
        assert gamma(1.7) == pytest.approx(0.90863873285329045, rel=1e-13)
        mpmath.mp.dps = 50
        zs = np.concatenate(
            [np.logspace(-3, 0, 120), np.linspace(1.0, 50.0, 240)]
        )
        for z in zs:
            ref = float(mpmath.gamma(mpmath.mpf(repr(float(z)))))
            assert gamma(float(z)) == pytest.approx(ref, rel=1e-13)

    def test_recurrence_identity(self):
        for z in np.linspace(0.01, 29.99, 100):
            assert gamma(z + 1.0) == pytest.approx(z * gamma(z), rel=1e-12)

    @pytest.mark.parametrize("bad", [0.0, -1.0, -0.5, math.nan, math.inf])
    def test_domain(self, bad):
        with pytest.raises(ValueError):
            gamma(bad)


class TestBeta:
    def test_trivial(self):
        assert beta(1.0, 1.0) == pytest.approx(1.0, rel=1e-14)

    def test_reflection_half(self):
        assert beta(0.5, 0.5) == pytest.approx(math.pi, rel=1e-13)

    def test_reflection_quarter(self):
        # B(1-a, a) = pi/sin(pi a) at a = 1/4
        assert beta(0.75, 0.25) == pytest.approx(4.442882938158366, rel=1e-13)

    def test_symmetry(self):
        for p, q in [(0.3, 2.2), (1.7, 0.9), (4.0, 0.1)]:
            assert beta(p, q) == pytest.approx(beta(q, p), rel=1e-13)

    @pytest.mark.parametrize("p,q", [(0.0, 1.0), (1.0, 0.0), (-1.0, 2.0)])
    def test_domain(self, p, q):
        with pytest.raises(ValueError):
            beta(p, q)


class TestJacobiRule:
    @pytest.mark.parametrize("a", A_GRID)
    def test_single_node(self, a):
        rule = jacobi_rule(a, 1)
        # first moment ratio B(2-a,a)/B(1-a,a) = 1-a
        assert rule.nodes[0] == pytest.approx(1.0 - a, abs=1e-14)
        assert rule.weights[0] == pytest.approx(beta(1.0 - a, a), rel=1e-13)

    def test_total_mass_half(self):
        rule = jacobi_rule(0.5, 8)
        assert rule.weights.sum() == pytest.approx(math.pi, rel=1e-13)

    def test_cubic_moment(self):
        rule = jacobi_rule(0.3, 8)
        assert rule.integrate(rule.nodes**3) == pytest.approx(
            2.0794654224749747, rel=1e-12  # B(3.7, 0.3)
        )

    @pytest.mark.parametrize("a", A_GRID)
    @pytest.mark.parametrize("n", [1, 2, 4, 8, 16])
    def test_gaussian_exactness(self, a, n):
        rule = jacobi_rule(a, n)
        for k in range(2 * n):
            ref = beta(k + 1.0 - a, a)
            assert rule.integrate(rule.nodes**k) == pytest.approx(ref, rel=1e-10)

    @pytest.mark.parametrize("a", A_GRID)
    @pytest.mark.parametrize("n", [1, 2, 4, 8, 16])
    def test_node_interlacing(self, a, n):
        coarse = jacobi_rule(a, n).nodes
        fine = jacobi_rule(a, n + 1).nodes
        # strict interlacing: each coarse node falls between adjacent fine ones
        for i in range(n):
            assert fine[i] < coarse[i] < fine[i + 1]

    def test_nodes_inside_and_increasing(self):
        rule = jacobi_rule(0.25, 24)
        assert np.all(rule.nodes > 0.0) and np.all(rule.nodes < 1.0)
        assert np.all(np.diff(rule.nodes) > 0.0)
        assert np.all(rule.weights > 0.0)

    @pytest.mark.parametrize("a,n", [(0.0, 4), (1.0, 4), (-0.2, 4), (0.5, 0)])
    def test_invalid_inputs(self, a, n):
        with pytest.raises(ValueError):
            jacobi_rule(a, n)

    def test_rule_validation(self):
        good = jacobi_rule(0.5, 4)
        with pytest.raises(ValueError):
            QuadratureRule(nodes=good.nodes[::-1], weights=good.weights,
                           order_a=0.5, n=4)
        with pytest.raises(ValueError):
            QuadratureRule(nodes=good.nodes, weights=-good.weights,
                           order_a=0.5, n=4)
        with pytest.raises(ValueError):
            QuadratureRule(nodes=good.nodes, weights=2 * good.weights,
                           order_a=0.5, n=4)

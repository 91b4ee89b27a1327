import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from giantld import exact_oracle, rate_core, saddle


def prufer_tree_count(ell):
    """Distinct edge sets decoded from all Prufer sequences of length ell - 2."""
    if ell <= 2:
        return 1
    trees = set()
    for seq in itertools.product(range(ell), repeat=ell - 2):
        degree = [1] * ell
        for x in seq:
            degree[x] += 1
        edges = []
        for x in seq:
            leaf = min(v for v in range(ell) if degree[v] == 1)
            edges.append(frozenset((leaf, x)))
            degree[leaf] -= 1
            degree[x] -= 1
        u, v = [w for w in range(ell) if degree[w] == 1]
        edges.append(frozenset((u, v)))
        trees.add(frozenset(edges))
    return len(trees)


def exact_F(s: Fraction, r: int):
    F = sum(Fraction(saddle.tree_count(l)) * s**l / math.factorial(l) for l in range(1, r + 1))
    dF = sum(Fraction(l * saddle.tree_count(l)) * s**l / math.factorial(l) for l in range(1, r + 1))
    return F, dF


class TestTreeCounts:
    def test_examples(self):
        assert saddle.cayley_log(1) == 0.0
        assert saddle.cayley_log(3) == pytest.approx(math.log(3))
        assert saddle.cayley_log(7) == pytest.approx(math.log(16807))

    @pytest.mark.parametrize("ell", range(1, 8))
    def test_prufer_enumeration(self, ell):
        assert saddle.tree_count(ell) == prufer_tree_count(ell)

    def test_log_matches_exact_beyond_int64(self):
        for ell in (21, 50, 300):
            assert saddle.cayley_log(ell) == pytest.approx(math.log(saddle.tree_count(ell)), rel=1e-14)
        assert saddle.TreeCount.of(5).log_count == pytest.approx(math.log(125))

    @pytest.mark.parametrize("bad", [0, -2, 1.5])
    def test_domain(self, bad):
        with pytest.raises(ValueError):
            saddle.cayley_log(bad)


class TestEvalF:
    def test_quadratic(self):
        F, dF = saddle.eval_F(1.0, 2)
        assert F == pytest.approx(1.5) and dF == pytest.approx(2.0)

    def test_near_lambert_limit(self):
        _, dF = saddle.eval_F(math.exp(-1), 500)
        assert abs(dF - 1) <= 0.05

    @pytest.mark.parametrize("s", ["1/5", "1/3", "7/10", "2"])
    @pytest.mark.parametrize("r", [1, 3, 7, 10])
    def test_exact_rational(self, s, r):
        q = Fraction(s)
        F, dF = saddle.eval_F(float(q), r)
        eF, edF = exact_F(q, r)
        assert F == pytest.approx(float(eF), rel=1e-12)
        assert dF == pytest.approx(float(edF), rel=1e-12)

    def test_overflow_is_infinite(self):
        F, dF = saddle.eval_F(1e6, 3000)
        assert F == math.inf and dF == math.inf

    def test_sdF_increasing(self):
        for r in (2, 5, 50, 1000):
            vals = [saddle.log_eval_F(t, r)[1] for t in np.linspace(-8, 3, 400)]
            assert np.all(np.diff(vals) > 0)


class TestLambertW:
    def test_examples(self):
        assert saddle.lambert_w_tree(0.0) == 0.0
        assert saddle.lambert_w_tree(math.exp(-1)) == 1.0
        assert saddle.lambert_w_tree(0.5 * math.exp(-0.5)) == pytest.approx(0.5, abs=1e-13)

    def test_inverse_on_grid(self):
        for s in np.linspace(0, math.exp(-1), 300):
            w = saddle.lambert_w_tree(float(s))
            assert 0 <= w <= 1
            assert abs(w * math.exp(-w) - s) <= 1e-13

    @pytest.mark.parametrize("bad", [-0.01, 0.4])
    def test_domain(self, bad):
        with pytest.raises(ValueError):
            saddle.lambert_w_tree(bad)


class TestTheta:
    def test_trivial_point(self):
        assert saddle.theta(1.0, 1.0, math.e, 1) == pytest.approx(0.0, abs=1e-15)

    def test_at_saddle(self):
        sol = saddle.solve_saddle(2.0, 50)
        assert saddle.theta(sol.s_r, sol.rho_r, 2.0, 50) == pytest.approx(sol.rho_r - math.log(sol.s_r), abs=1e-10)

    def test_exact_rational_oracle(self):
        s, rho, a, r = Fraction(3, 10), Fraction(2, 5), Fraction(3, 2), 6
        F, _ = exact_F(s, r)
        expected = -float(rho) * math.log(a) - float(rho) * math.log(rho) + float(rho) + float(rho) * math.log(F) - math.log(s)
        assert saddle.theta(float(s), float(rho), float(a), r) == pytest.approx(expected, rel=1e-13)

    def test_domain(self):
        with pytest.raises(ValueError):
            saddle.theta(0.5, 0.0, 1.0, 3)


class TestSolveSaddle:
    def test_quadratic_case(self):
        sol = saddle.solve_saddle(1.0, 2)
        assert sol.s_r == pytest.approx((math.sqrt(5) - 1) / 2, abs=1e-12)

    @pytest.mark.parametrize(
        "alpha,s,rho,th",
        [(2.0, math.exp(-1), 0.25, 1.25), (0.5, 0.5 * math.exp(-0.5), 0.75, 1.943147), (4.0, math.exp(-1), 0.125, 1.125)],
    )
    def test_r2000_limits(self, alpha, s, rho, th):
        sol = saddle.solve_saddle(alpha, 2000)
        assert sol.s_r == pytest.approx(s, abs=0.01)
        assert sol.rho_r == pytest.approx(rho, abs=0.01)
        assert sol.theta == pytest.approx(th, abs=0.01)
        lim = saddle.saddle_limits(alpha)
        assert sol.rho_r * alpha == pytest.approx(lim.F, abs=0.02)

    @settings(max_examples=60, deadline=None)
    @given(st.floats(0.05, 8.0), st.integers(2, 400))
    def test_residuals_and_density(self, alpha, r):
        sol = saddle.solve_saddle(alpha, r)
        assert sol.residual_F <= 1e-10
        assert sol.residual_sdF <= 1e-10
        assert 1.0 / r < sol.rho_r < 1.0

    def test_domain(self):
        with pytest.raises(ValueError):
            saddle.solve_saddle(2.0, 1)
        with pytest.raises(ValueError):
            saddle.solve_saddle(0.0, 5)

    @pytest.mark.parametrize("alpha", [0.5, 2.0])
    def test_theta_convergence(self, alpha):
        rs = [10, 40, 160, 640]
        lim = saddle.theta_limit(alpha)
        errs = [abs(saddle.solve_saddle(alpha, r).theta - lim) for r in rs]
        assert all(b <= a + 1e-12 for a, b in zip(errs, errs[1:]))
        c = errs[0] * math.sqrt(rs[0])
        assert all(e <= c / math.sqrt(r) + 1e-12 for e, r in zip(errs, rs))

    def test_argmax_of_profile(self):
        alpha, r = 2.0, 30
        sol = saddle.solve_saddle(alpha, r)
        grid = np.linspace(1.0 / r + 1e-3, 1 - 1e-3, 2000)
        vals = [saddle.profile_theta(float(x), alpha, r) for x in grid]
        best = grid[int(np.argmax(vals))]
        assert abs(best - sol.rho_r) <= 2 * (grid[1] - grid[0])


class TestRates:
    def test_trees_rate(self):
        assert saddle.trees_rate(0.7) == 1.0
        assert saddle.trees_rate(2) == pytest.approx(2 * math.exp(-0.75), rel=1e-15)
        for a in (1.5, 2.0, 3.7):
            assert saddle.trees_rate(a) == pytest.approx(math.exp(rate_core.psi(a)), rel=1e-12)
            th = 1 + 1 / (2 * a)
            assert saddle.trees_rate(a) == pytest.approx(a * math.exp(-1 - a / 2 + th), rel=1e-12)

    @pytest.mark.parametrize("alpha", [0.5, 2.0, 4.0])
    def test_finite_r_proxy(self, alpha):
        sol = saddle.solve_saddle(alpha, 2000)
        assert saddle.finite_r_rate(sol) == pytest.approx(math.exp(rate_core.psi(alpha)), abs=0.01)


class TestQBound:
    def test_example(self):
        q = exact_oracle.exact_Q(12, 5, 4)
        assert q.log_value <= saddle.log_q_upper_bound(12, 5, 4) + 1e-12

    def test_all_small_instances(self):
        for n in range(1, 41, 3):
            for k in range(1, n + 1, 2):
                for r in (1, 2, 3, 5, 8, n):
                    q = exact_oracle.exact_Q(n, k, r)
                    bound = saddle.log_q_upper_bound(n, k, r)
                    if q.exact == 0:
                        assert bound == -math.inf
                    else:
                        assert q.log_value <= bound + 1e-9

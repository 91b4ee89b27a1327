import math
from fractions import Fraction

import gmpy2
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from giantld import exact_oracle as eo
from giantld.exact_oracle import EventSpec, dp


def mpq(x):
    return gmpy2.mpq(Fraction(x))


class TestTypes:
    def test_edge_prob_from_alpha_exact(self):
        assert eo.EdgeProb.from_alpha(7, 2).p == Fraction(2, 7)
        assert eo.EdgeProb.from_alpha(10, "1/2").p == Fraction(1, 20)
        assert not eo.EdgeProb.from_alpha(10, 0.5).is_exact

    @pytest.mark.parametrize("bad", [-0.1, Fraction(3, 2)])
    def test_edge_prob_domain(self, bad):
        with pytest.raises(ValueError):
            eo.EdgeProb(bad)

    def test_log_prob_must_be_nonpositive(self):
        with pytest.raises(ValueError):
            eo.LogProb(0.5)
        assert eo.LogProb.from_exact(0).log_value == -math.inf

    def test_event_validation(self):
        with pytest.raises(ValueError):
            EventSpec("bogus")
        with pytest.raises(ValueError):
            EventSpec.all_small(5).validate(4)
        with pytest.raises(ValueError):
            EventSpec("macro", r=2)


class TestConnectivity:
    @pytest.mark.parametrize("p", ["1/3", "1/2", "9/10"])
    def test_two_vertices(self, p):
        assert eo.exact_connectivity(2, Fraction(p)).exact == mpq(p)

    def test_three_half(self):
        assert eo.exact_connectivity(3, Fraction(1, 2)).exact == mpq("1/2")
        p = Fraction(1, 2)
        assert eo.exact_connectivity(3, p).exact == mpq(3 * p**2 * (1 - p) + p**3)

    def test_bracket_50(self):
        p = Fraction(3, 50)
        prob = eo.exact_connectivity(50, p).exact
        upper = (1 - (1 - p) ** 49) ** 49
        assert upper / 50 <= prob <= upper

    def test_float_matches_rational(self):
        for n, a in ((40, 2), (120, "1/2"), (200, 4)):
            p = Fraction(a) / n
            ex = eo.exact_connectivity(n, p, arithmetic="rational").log_value
            fl = eo.exact_connectivity(n, float(p), arithmetic="float").log_value
            assert fl == pytest.approx(ex, rel=1e-11)

    def test_float_large_n_in_bracket(self):
        for n, a in ((1000, 0.5), (3000, 2.0)):
            lp = eo.exact_connectivity(n, a / n).log_value
            t = (n - 1) * math.log1p(-a / n)
            log_u = (n - 1) * math.log(-math.expm1(t))
            assert log_u - math.log(n) <= lp <= log_u

    def test_rate_converges(self):
        errs = []
        for n in (50, 100, 200):
            lp = eo.exact_connectivity(n, Fraction(2, n)).log_value
            errs.append(abs(-lp / n + math.log(1 - math.exp(-2))))
        assert errs[0] > errs[1] > errs[2]
        c = max(e * n / math.log(n) for e, n in zip(errs, (50, 100, 200)))
        assert c < 5

    def test_table(self):
        tab = eo.connectivity_table(6, Fraction(1, 2))
        assert tab[0] is None
        assert tab[3].exact == mpq("1/2")
        assert tab[6].exact == eo.exact_connectivity(6, Fraction(1, 2)).exact

    def test_limits(self):
        with pytest.raises(ValueError):
            eo.exact_connectivity(eo.FLOAT_MAX_N + 1, 0.001)
        with pytest.raises(ValueError):
            eo.exact_connectivity(0, Fraction(1, 2))

    def test_boundary_probabilities(self):
        assert eo.exact_connectivity(5, 0).value == 0.0
        assert eo.exact_connectivity(5, 1).value == 1.0
        assert eo.exact_connectivity(5, 1.0, arithmetic="float").value == 1.0


class TestForest:
    def test_examples(self):
        assert eo.exact_forest(2, Fraction(1, 3)).exact == 1
        assert eo.exact_forest(3, Fraction(1, 2)).exact == mpq("7/8")

    def test_brute_small_r(self):
        p = Fraction(1, 3)
        assert eo.exact_forest(6, p, 2).exact == eo.brute_force_enumerate(6, p, EventSpec.no_cycles_and_small(2)).exact

    def test_partition_identity(self):
        for n, p, r in ((6, "1/3", 2), (7, "2/5", None), (9, "1/4", 4)):
            assert eo.exact_forest(n, Fraction(p), r).exact == dp.forest_from_Q(n, Fraction(p), r).exact

    def test_float_matches_rational(self):
        p = Fraction(2, 150)
        assert eo.exact_forest(150, float(p), 10, arithmetic="float").log_value == pytest.approx(
            eo.exact_forest(150, p, 10).log_value, rel=1e-11
        )

    def test_rate_at_2000(self):
        lp = eo.exact_forest(2000, 2 / 2000, arithmetic="float")
        assert math.exp(lp.log_value / 2000) == pytest.approx(2 * math.exp(-0.75), abs=0.02)

    def test_r_out_of_range(self):
        with pytest.raises(ValueError):
            eo.exact_forest(5, Fraction(1, 2), 6)


class TestSmallComponents:
    def test_vacuous(self):
        assert eo.exact_small_components(9, Fraction(1, 3), 9).exact == 1

    def test_isolated(self):
        p = Fraction(2, 7)
        assert eo.exact_small_components(3, p, 1).exact == mpq((1 - p) ** 3)

    def test_brute(self):
        p = Fraction(2, 7)
        assert eo.exact_small_components(7, p, 3).exact == eo.brute_force_enumerate(7, p, EventSpec.all_small(3)).exact

    @pytest.mark.parametrize("a", [Fraction(1, 2), 1, 2, 4])
    @pytest.mark.parametrize("n", [20, 200])
    def test_no_big_sandwich(self, a, n):
        p = Fraction(a) / n
        forest = eo.exact_forest(n, p).exact
        for r in (2, 5, 10, 20):
            low = eo.exact_forest(n, p, r).exact
            mid = eo.exact_small_components(n, p, r).exact
            assert low <= mid
            assert mid <= forest / mpq((1 - p) ** (r * n // 2))


class TestMacroVolume:
    def test_m_zero_is_all_small(self):
        p = Fraction(1, 4)
        assert eo.exact_macro_volume(9, p, 3, 0).exact == eo.exact_small_components(9, p, 3).exact

    def test_infeasible_is_zero(self):
        assert eo.exact_macro_volume(9, Fraction(1, 4), 3, 2).exact == 0

    def test_normalised_rational(self):
        dist = eo.macro_volume_distribution(12, Fraction(1, 4), 3)
        assert sum(d.exact for d in dist) == 1

    def test_normalised_float(self):
        dist = eo.macro_volume_distribution(300, 2 / 300, 5, arithmetic="float")
        assert sum(d.value for d in dist) == pytest.approx(1.0, abs=1e-10)

    def test_brute(self):
        p = Fraction(1, 4)
        assert eo.exact_macro_volume(7, p, 2, 5).exact == eo.brute_force_enumerate(7, p, EventSpec.macro_volume(2, 5)).exact

    def test_float_matches_rational(self):
        ex = eo.macro_volume_distribution(50, Fraction(2, 50), 5)
        fl = eo.macro_volume_distribution(50, 0.04, 5, arithmetic="float")
        for a, b in zip(ex, fl):
            if a.exact == 0:
                assert b.log_value == -math.inf
            else:
                assert b.log_value == pytest.approx(a.log_value, rel=1e-10, abs=1e-12)


class TestQ:
    def test_all_singletons(self):
        for n in (1, 4, 9):
            for r in (1, 3):
                assert eo.exact_Q(n, n, r).exact == gmpy2.mpq(1, math.factorial(n))

    def test_one_pair(self):
        assert eo.exact_Q(2, 1, 2).exact == gmpy2.mpq(1, 2)

    def test_infeasible(self):
        assert eo.exact_Q(5, 6, 3).exact == 0
        assert eo.exact_Q(10, 2, 4).exact == 0

    def test_known_value(self):
        assert eo.exact_Q(12, 5, 4).exact == gmpy2.mpq(59, 384)
        assert eo.brute_force_Q(12, 5, 4).exact == gmpy2.mpq(59, 384)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 14), st.integers(1, 14), st.integers(1, 6))
    def test_brute_and_float(self, n, k, r):
        ex = eo.exact_Q(n, k, r)
        assert ex.exact == eo.brute_force_Q(n, k, r).exact
        fl = eo.exact_Q(n, k, r, arithmetic="float")
        if ex.exact == 0:
            assert fl.log_value == -math.inf
        else:
            assert fl.log_value == pytest.approx(ex.log_value, rel=1e-12, abs=1e-12)


class TestBruteForce:
    def test_single_vertex(self):
        for ev in (EventSpec.connected(), EventSpec.no_cycles(), EventSpec.all_small(1)):
            assert eo.brute_force_enumerate(1, Fraction(1, 3), ev).exact == 1

    def test_four_vertex_forest_polynomial(self):
        for p in ("1/5", "1/2", "3/4"):
            assert eo.brute_force_enumerate(4, Fraction(p), EventSpec.no_cycles()).exact == eo.exact_forest(4, Fraction(p)).exact

    def test_census_counts(self):
        for n in range(1, 7):
            table = eo.graph_census_table(n)
            assert sum(c for _, _, c in table) == 2 ** (n * (n - 1) // 2)

    def test_size_guard(self):
        with pytest.raises(ValueError):
            eo.brute_force_enumerate(8, Fraction(1, 2), EventSpec.connected())

    def test_float_p(self):
        a = eo.brute_force_enumerate(5, 0.3, EventSpec.connected()).value
        b = eo.exact_connectivity(5, 0.3, arithmetic="float").value
        assert a == pytest.approx(b, rel=1e-12)

    @pytest.mark.parametrize("n", range(1, 8))
    @pytest.mark.parametrize("p", ["1/4", "1/2", "2/3"])
    def test_every_dp_matches(self, n, p):
        p = Fraction(p)
        events = [EventSpec.connected(), EventSpec.no_cycles()]
        for r in range(1, n + 1):
            events += [EventSpec.all_small(r), EventSpec.no_cycles_and_small(r)]
            events += [EventSpec.macro_volume(r, m) for m in range(n + 1)]
        for ev in events:
            assert eo.exact_event(n, p, ev).exact == eo.brute_force_enumerate(n, p, ev).exact, ev.label()
            fl = eo.exact_event(n, float(p), ev, arithmetic="float").value
            assert fl == pytest.approx(float(eo.brute_force_enumerate(n, p, ev).exact), rel=1e-12, abs=1e-15)


class TestGrounded:
    def test_two_vertices(self):
        assert eo.brute_force_grounded([[0, "3/10"], ["3/10", 0]]).exact == mpq("3/10")

    def test_heterogeneous_three(self):
        m = [[0, "1/5", "1/2"], ["1/5", 0, "7/10"], ["1/2", "7/10", 0]]
        assert eo.brute_force_grounded(m).exact == eo.brute_force_connectivity_inhomogeneous(m).exact

    def test_complete(self):
        m = [[0 if i == j else 1 for j in range(4)] for i in range(4)]
        assert eo.brute_force_grounded(m).exact == 1

    def test_random_matrices(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            n = int(rng.integers(2, 6))
            m = [[Fraction(0)] * n for _ in range(n)]
            for i in range(n):
                for j in range(i + 1, n):
                    m[i][j] = m[j][i] = Fraction(int(rng.integers(0, 11)), 10)
            assert eo.brute_force_grounded(m).exact == eo.brute_force_connectivity_inhomogeneous(m).exact

    def test_homogeneous_matches_dp(self):
        p = Fraction(2, 5)
        m = [[0 if i == j else p for j in range(5)] for i in range(5)]
        assert eo.brute_force_grounded(m).exact == eo.exact_connectivity(5, p).exact

    def test_validation(self):
        with pytest.raises(ValueError):
            eo.brute_force_grounded([[0, "1/2"], ["1/3", 0]])
        with pytest.raises(ValueError):
            eo.brute_force_grounded([[Fraction(1, 2)]])
        big = [[0 if i == j else Fraction(1, 2) for j in range(6)] for i in range(6)]
        with pytest.raises(ValueError):
            eo.brute_force_grounded(big)

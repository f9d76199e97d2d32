import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graph_concordance import (
    ConfigError,
    DegenerateVarianceError,
    DrawSet,
    Graph,
    InferenceError,
    asymptotic_ci,
    confidence_interval,
    critical_value,
    permutation_inference,
    permutation_statistic,
    sample_permutations,
    test_positive_gc,
)
from graph_concordance.permutation import (
    all_permutations,
    exact_draws,
    observed,
    permutation_draws,
    sampled_draws,
)
from graph_concordance.variance import VarianceEstimate
from oracles import adjacency_sets, critical_value_bruteforce, t_perm

from conftest import random_graph


def _draws(t, exact=False):
    t = np.asarray(t, dtype=float)
    return DrawSet(t, t, np.ones_like(t), np.isnan(t), exact)


def _var(sigma_plus):
    s2 = sigma_plus**2
    return VarianceEstimate(s2, s2, s2, np.zeros(1), np.zeros(1))


class _Est:
    def __init__(self, c_hat):
        self.c_hat = c_hat


class TestSamplePermutations:
    def test_singleton(self):
        assert sample_permutations(1, 7, 3).tolist() == [[0]] * 7

    def test_zero_draws(self):
        with pytest.raises(ConfigError):
            sample_permutations(5, 0, 1)

    def test_reproducible(self):
        a = sample_permutations(9, 50, (4, 2))
        assert np.array_equal(a, sample_permutations(9, 50, (4, 2)))
        assert not np.array_equal(a, sample_permutations(9, 50, (4, 3)))
        assert all(sorted(row) == list(range(9)) for row in a.tolist())

    def test_uniform_on_s4(self):
        perms = sample_permutations(4, 24_000, 2024)
        counts = {}
        for row in map(tuple, perms.tolist()):
            counts[row] = counts.get(row, 0) + 1
        assert set(counts) == set(itertools.permutations(range(4)))
        band = 5 * math.sqrt(1000 * 23 / 24)
        assert all(abs(c - 1000) <= band for c in counts.values())
        chi2 = sum((c - 1000) ** 2 / 1000 for c in counts.values())
        # 23 degrees of freedom; 0.999 quantile is about 49.7
        assert chi2 < 49.7


class TestPermutationStatistic:
    def test_identity_reproduces_t1(self):
        rng = np.random.default_rng(3)
        g = random_graph(rng, 25, 0.15)
        est, var = observed(g, rng.standard_normal(25))
        t1 = math.sqrt(25) * est.c_hat / var.sigma_plus
        d = permutation_statistic(g, est.residuals, np.arange(25))
        assert d.t_pi == t1
        assert d.c_hat_pi == est.c_hat

    def test_matching_swap(self, matching):
        d = permutation_statistic(matching, [1.0, 1.0, -1.0, -1.0], [0, 2, 1, 3])
        assert d.c_hat_pi == -1.0
        assert d.degenerate
        assert math.isnan(d.t_pi)

    @pytest.mark.parametrize("seed", range(5))
    def test_definitional_n10(self, seed):
        rng = np.random.default_rng(seed)
        g = random_graph(rng, 10, 0.3)
        est, _ = observed(g, rng.standard_normal(10))
        adj = adjacency_sets(10, g.edges.tolist())
        for _ in range(20):
            pi = rng.permutation(10)
            d = permutation_statistic(g, est.residuals, pi)
            ref = t_perm(adj, est.residuals.tolist(), pi.tolist())
            if ref is None:
                assert d.degenerate
            else:
                assert d.t_pi == pytest.approx(ref, rel=1e-9, abs=1e-12)

    def test_draw_invariant(self):
        rng = np.random.default_rng(8)
        g = random_graph(rng, 30, 0.1)
        est, _ = observed(g, rng.standard_normal(30))
        for _ in range(10):
            d = permutation_statistic(g, est.residuals, rng.permutation(30))
            assert d.t_pi == pytest.approx(math.sqrt(30) * d.c_hat_pi / d.sigma_plus_pi, rel=1e-14)

    @pytest.mark.parametrize("zero_gc", [False, True])
    def test_block_kernel_matches_single(self, zero_gc):
        rng = np.random.default_rng(12)
        g = random_graph(rng, 40, 0.08)
        est, _ = observed(g, rng.standard_normal(40), zero_gc)
        perms = sample_permutations(40, 300, 5)
        ds = permutation_draws(g, est.residuals, perms, zero_gc, block=64)
        for j in range(0, 300, 13):
            one = permutation_statistic(g, est.residuals, perms[j], zero_gc)
            assert ds[j].degenerate == one.degenerate
            if not one.degenerate:
                assert ds[j].t_pi == pytest.approx(one.t_pi, rel=1e-12, abs=1e-12)

    def test_sampled_equals_explicit(self):
        rng = np.random.default_rng(1)
        g = random_graph(rng, 20, 0.2)
        est, _ = observed(g, rng.standard_normal(20))
        a = sampled_draws(g, est.residuals, 100, 77, block=16)
        b = permutation_draws(g, est.residuals, sample_permutations(20, 100, 77))
        assert np.array_equal(a.t, b.t, equal_nan=True)


class TestCriticalValue:
    def test_point_mass(self):
        assert critical_value([2.0] * 50, 0.05) == 2.0
        assert critical_value([-2.0, 2.0] * 25, 0.05) == 2.0

    def test_order_statistic(self):
        stats = list(range(1, 101))
        assert critical_value(stats, 0.05) == 96
        assert critical_value(stats, 0.05, "one") == 96
        assert critical_value_bruteforce(stats, 0.05) == 96

    def test_one_sided_signed(self):
        stats = [-10.0] * 10 + [1.0] * 90
        assert critical_value(stats, 0.05, "one") == 1.0
        assert critical_value(stats, 0.05, "two") == 10.0

    def test_nan_dropped(self):
        assert critical_value([np.nan] * 3 + list(range(1, 101)), 0.05) == 96

    def test_all_degenerate(self):
        with pytest.raises(InferenceError):
            critical_value([np.nan, np.nan], 0.05)

    @pytest.mark.parametrize("alpha", [0.0, 1.0, -0.1])
    def test_bad_alpha(self, alpha):
        with pytest.raises(ConfigError):
            critical_value([1.0], alpha)

    @settings(max_examples=200, deadline=None)
    @given(
        st.lists(st.integers(-20, 20).map(lambda v: v / 4), min_size=1, max_size=60),
        st.sampled_from([0.01, 0.05, 0.1, 0.2, 0.25, 0.5, 0.9]),
    )
    def test_matches_bruteforce(self, stats, alpha):
        assert critical_value(stats, alpha, "one") == critical_value_bruteforce(stats, alpha)
        assert critical_value(stats, alpha) == critical_value_bruteforce([abs(s) for s in stats], alpha)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(-5, 5), min_size=1, max_size=80), st.floats(0.001, 0.998), st.floats(0.001, 0.998))
    def test_monotone_in_alpha(self, stats, a1, a2):
        lo, hi = sorted((a1, a2))
        assert critical_value(stats, hi) <= critical_value(stats, lo)


class TestIntervalAndTest:
    def test_arithmetic(self):
        draws = _draws([2.0] * 10)
        res = confidence_interval(_Est(0.1), _var(0.5), draws, 0.05, 100)
        assert res.ci_lower == pytest.approx(0.0, abs=1e-15)
        assert res.ci_upper == pytest.approx(0.2, rel=1e-15)
        assert res.halfwidth == pytest.approx(0.1, rel=1e-15)

    def test_zero_critical_value(self):
        res = confidence_interval(_Est(0.3), _var(1.0), _draws([0.0] * 5), 0.05, 9)
        assert res.ci_lower == res.ci_upper == 0.3

    def test_dominated_t1(self):
        reject, p = test_positive_gc(-5.0, _draws(np.linspace(1, 2, 50)), 0.05)
        assert not reject and p == 1.0

    def test_p_counting(self):
        t = [10.0] * 4 + [0.0] * 95
        reject, p = test_positive_gc(5.0, _draws(t), 0.05)
        assert p == pytest.approx(0.05, rel=1e-15)
        assert reject == (5.0 > critical_value(t, 0.05, "one"))

    def test_exact_p_counting(self):
        t = [10.0] * 4 + [0.0] * 96
        _, p = test_positive_gc(5.0, _draws(t, exact=True), 0.05)
        assert p == 0.04

    def test_asymptotic(self):
        res = asymptotic_ci(_Est(0.0), _var(1.0), 0.05, 100)
        assert res.ci_upper == pytest.approx(0.1959964, abs=1e-7)
        assert res.ci_lower == -res.ci_upper
        assert res.method == "asymptotic"

    def test_asymptotic_collapses(self):
        res = asymptotic_ci(_Est(0.7), _var(1.0), 1.0, 100)
        assert res.ci_lower == res.ci_upper == 0.7

    def test_asymptotic_degenerate(self):
        with pytest.raises(DegenerateVarianceError):
            asymptotic_ci(_Est(0.0), _var(0.0), 0.05, 100)


class TestPermutationInference:
    def _data(self, seed=0, n=60):
        rng = np.random.default_rng(seed)
        g = random_graph(rng, n, 0.06)
        return g, rng.standard_normal(n)

    def test_invariants(self):
        g, y = self._data()
        res = permutation_inference(g, y, permutations=200, seed=9)
        assert res.ci_lower <= res.c_hat <= res.ci_upper
        assert res.halfwidth == pytest.approx(res.critical_value * res.sigma_plus / math.sqrt(g.n))
        assert 0 < res.p_value <= 1
        assert res.n_permutations == 200
        assert res.seed == [9]

    def test_worker_count_irrelevant(self):
        g, y = self._data(2)
        a = permutation_inference(g, y, permutations=700, seed=4, workers=1)
        b = permutation_inference(g, y, permutations=700, seed=4, workers=4)
        assert a == b

    def test_exact_contains_identity(self):
        g = Graph(6, [(0, 1), (1, 2), (3, 4)])
        y = [0.3, 1.2, -0.7, 2.0, 0.1, -1.1]
        res = permutation_inference(g, y, exact=True)
        assert res.n_permutations == 720
        assert res.method == "permutation-exact"
        est, _ = observed(g, y)
        d = exact_draws(g, est.residuals)
        assert d.t[0] == res.t_obs
        assert res.p_value >= 1 / 720

    def test_exact_too_large(self):
        with pytest.raises(ConfigError):
            all_permutations(9)

"""Trimmed-squares tests: thresholding, the projection recursion, recovery,
and the filtering pipeline."""

from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robustreg.errors import (
    InvalidConfigError,
    InvalidInputError,
    RankDeficiencyError,
)
from robustreg.filtering import FilterConfig
from robustreg.lts import (
    LtsConfig,
    fit_lts,
    hard_threshold,
    iteration_bound,
    lts_pipeline,
    lts_step,
)
from robustreg.numerics import solve_least_squares


class TestHardThreshold:
    def test_keeps_largest_magnitudes(self):
        np.testing.assert_array_equal(
            hard_threshold([3.0, -5.0, 1.0], 2), [3.0, -5.0, 0.0]
        )

    def test_tie_goes_to_smaller_index(self):
        np.testing.assert_array_equal(hard_threshold([2.0, -2.0], 1), [2.0, 0.0])
        np.testing.assert_array_equal(
            hard_threshold([1.0, 3.0, -3.0, 0.5], 1), [0.0, 3.0, 0.0, 0.0]
        )

    def test_m_zero_and_m_full(self):
        v = np.array([1.0, -2.0])
        np.testing.assert_array_equal(hard_threshold(v, 0), [0.0, 0.0])
        np.testing.assert_array_equal(hard_threshold(v, 2), v)

    def test_m_out_of_range(self):
        with pytest.raises(InvalidInputError):
            hard_threshold([1.0], 2)
        with pytest.raises(InvalidInputError):
            hard_threshold([1.0], -1)

    @given(st.lists(st.floats(-100, 100), min_size=1, max_size=8), st.data())
    @settings(max_examples=60, deadline=None)
    def test_idempotent_and_sparse(self, vals, data):
        v = np.array(vals)
        m = data.draw(st.integers(0, v.size))
        b = hard_threshold(v, m)
        assert np.count_nonzero(b) <= m
        np.testing.assert_array_equal(hard_threshold(b, m), b)

    def test_best_sparse_approximation(self):
        # among all vectors with any m-sized support, the thresholded one
        # is closest; optimal per support is the restriction of v
        rng = np.random.default_rng(0)
        for _ in range(25):
            n = int(rng.integers(2, 7))
            m = int(rng.integers(1, n + 1))
            v = rng.standard_normal(n)
            b = hard_threshold(v, m)
            d_star = np.linalg.norm(b - v)
            for T in combinations(range(n), m):
                c = np.zeros(n)
                c[list(T)] = v[list(T)]
                assert d_star <= np.linalg.norm(c - v) + 1e-12


class TestLtsStep:
    def test_intercept_only_example(self):
        # projection onto the constant column is the mean; one slot keeps
        # the largest centered response
        X = np.ones((3, 1))
        y = np.array([1.0, 2.0, 6.0])
        out = lts_step(X, y, np.zeros(3), 1)
        np.testing.assert_allclose(out, [0.0, 0.0, 3.0])

    def test_fixed_point_at_true_corruption(self):
        rng = np.random.default_rng(1)
        X = rng.standard_normal((30, 2))
        beta = np.array([1.0, -1.0])
        b_true = np.zeros(30)
        b_true[[3, 7]] = [50.0, -40.0]
        y = X @ beta + b_true
        out = lts_step(X, y, b_true, 2)
        np.testing.assert_allclose(out, b_true, atol=1e-8)


class TestFitLts:
    def test_exact_recovery_small(self):
        rng = np.random.default_rng(2)
        X = rng.standard_normal((60, 3))
        beta = np.array([1.0, 2.0, -0.5])
        y = X @ beta
        y[:5] += 100.0
        res = fit_lts(X, y, LtsConfig(m=10, max_iters=50))
        assert np.linalg.norm(res.beta_hat - beta) < 1e-8
        assert res.converged

    def test_m_zero_equals_least_squares(self):
        rng = np.random.default_rng(3)
        X = rng.standard_normal((25, 2))
        y = X @ np.ones(2) + 0.3 * rng.standard_normal(25)
        res = fit_lts(X, y, LtsConfig(m=0, max_iters=5))
        np.testing.assert_allclose(res.beta_hat, solve_least_squares(X, y), atol=1e-12)

    def test_trimmed_objective_definition(self):
        rng = np.random.default_rng(4)
        X = rng.standard_normal((20, 2))
        y = rng.standard_normal(20)
        m = 4
        res = fit_lts(X, y, LtsConfig(m=m, max_iters=10))
        r2 = np.sort((y - X @ res.beta_hat) ** 2)
        assert res.final_objective == pytest.approx(0.5 * r2[: 20 - m].sum() / 20)

    def test_m_at_row_count_rejected(self):
        with pytest.raises(InvalidConfigError):
            fit_lts(np.ones((4, 1)), np.ones(4), LtsConfig(m=4))

    def test_rank_deficient_design(self):
        X = np.ones((10, 2))  # duplicated column
        with pytest.raises(RankDeficiencyError):
            fit_lts(X, np.ones(10), LtsConfig(m=1))

    def test_lad_warm_start_recovers(self):
        rng = np.random.default_rng(5)
        X = rng.standard_normal((50, 2))
        beta = np.array([3.0, -2.0])
        y = X @ beta
        y[:4] = 200.0
        res = fit_lts(X, y, LtsConfig(m=8, warm_start="lad"))
        assert np.linalg.norm(res.beta_hat - beta) < 1e-8

    def test_vector_warm_start_at_truth_is_fixed(self):
        rng = np.random.default_rng(6)
        X = rng.standard_normal((40, 2))
        beta = np.array([1.0, 1.0])
        y = X @ beta
        y[[0, 1, 2]] += 75.0
        res = fit_lts(X, y, LtsConfig(m=6, max_iters=3, warm_start=beta))
        assert np.linalg.norm(res.beta_hat - beta) < 1e-10

    def test_warm_start_validation(self):
        with pytest.raises(InvalidConfigError):
            LtsConfig(m=1, warm_start="ols")
        cfg = LtsConfig(m=1, warm_start=np.array([np.nan]))
        with pytest.raises(InvalidInputError):
            fit_lts(np.ones((4, 1)), np.ones(4), cfg)

    def test_early_stop_reports_convergence(self):
        rng = np.random.default_rng(7)
        X = rng.standard_normal((30, 2))
        y = X @ np.ones(2) + 0.1 * rng.standard_normal(30)
        res = fit_lts(X, y, LtsConfig(m=3, max_iters=100, stop_tol_alpha=10.0))
        assert res.converged
        assert res.iterations < 100

    def test_unfired_stop_rule_flags_nonconvergence(self):
        rng = np.random.default_rng(8)
        X = rng.standard_normal((30, 2))
        y = 5.0 * rng.standard_normal(30)
        res = fit_lts(X, y, LtsConfig(m=3, max_iters=2, stop_tol_alpha=1e-15))
        assert not res.converged
        assert res.iterations == 2

    def test_config_validation(self):
        with pytest.raises(InvalidConfigError):
            LtsConfig(m=-1)
        with pytest.raises(InvalidConfigError):
            LtsConfig(m=1, max_iters=0)
        with pytest.raises(InvalidConfigError):
            LtsConfig(m=1, stop_tol_alpha=-0.5)

    def test_iterate_distance_contracts_noiseless(self):
        # +/-1 design, two planted corruptions: the distance from the
        # iterate to the true corruption vector never grows
        rng = np.random.default_rng(9)
        n = 20
        X = rng.choice([-1.0, 1.0], size=(n, 1))
        beta = np.array([2.0])
        b_true = np.zeros(n)
        b_true[[4, 11]] = [30.0, -25.0]
        y = X @ beta + b_true
        b = np.zeros(n)
        dists = [np.linalg.norm(b - b_true)]
        for _ in range(12):
            b = lts_step(X, y, b, 2)
            dists.append(np.linalg.norm(b - b_true))
        assert all(d2 <= d1 + 1e-9 for d1, d2 in zip(dists, dists[1:]))
        assert dists[-1] < 1e-6

    def test_implicit_projector_above_cap(self):
        rng = np.random.default_rng(10)
        n = 2001
        X = rng.standard_normal((n, 2))
        beta = np.array([1.0, -1.0])
        y = X @ beta
        y[:3] += 500.0
        res = fit_lts(X, y, LtsConfig(m=5, max_iters=30))
        assert np.linalg.norm(res.beta_hat - beta) < 1e-8


class TestIterationBound:
    def test_known_values(self):
        X = np.array([[1.0]])
        y = np.array([1.0])
        assert iteration_bound(X, y, 0.5) == 2
        assert iteration_bound(X, y, 2.0) == 1
        assert iteration_bound(X, y, 100.0) == 1

    def test_monotone_in_alpha(self):
        rng = np.random.default_rng(11)
        X = rng.standard_normal((50, 3))
        y = rng.standard_normal(50)
        bounds = [iteration_bound(X, y, a) for a in (1e-6, 1e-3, 1.0)]
        assert bounds[0] >= bounds[1] >= bounds[2] >= 1

    def test_alpha_validation(self):
        with pytest.raises(InvalidConfigError):
            iteration_bound(np.ones((2, 1)), np.ones(2), 0.0)


class TestPipeline:
    def test_filter_defuses_leverage_attack(self):
        rng = np.random.default_rng(12)
        n, p = 100, 3
        X = rng.standard_normal((n, p))
        beta = np.array([1.0, 0.5, -1.0])
        y = X @ beta + 0.01 * rng.standard_normal(n)
        X[:3] = 60.0
        y[:3] = 1000.0
        cfg = LtsConfig(m=10, max_iters=50)
        raw = lts_pipeline(X, y, cfg)
        filt = lts_pipeline(X, y, cfg, filter_cfg=FilterConfig(budget=5))
        assert np.linalg.norm(filt.beta_hat - beta) < 0.1
        assert np.linalg.norm(filt.beta_hat - beta) <= np.linalg.norm(raw.beta_hat - beta)

    def test_no_filter_matches_plain_fit(self):
        rng = np.random.default_rng(13)
        X = rng.standard_normal((30, 2))
        y = X @ np.ones(2) + rng.standard_normal(30)
        cfg = LtsConfig(m=4, max_iters=10)
        a = lts_pipeline(X, y, cfg)
        b = fit_lts(X, y, cfg)
        c = lts_pipeline(X, y, cfg, filter_cfg=FilterConfig(budget=0))
        np.testing.assert_array_equal(a.beta_hat, b.beta_hat)
        np.testing.assert_array_equal(a.beta_hat, c.beta_hat)

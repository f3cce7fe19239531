"""Shift identity, bucketing, robust mean, and the one-step improver."""

import numpy as np
import pytest

from robustreg.errors import InvalidConfigError, InvalidInputError
from robustreg.postprocess import (
    PostprocessConfig,
    median_of_means_buckets,
    postprocess_estimate,
    robust_mean,
    shift_map,
)


class TestShiftMap:
    def test_explicit_row(self):
        X = np.array([[2.0, 0.0]])
        y = np.array([5.0])
        beta1 = np.array([1.0, 1.0])
        # residual 5 - 2 = 3, row = beta1 + 3 * x
        np.testing.assert_allclose(shift_map(X, y, beta1), [[7.0, 1.0]])

    def test_exact_estimate_with_isotropic_rows(self):
        # when beta1 = beta* every row equals beta* + z_i x_i; with zero
        # noise the map returns beta* in every row
        rng = np.random.default_rng(0)
        X = rng.standard_normal((30, 3))
        beta = rng.standard_normal(3)
        rows = shift_map(X, X @ beta, beta)
        np.testing.assert_allclose(rows, np.tile(beta, (30, 1)), atol=1e-12)

    def test_population_identity_gaussian(self):
        # E[(y - x'b1) x] = Sigma (beta* - b1); with Sigma = I the row mean
        # concentrates on beta* regardless of b1
        rng = np.random.default_rng(1)
        n = 200_000
        X = rng.standard_normal((n, 2))
        beta = np.array([1.0, -2.0])
        y = X @ beta + 0.1 * rng.standard_normal(n)
        b1 = np.array([5.0, 5.0])
        rows = shift_map(X, y, b1)
        np.testing.assert_allclose(rows.mean(axis=0), beta, atol=0.05)

    def test_shape_validation(self):
        with pytest.raises(InvalidInputError):
            shift_map(np.ones((3, 2)), np.ones(4), np.ones(2))
        with pytest.raises(InvalidInputError):
            shift_map(np.ones((3, 2)), np.ones(3), np.ones(3))


class TestBuckets:
    def test_partition_mean_preserved_when_divisible(self):
        rng = np.random.default_rng(2)
        pts = rng.standard_normal((24, 2))
        means = median_of_means_buckets(pts, 4, seed=7)
        assert means.shape == (4, 2)
        # buckets partition all 24 points, so bucket means average to the
        # grand mean exactly
        np.testing.assert_allclose(means.mean(axis=0), pts.mean(axis=0), atol=1e-12)

    def test_remainder_points_dropped(self):
        pts = np.arange(10, dtype=float)
        means = median_of_means_buckets(pts, 3, seed=0)
        assert means.shape == (3, 1)

    def test_k_one_is_grand_mean(self):
        pts = np.array([[1.0], [2.0], [6.0]])
        np.testing.assert_allclose(median_of_means_buckets(pts, 1), [[3.0]])

    def test_seed_controls_assignment(self):
        rng = np.random.default_rng(3)
        pts = rng.standard_normal((40, 1))
        a = median_of_means_buckets(pts, 5, seed=1)
        b = median_of_means_buckets(pts, 5, seed=1)
        c = median_of_means_buckets(pts, 5, seed=2)
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_k_validation(self):
        with pytest.raises(InvalidInputError):
            median_of_means_buckets(np.ones(3), 0)
        with pytest.raises(InvalidInputError):
            median_of_means_buckets(np.ones(3), 4)


class TestRobustMean:
    def test_budget_zero_is_plain_mean(self):
        rng = np.random.default_rng(4)
        pts = rng.standard_normal((20, 2))
        np.testing.assert_allclose(robust_mean(pts, 0), pts.mean(axis=0), atol=1e-12)

    def test_outlier_removed_before_averaging(self):
        rng = np.random.default_rng(5)
        pts = rng.standard_normal((50, 2))
        pts[0] = [500.0, -500.0]
        est = robust_mean(pts, 3)
        assert np.linalg.norm(est) < 1.0
        assert np.linalg.norm(pts.mean(axis=0)) > 5.0

    def test_offset_cloud_kept_intact(self):
        # recentering matters: a cloud far from the origin must not have
        # its own bulk mistaken for outliers
        rng = np.random.default_rng(6)
        pts = 1000.0 + rng.standard_normal((60, 1))
        est = robust_mean(pts, 5)
        assert abs(est[0] - 1000.0) < 1.0


class TestPostprocess:
    def test_config_validation(self):
        with pytest.raises(InvalidConfigError):
            PostprocessConfig(bucket_count=0)
        with pytest.raises(InvalidConfigError):
            PostprocessConfig(bucket_count=5, filter_budget=-1)

    def test_resolved_budget_default(self):
        assert PostprocessConfig(bucket_count=10).resolved_budget == 2
        assert PostprocessConfig(bucket_count=10, filter_budget=0).resolved_budget == 0

    def test_nonfinite_initial_rejected(self):
        X = np.ones((10, 1))
        with pytest.raises(InvalidInputError):
            postprocess_estimate(X, np.ones(10), np.array([np.inf]), PostprocessConfig(bucket_count=2))

    def test_improves_rough_initial_gaussian(self):
        rng = np.random.default_rng(7)
        n, p = 4000, 3
        X = rng.standard_normal((n, p))
        beta = np.array([1.0, -1.0, 0.5])
        y = X @ beta + 0.3 * rng.standard_normal(n)
        rough = beta + np.array([0.4, -0.4, 0.4])
        cfg = PostprocessConfig(bucket_count=200, seed=0)
        out = postprocess_estimate(X, y, rough, cfg)
        assert np.linalg.norm(out - beta) < 0.5 * np.linalg.norm(rough - beta)

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(8)
        X = rng.standard_normal((300, 2))
        y = X @ np.ones(2) + rng.standard_normal(300)
        cfg = PostprocessConfig(bucket_count=20, seed=5)
        a = postprocess_estimate(X, y, np.zeros(2), cfg)
        b = postprocess_estimate(X, y, np.zeros(2), cfg)
        np.testing.assert_array_equal(a, b)

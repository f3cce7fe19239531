"""One-step improvement of a rough regression estimate.

Each sample is pushed through the shift identity beta1 + (y - x'beta1) x,
whose rows all have expectation beta*; estimating beta* then reduces to
robust mean estimation, done here by median-of-means bucketing followed by
a recentering filter over the bucket means.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfigError, InvalidInputError
from .filtering import FilterConfig, filter_covariates


@dataclass(frozen=True)
class PostprocessConfig:
    bucket_count: int
    filter_budget: int | None = None  # None: ceil(0.2 * bucket_count)
    seed: int = 0

    def __post_init__(self):
        if self.bucket_count < 1:
            raise InvalidConfigError("bucket_count must be at least 1")
        if self.filter_budget is not None and self.filter_budget < 0:
            raise InvalidConfigError("filter_budget must be nonnegative")

    @property
    def resolved_budget(self):
        if self.filter_budget is not None:
            return self.filter_budget
        return math.ceil(0.2 * self.bucket_count)


def shift_map(X, y, beta1):
    """Row i of the result is beta1 + (y_i - x_i'beta1) * x_i."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y, dtype=float)
    beta1 = np.asarray(beta1, dtype=float)
    if y.shape[0] != X.shape[0] or beta1.shape[0] != X.shape[1]:
        raise InvalidInputError("inconsistent shapes")
    return beta1[None, :] + (y - X @ beta1)[:, None] * X


def median_of_means_buckets(points, k, seed=0):
    """Means of k equal-sized buckets of a seeded random permutation.

    The n mod k trailing points of the permutation are dropped, so the
    buckets partition exactly k * (n // k) points.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    n = points.shape[0]
    if not 1 <= k <= n:
        raise InvalidInputError(f"k={k} outside [1, {n}]")
    perm = np.random.default_rng(seed).permutation(n)
    size = n // k
    kept = points[perm[: k * size]]
    return kept.reshape(k, size, points.shape[1]).mean(axis=1)


def robust_mean(points, filter_budget):
    """Filter with recentering each round, then average the survivors.

    The mean is the estimand here, so the centered second moment drives
    the scores; with budget 0 this is the plain mean.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    cfg = FilterConfig(budget=filter_budget, recenter=True)
    keep = filter_covariates(points, cfg).surviving_indices
    return points[keep].mean(axis=0)


def postprocess_estimate(X, y, beta1, cfg):
    """shift_map, median-of-means bucketing, then the recentering filter
    mean over bucket means."""
    beta1 = np.asarray(beta1, dtype=float)
    if not np.all(np.isfinite(beta1)):
        raise InvalidInputError("initial estimate must be finite")
    shifted = shift_map(X, y, beta1)
    means = median_of_means_buckets(shifted, cfg.bucket_count, seed=cfg.seed)
    return robust_mean(means, cfg.resolved_budget)

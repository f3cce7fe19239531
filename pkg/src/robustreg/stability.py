"""Certifiers for the four subset-stability notions.

Exact certification enumerates subsets, so it is capped at small n; the
large-n path for weak stability is a greedy search and is marked inexact.
Boundary equalities count as passes throughout (the definitions use
non-strict inequalities).
"""

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import DomainError, InvalidConfigError, InvalidInputError, SizeCapError

ENUM_CAP_N = 20
ENUM_CAP_SUBSETS = 10**6


@dataclass(frozen=True)
class StrongStabilityQuery:
    epsilon: float
    delta: float
    mu: np.ndarray
    sigma2: float

    def __post_init__(self):
        if not 0 < self.epsilon < 0.5:
            raise InvalidConfigError("epsilon must lie in (0, 1/2)")
        if self.delta < self.epsilon:
            raise InvalidConfigError("delta must be >= epsilon")
        if self.sigma2 <= 0:
            raise InvalidConfigError("sigma2 must be positive")


@dataclass(frozen=True)
class WeakStabilityParams:
    epsilon: float
    L: float
    U: float
    exact: bool = True


@dataclass(frozen=True)
class SscSssProfile:
    m: int
    lambda_m: float
    Lambda_m: float


@dataclass(frozen=True)
class L1StabilityEstimate:
    epsilon: float
    m_upper: float
    M_lower: float
    directions_sampled: int
    exact: bool


def _as_points(points):
    X = np.asarray(points, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    return X


def _spectral_norm(A):
    return float(np.max(np.abs(np.linalg.eigvalsh(A))))


def _min_subset_size(n, epsilon):
    return max(int(math.ceil((1.0 - epsilon) * n)), 1)


def check_strong_stability(points, q):
    """Enumerate every subset of size >= (1-eps)n and test both the mean
    deviation and the spectral deviation of the centered second moment.

    Returns (pass, worst_mean_dev, worst_spectral_dev).
    """
    X = _as_points(points)
    n, p = X.shape
    if n > ENUM_CAP_N:
        raise SizeCapError(f"exact check limited to n <= {ENUM_CAP_N}, got {n}")
    mu = np.asarray(q.mu, dtype=float).reshape(p)
    m0 = _min_subset_size(n, q.epsilon)

    dev = X - mu
    outers = dev[:, :, None] * dev[:, None, :]
    eye = np.eye(p)

    worst_mean = 0.0
    worst_spec = 0.0
    for size in range(m0, n + 1):
        for comb in combinations(range(n), size):
            idx = list(comb)
            mean_dev = float(np.linalg.norm(dev[idx].mean(axis=0)))
            M = outers[idx].sum(axis=0) / size
            spec_dev = _spectral_norm(M - q.sigma2 * eye)
            worst_mean = max(worst_mean, mean_dev)
            worst_spec = max(worst_spec, spec_dev)

    sigma = math.sqrt(q.sigma2)
    ok = worst_mean <= sigma * q.delta and worst_spec <= q.sigma2 * q.delta**2 / q.epsilon
    return ok, worst_mean, worst_spec


def weak_stability_params(points, epsilon):
    """Extremal eigenvalues of subset second moments, normalized by the
    full point count (not the subset size).

    Because each x x^T term is PSD, every subset matrix is dominated by the
    full-set matrix, so U is attained at the full set; likewise the minimum
    eigenvalue can only shrink as points are dropped, so L is attained at
    the smallest admissible subset size.  Exact enumeration above n=20 is
    replaced by greedy eigenvalue-minimizing removal, flagged inexact.
    """
    X = _as_points(points)
    n, p = X.shape
    if not 0 <= epsilon < 1:
        raise InvalidConfigError("epsilon must lie in [0, 1)")
    m0 = _min_subset_size(n, epsilon)

    full = X.T @ X
    U = float(np.max(np.linalg.eigvalsh(full))) / n
    if m0 == n:
        L = float(np.min(np.linalg.eigvalsh(full))) / n
        return WeakStabilityParams(epsilon, L, U, exact=True)

    outers = X[:, :, None] * X[:, None, :]
    if n <= ENUM_CAP_N:
        L = min(
            float(np.min(np.linalg.eigvalsh(outers[list(comb)].sum(axis=0))))
            for comb in combinations(range(n), m0)
        ) / n
        return WeakStabilityParams(epsilon, L, U, exact=True)

    # greedy: repeatedly drop the point whose removal shrinks lambda_min most
    alive = list(range(n))
    current = full.copy()
    for _ in range(n - m0):
        best_i, best_val = None, None
        for i in alive:
            val = float(np.min(np.linalg.eigvalsh(current - outers[i])))
            if best_val is None or val < best_val:
                best_i, best_val = i, val
        current -= outers[best_i]
        alive.remove(best_i)
    L = float(np.min(np.linalg.eigvalsh(current))) / n
    return WeakStabilityParams(epsilon, L, U, exact=False)


def strong_to_weak(epsilon, delta):
    """Convert strong-stability parameters to weak ones:
    L = (1 - eps)(1 - delta^2/eps), U = 1 + delta^2/eps."""
    if not 0 < epsilon < 0.5:
        raise DomainError("epsilon must lie in (0, 1/2)")
    ratio = delta**2 / epsilon
    if ratio >= 1:
        raise DomainError(f"delta^2/epsilon = {ratio} >= 1: conversion undefined")
    return WeakStabilityParams(epsilon, (1 - epsilon) * (1 - ratio), 1 + ratio, exact=True)


def ssc_sss_params(points, m):
    """Extremal eigenvalues of unnormalized Gram sums over all size-m
    subsets (lambda_m = worst min eigenvalue, Lambda_m = worst max)."""
    X = _as_points(points)
    n, _ = X.shape
    if not 1 <= m <= n:
        raise InvalidInputError(f"level m={m} outside [1, {n}]")
    n_subsets = math.comb(n, m)
    if n_subsets > ENUM_CAP_SUBSETS:
        raise SizeCapError(f"C({n},{m}) = {n_subsets} exceeds enumeration cap")

    outers = X[:, :, None] * X[:, None, :]
    lam = math.inf
    Lam = -math.inf
    for comb in combinations(range(n), m):
        eigs = np.linalg.eigvalsh(outers[list(comb)].sum(axis=0))
        lam = min(lam, float(eigs[0]))
        Lam = max(Lam, float(eigs[-1]))
    return SscSssProfile(m=m, lambda_m=lam, Lambda_m=Lam)


def l1_stability_estimate(points, epsilon, n_directions, seed):
    """Sampled-direction bounds for l1 stability.

    For a fixed unit direction the worst subsets are order statistics of
    the absolute projections: dropping the floor(eps*n) largest minimizes
    the kept average (M candidate) and keeping them maximizes the
    discarded average (m candidate).  Exact only in one dimension, where
    the two signed directions exhaust the sphere.
    """
    X = _as_points(points)
    n, p = X.shape
    if n_directions < 1:
        raise InvalidConfigError("need at least one direction")
    k = int(math.floor(epsilon * n))

    if p == 1:
        dirs = np.array([[1.0], [-1.0]])
        exact = True
    else:
        rng = np.random.default_rng(seed)
        dirs = rng.standard_normal((n_directions, p))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        exact = False

    M_lower = math.inf
    m_upper = 0.0
    for v in dirs:
        proj = np.sort(np.abs(X @ v))
        kept = float(proj[: n - k].sum()) / n
        dropped = float(proj[n - k :].sum()) / n if k > 0 else 0.0
        M_lower = min(M_lower, kept)
        m_upper = max(m_upper, dropped)
    return L1StabilityEstimate(epsilon, m_upper, M_lower, len(dirs), exact)

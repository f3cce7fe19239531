"""Iterative spectral filtering of covariates.

Each round finds the direction of largest second moment and removes the
single point with the largest squared projection along it.  Removing the
most outlying point per round keeps the procedure deterministic (ties break
toward the smaller index).
"""

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidConfigError, InvalidInputError
from .numerics import power_iteration

MODE_EXACT = "exact"  # remove exactly `budget` points
MODE_SPECTRAL = "spectral"  # stop early once the top eigenvalue is flat


@dataclass(frozen=True)
class FilterConfig:
    budget: int
    mode: str = MODE_EXACT
    spectral_threshold: float = 1.5
    recenter: bool = False

    def __post_init__(self):
        if self.budget < 0:
            raise InvalidConfigError("budget must be nonnegative")
        if self.mode not in (MODE_EXACT, MODE_SPECTRAL):
            raise InvalidConfigError(f"unknown filter mode {self.mode!r}")
        if self.spectral_threshold <= 0:
            raise InvalidConfigError("spectral_threshold must be positive")


class RemovalRecord(NamedTuple):
    index: int
    score: float
    top_eigenvalue: float


@dataclass
class FilterReport:
    surviving_indices: np.ndarray
    removal_trace: list  # one RemovalRecord per removal, in removal order

    @property
    def removed_indices(self):
        return np.array([t.index for t in self.removal_trace], dtype=int)


def second_moment_matrix(points, indices=None, recenter=False):
    """(1/|S|) sum of x x^T over the selected rows, optionally centered at
    the selected rows' mean."""
    X = np.asarray(points, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if indices is None:
        sub = X
    else:
        indices = np.asarray(indices, dtype=int)
        if indices.size == 0:
            raise InvalidInputError("empty index set")
        sub = X[indices]
    if sub.shape[0] == 0:
        raise InvalidInputError("empty index set")
    if recenter:
        sub = sub - sub.mean(axis=0)
    return (sub.T @ sub) / sub.shape[0]


def _scores(X, indices, recenter, v0):
    M = second_moment_matrix(X, indices, recenter)
    # a tied top pair stalls the residual at the gap size while the iterate
    # already lies in the top eigenplane, so a modest budget is enough for
    # ranking; non-convergence is reported, never swallowed
    lam, v, ok = power_iteration(M, tol=1e-8, max_iters=1000, v0=v0)
    if not ok:
        warnings.warn("power iteration did not converge while scoring outliers")
    sub = X[indices]
    if recenter:
        sub = sub - sub.mean(axis=0)
    return (sub @ v) ** 2, lam, v


def outlier_scores(points, indices=None, recenter=False):
    """Squared projections onto the top eigenvector of the second-moment
    matrix, one score per selected row, plus the top eigenvalue."""
    X = np.asarray(points, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if indices is None:
        indices = np.arange(X.shape[0])
    scores, lam, _ = _scores(X, indices, recenter, None)
    return scores, lam


def filter_covariates(points, cfg):
    """Run the removal loop and report survivors plus the removal trace.

    In exact mode exactly ``cfg.budget`` points are removed; in spectral
    mode removal stops as soon as the top eigenvalue is at most
    ``cfg.spectral_threshold``.
    """
    X = np.asarray(points, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    if cfg.budget >= n / 2:
        raise InvalidConfigError(f"budget {cfg.budget} too large for {n} points")

    alive = np.arange(n)
    trace = []
    v_prev = None  # warm start: one removal barely moves the top eigenvector
    for _ in range(cfg.budget):
        scores, lam, v_prev = _scores(X, alive, cfg.recenter, v_prev)
        if cfg.mode == MODE_SPECTRAL and lam <= cfg.spectral_threshold:
            break
        worst = int(np.argmax(scores))  # first maximum = smallest index
        trace.append(RemovalRecord(int(alive[worst]), float(scores[worst]), float(lam)))
        alive = np.delete(alive, worst)
    return FilterReport(surviving_indices=alive, removal_trace=trace)

"""Least trimmed squares via alternating minimization.

The iterate is the sparse corruption estimate b: project the current
residual claim onto the design's column space, re-threshold, repeat, then
solve ordinary least squares against the cleaned responses y - b.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfigError, InvalidInputError, NumericalError, RankDeficiencyError
from .filtering import filter_covariates
from .lad import fit_lad
from .numerics import RANK_RTOL, power_iteration, solve_least_squares
from .result import EstimatorResult

# above this row count the projector is applied implicitly instead of stored
MATERIALIZE_MAX_N = 2000


@dataclass(frozen=True)
class LtsConfig:
    m: int
    max_iters: int = 100
    stop_tol_alpha: float = 0.0  # stop when ||b_j - b_{j-1}|| <= alpha * sqrt(n); 0 disables
    warm_start: object = "zero"  # "zero", "lad", or an explicit regression vector

    def __post_init__(self):
        if self.m < 0:
            raise InvalidConfigError("trimming parameter must be nonnegative")
        if self.max_iters < 1:
            raise InvalidConfigError("need at least one iteration")
        if self.stop_tol_alpha < 0:
            raise InvalidConfigError("stop_tol_alpha must be nonnegative")
        if isinstance(self.warm_start, str) and self.warm_start not in ("zero", "lad"):
            raise InvalidConfigError(f"unknown warm start {self.warm_start!r}")


def hard_threshold(v, m):
    """Keep the m largest-magnitude entries (smaller index wins ties),
    zero the rest."""
    v = np.asarray(v, dtype=float)
    n = v.size
    if not 0 <= m <= n:
        raise InvalidInputError(f"m={m} outside [0, {n}]")
    if m == n:
        return v.copy()
    out = np.zeros(n)
    if m == 0:
        return out
    # stable sort on negated magnitudes: equal entries keep index order
    keep = np.argsort(-np.abs(v), kind="stable")[:m]
    out[keep] = v[keep]
    return out


def _qr_projector(X):
    """Thin-QR column-space projector, with the shared rank check."""
    Q, R = np.linalg.qr(X)
    tol = RANK_RTOL * float(np.linalg.norm(X, axis=0).max(initial=0.0))
    rank = int(np.count_nonzero(np.abs(np.diag(R)) > tol))
    if rank < X.shape[1]:
        raise RankDeficiencyError(rank, X.shape[1])
    if X.shape[0] <= MATERIALIZE_MAX_N:
        P = Q @ Q.T
        return lambda v: P @ v
    return lambda v: Q @ (Q.T @ v)


def lts_step(X, y, b_prev, m):
    """One update: HT_m(P_X b_prev + (I - P_X) y), with the projection
    applied through a least-squares solve rather than a stored hat matrix."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y, dtype=float)
    b_prev = np.asarray(b_prev, dtype=float)
    # P b + (I - P) y = y - P (y - b)
    proj = X @ solve_least_squares(X, y - b_prev)
    return hard_threshold(y - proj, m)


def _trimmed_objective(X, y, beta, m):
    r2 = np.sort((y - X @ beta) ** 2)
    kept = r2[: r2.size - m]
    return 0.5 * float(kept.sum()) / r2.size


def fit_lts(X, y, cfg):
    """Alternate thresholding and projection from b = 0, then solve least
    squares on y - b.

    A non-zero warm start seeds b as HT_m of the residuals at a regression
    vector: the LAD fit for ``warm_start="lad"``, or any explicit vector.

    Stops after ``max_iters`` rounds, or earlier when the iterate change
    drops below ``stop_tol_alpha * sqrt(n)`` (if enabled).  ``converged``
    is False only when that rule was enabled and never fired; the reported
    objective is the average of the n - m smallest squared residuals,
    halved.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y, dtype=float)
    n = X.shape[0]
    if not 0 <= cfg.m < n:
        raise InvalidConfigError(f"m={cfg.m} must be below the row count {n}")

    apply_proj = _qr_projector(X)
    if isinstance(cfg.warm_start, str):
        if cfg.warm_start == "lad":
            b = hard_threshold(y - X @ fit_lad(X, y).beta_hat, cfg.m)
        else:
            b = np.zeros(n)
    else:
        beta0 = np.asarray(cfg.warm_start, dtype=float).reshape(X.shape[1])
        if not np.all(np.isfinite(beta0)):
            raise InvalidInputError("warm start vector must be finite")
        b = hard_threshold(y - X @ beta0, cfg.m)

    stop_at = cfg.stop_tol_alpha * math.sqrt(n)
    change = math.inf
    stopped_early = False
    iterations = 0
    for j in range(1, cfg.max_iters + 1):
        b_next = hard_threshold(y - apply_proj(y - b), cfg.m)
        if not np.all(np.isfinite(b_next)):
            raise NumericalError("non-finite iterate", iteration=j)
        change = float(np.linalg.norm(b_next - b))
        b = b_next
        iterations = j
        if cfg.stop_tol_alpha > 0 and change <= stop_at:
            stopped_early = True
            break

    beta = solve_least_squares(X, y - b)
    converged = stopped_early or cfg.stop_tol_alpha == 0
    return EstimatorResult(
        beta_hat=beta,
        iterations=iterations,
        final_objective=_trimmed_objective(X, y, beta, cfg.m),
        final_grad_norm=change,
        converged=converged,
    )


def iteration_bound(X, y, alpha):
    """Data-driven iteration count: ceil(log2(||y|| (1 + ||X||) / alpha)),
    with the spectral norm of X taken from power iteration on X^T X."""
    if alpha <= 0:
        raise InvalidConfigError("alpha must be positive")
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y, dtype=float)
    lam, _, _ = power_iteration(X.T @ X)
    x_norm = math.sqrt(max(lam, 0.0))
    ratio = float(np.linalg.norm(y)) * (1.0 + x_norm) / alpha
    return max(int(math.ceil(math.log2(ratio))), 1) if ratio > 1 else 1


def lts_pipeline(X, y, cfg, filter_cfg=None):
    """Covariate filtering, then the trimmed fit on the survivors.  The
    trimming count cfg.m applies to the post-filter sample."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y, dtype=float)
    if filter_cfg is not None and filter_cfg.budget > 0:
        keep = filter_covariates(X, filter_cfg).surviving_indices
        X, y = X[keep], y[keep]
    return fit_lts(X, y, cfg)

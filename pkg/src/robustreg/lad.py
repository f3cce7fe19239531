"""Least-absolute-deviation regression.

The solver is iteratively reweighted least squares with a graduated
smoothing floor: each stage solves the weighted problem with weights
1/max(|r_i|, delta) until the l1 objective stabilizes, then shrinks delta
and warm-starts the next stage.  A tiny brute-force vertex oracle is kept
alongside for certification: an l1 optimum always interpolates p rows.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import InvalidConfigError, InvalidInputError, SizeCapError
from .filtering import filter_covariates
from .numerics import solve_least_squares
from .result import EstimatorResult

ORACLE_MAX_N = 12
ORACLE_MAX_P = 3


@dataclass(frozen=True)
class LadConfig:
    smoothing_schedule: tuple = (1.0, 0.1, 0.01, 1e-4, 1e-6)
    # near a vertex the reweighted steps can crawl; the cap is a safety
    # valve, so it has to sit well above typical convergence (tens of steps)
    inner_max_iters: int = 2000
    obj_tol: float = 1e-12

    def __post_init__(self):
        s = self.smoothing_schedule
        if len(s) == 0 or any(d <= 0 for d in s) or any(a <= b for a, b in zip(s, s[1:])):
            raise InvalidConfigError("schedule must be strictly decreasing and positive")
        if self.inner_max_iters < 1 or self.obj_tol < 0:
            raise InvalidConfigError("bad solver limits")


def _l1_objective(X, y, beta):
    return float(np.abs(y - X @ beta).sum())


def fit_lad(X, y, cfg=None):
    """Minimize sum |y_i - x_i^T beta| by graduated IRLS.

    Returns the best iterate seen, evaluated under the true l1 objective,
    so the objective is non-increasing across stage boundaries by
    construction.
    """
    cfg = cfg or LadConfig()
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    if n < p:
        raise InvalidInputError(f"need n >= p, got {n} < {p}")

    beta = solve_least_squares(X, y)
    best_beta = beta
    best_obj = _l1_objective(X, y, beta)
    iterations = 0
    last_change = np.inf

    for delta in cfg.smoothing_schedule:
        prev_obj = _l1_objective(X, y, beta)
        for _ in range(cfg.inner_max_iters):
            r = y - X @ beta
            w = 1.0 / np.maximum(np.abs(r), delta)
            sw = np.sqrt(w)
            beta = solve_least_squares(X * sw[:, None], y * sw)
            iterations += 1
            obj = _l1_objective(X, y, beta)
            if obj < best_obj:
                best_obj, best_beta = obj, beta
            last_change = abs(prev_obj - obj)
            if last_change <= cfg.obj_tol * (1.0 + obj):
                break
            prev_obj = obj

    return EstimatorResult(
        beta_hat=best_beta,
        iterations=iterations,
        final_objective=best_obj,
        final_grad_norm=last_change,
        converged=True,
    )


def lad_vertex_oracle(X, y):
    """Exact l1 minimum for tiny instances by enumerating all p-row
    interpolations (ties resolved by lexicographic subset order).

    Returns (beta, objective).
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    if n > ORACLE_MAX_N or p > ORACLE_MAX_P:
        raise SizeCapError(f"oracle limited to n <= {ORACLE_MAX_N}, p <= {ORACLE_MAX_P}")

    scale = max(float(np.abs(X).max()), 1.0)
    best = None
    for comb in combinations(range(n), p):
        sub = X[list(comb)]
        if abs(np.linalg.det(sub)) <= 1e-12 * scale**p:
            continue
        beta = np.linalg.solve(sub, y[list(comb)])
        obj = _l1_objective(X, y, beta)
        if best is None or obj < best[1]:
            best = (beta, obj)
    if best is None:
        raise InvalidInputError("no invertible row subset: design not full rank")
    return best


def lad_pipeline(X, y, cfg=None, filter_cfg=None):
    """Covariate filtering followed by a LAD fit on the survivors."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y, dtype=float)
    if filter_cfg is not None and filter_cfg.budget > 0:
        report = filter_covariates(X, filter_cfg)
        keep = report.surviving_indices
        X, y = X[keep], y[keep]
    return fit_lad(X, y, cfg)

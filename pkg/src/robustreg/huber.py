"""Huber-loss regression: loss kernels, a line-search gradient-descent
fitter, pairwise symmetrization, and data-driven selection of the loss
transition point."""

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfigError, InvalidInputError, NumericalError
from .filtering import filter_covariates
from .lad import fit_lad
from .numerics import empirical_quantile
from .result import EstimatorResult

GAMMA_MIN = 1e-8  # floor for auto-estimated gamma on (near-)noiseless data


@dataclass(frozen=True)
class HuberConfig:
    gamma: float
    max_iters: int = 10000
    grad_tol: float = None  # None -> 1e-8 * (1 + initial gradient norm)
    init: object = None  # None (zeros), "lad", or an explicit vector
    ls_shrink: float = 0.5
    ls_decrease: float = 1e-4
    record_history: bool = False

    def __post_init__(self):
        if self.gamma <= 0:
            raise InvalidConfigError("gamma must be positive")
        if not 0 < self.ls_shrink < 1 or not 0 < self.ls_decrease < 1:
            raise InvalidConfigError("line-search constants must lie in (0, 1)")
        if self.grad_tol is not None and self.grad_tol <= 0:
            raise InvalidConfigError("grad_tol must be positive")


def huber_loss_and_grad(x, gamma):
    """Pointwise loss and its derivative: quadratic inside [-gamma, gamma],
    linear outside, matched at the knee.  Accepts scalars or arrays."""
    if gamma <= 0:
        raise InvalidConfigError("gamma must be positive")
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) <= gamma
    loss = np.where(inside, 0.5 * x**2, gamma * np.abs(x) - 0.5 * gamma**2)
    psi = np.where(inside, x, gamma * np.sign(x))
    if loss.ndim == 0:
        return float(loss), float(psi)
    return loss, psi


def huber_objective_grad(X, y, beta, gamma):
    """Average loss over residuals and its gradient in beta."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    beta = np.asarray(beta, dtype=float)
    n, p = X.shape
    if y.shape != (n,) or beta.shape != (p,):
        raise InvalidInputError("inconsistent shapes")
    r = y - X @ beta
    loss, psi = huber_loss_and_grad(r, gamma)
    return float(loss.mean()), -(X.T @ psi) / n


def fit_huber(X, y, cfg):
    """Gradient descent with backtracking line search.

    Parameters
    ----------
    X, y : design matrix and responses.
    cfg : HuberConfig
        ``init`` may be None (zero start), an explicit vector, or "lad"
        for a median-regression warm start.

    Returns
    -------
    EstimatorResult
        ``converged`` is True iff the gradient norm reached its tolerance.
        Every accepted step strictly decreases the objective; if no step of
        length >= 1e-20 can decrease it further the iteration stops where
        it stands.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y, dtype=float)
    n, p = X.shape

    if cfg.init is None:
        beta = np.zeros(p)
    elif isinstance(cfg.init, str) and cfg.init == "lad":
        beta = fit_lad(X, y).beta_hat
    else:
        beta = np.asarray(cfg.init, dtype=float).reshape(p).copy()

    def objective(b):
        loss, _ = huber_loss_and_grad(y - X @ b, cfg.gamma)
        return float(loss.mean())

    obj, grad = huber_objective_grad(X, y, beta, cfg.gamma)
    if not math.isfinite(obj):
        raise NumericalError("non-finite objective at start", iteration=0)
    tol = cfg.grad_tol if cfg.grad_tol is not None else 1e-8 * (1.0 + float(np.linalg.norm(grad)))
    history = [obj]

    iterations = 0
    converged = False
    for it in range(1, cfg.max_iters + 1):
        gnorm = float(np.linalg.norm(grad))
        if gnorm <= tol:
            converged = True
            break
        # backtrack from unit step until sufficient decrease
        t = 1.0
        g2 = gnorm * gnorm
        stalled = False
        while True:
            cand = beta - t * grad
            cand_obj = objective(cand)
            if not math.isfinite(cand_obj):
                raise NumericalError("non-finite objective in line search", iteration=it)
            if cand_obj <= obj - cfg.ls_decrease * t * g2:
                break
            t *= cfg.ls_shrink
            if t < 1e-20:
                stalled = True
                break
        if stalled:
            break
        beta = cand
        obj = cand_obj
        iterations = it
        _, grad = huber_objective_grad(X, y, beta, cfg.gamma)
        if cfg.record_history:
            history.append(obj)

    gnorm = float(np.linalg.norm(grad))
    if gnorm <= tol:
        converged = True
    return EstimatorResult(
        beta_hat=beta,
        iterations=iterations,
        final_objective=obj,
        final_grad_norm=gnorm,
        converged=converged,
        objective_history=tuple(history) if cfg.record_history else (),
    )


def symmetrize_pairs(X, y):
    """Difference the two halves pairwise, scaled by 1/sqrt(2), turning
    i.i.d. noise into symmetric noise at half the sample size."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y, dtype=float)
    if X.shape[0] % 2 != 0:
        raise InvalidInputError("pairwise symmetrization needs an even row count")
    n = X.shape[0] // 2
    return (X[:n] - X[n:]) / math.sqrt(2.0), (y[:n] - y[n:]) / math.sqrt(2.0)


def estimate_gamma(X, y, c_star=0.1, seed=0):
    """Pick the loss transition point from the data.

    Splits the sample in half by a seeded permutation, fits LAD on the
    first half, symmetrizes the second half and takes twice the
    (1 - c_star/4) empirical quantile of the absolute symmetrized
    residuals.  Degenerate noiseless data yields 0; callers floor the
    value at GAMMA_MIN.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y, dtype=float)
    n = X.shape[0]
    if n < 4:
        raise InvalidInputError("gamma estimation needs at least 4 points")
    if not 0 < c_star < 1:
        raise InvalidConfigError("c_star must lie in (0, 1)")

    perm = np.random.default_rng(seed).permutation(n)
    half = n // 2
    fit_half = perm[:half]
    beta0 = fit_lad(X[fit_half], y[fit_half]).beta_hat

    rest = perm[half:]
    pairs = (rest.size // 2) * 2  # drop one leftover point if odd
    rest = rest[:pairs]
    Xs, ys = symmetrize_pairs(X[rest], y[rest])
    resid = np.abs(ys - Xs @ beta0)
    return 2.0 * empirical_quantile(resid, 1.0 - c_star / 4.0)


def huber_pipeline(X, y, gamma, filter_cfg, cfg=None, c_star=0.1, seed=0):
    """Symmetrize pairs, filter the symmetrized covariates, then fit.

    ``gamma="auto"`` estimates the transition point from the raw data
    before symmetrization.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y, dtype=float)
    if gamma == "auto":
        gamma = max(estimate_gamma(X, y, c_star=c_star, seed=seed), GAMMA_MIN)
    Xs, ys = symmetrize_pairs(X, y)
    if filter_cfg is not None and filter_cfg.budget > 0:
        keep = filter_covariates(Xs, filter_cfg).surviving_indices
        Xs, ys = Xs[keep], ys[keep]
    if cfg is None:
        cfg = HuberConfig(gamma=gamma)
    else:
        cfg = dataclasses.replace(cfg, gamma=gamma)
    return fit_huber(Xs, ys, cfg)

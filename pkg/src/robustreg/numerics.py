"""Dense linear-algebra and order-statistics kernels used everywhere else."""

import math

import numpy as np
import scipy.linalg

from .errors import InvalidInputError, RankDeficiencyError

# Rank tolerance is relative to the largest column norm; see solve_least_squares.
RANK_RTOL = 1e-10


def power_iteration(M, tol=1e-10, max_iters=5000, v0=None):
    """Dominant eigenpair of a symmetric PSD matrix by power iteration.

    Parameters
    ----------
    M : (d, d) array
        Symmetric positive semidefinite matrix.
    tol : float
        Residual tolerance: iteration stops once ``||M v - lam v|| <= tol * max(lam, 1)``.
    max_iters : int
        Iteration budget per start vector.
    v0 : (d,) array, optional
        Starting vector; the normalized all-ones vector when omitted.
        Callers that solve a sequence of nearby problems warm-start with
        the previous eigenvector.

    Returns
    -------
    (lam, v, converged) : (float, (d,) array, bool)
        Eigenvalue estimate, unit eigenvector, and whether the residual
        test was met.  On failure the best iterate seen is returned with
        ``converged=False``.

    If the first run stalls, one seeded random restart is attempted and
    the better of the two iterates (smaller relative residual) is kept.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise InvalidInputError("power_iteration needs a square matrix")
    if not np.all(np.isfinite(M)):
        raise InvalidInputError("power_iteration needs finite entries")
    if tol <= 0:
        raise InvalidInputError("tol must be positive")

    d = M.shape[0]
    if v0 is not None:
        v0 = np.asarray(v0, dtype=float)
        if v0.shape != (d,) or not np.all(np.isfinite(v0)) or np.linalg.norm(v0) == 0.0:
            raise InvalidInputError("v0 must be a finite nonzero length-d vector")

    def run(v0):
        v = v0 / np.linalg.norm(v0)
        best = None
        for _ in range(max_iters):
            w = M @ v
            lam = float(v @ w)
            resid = float(np.linalg.norm(w - lam * v))
            bound = tol * max(lam, 1.0)
            if best is None or resid / max(lam, 1.0) < best[2]:
                best = (lam, v, resid / max(lam, 1.0))
            if resid <= bound:
                return lam, v, True
            nw = np.linalg.norm(w)
            if nw == 0.0:
                # v is in the kernel: (0, v) is an exact eigenpair.
                return 0.0, v, True
            v = w / nw
        lam, v, _ = best
        return lam, v, False

    lam, v, ok = run(np.ones(d) if v0 is None else v0)
    if not ok:
        rng = np.random.default_rng(0)
        lam2, v2, ok2 = run(rng.standard_normal(d))
        r1 = np.linalg.norm(M @ v - lam * v) / max(lam, 1.0)
        r2 = np.linalg.norm(M @ v2 - lam2 * v2) / max(lam2, 1.0)
        if ok2 or r2 < r1:
            return lam2, v2, ok2
    return lam, v, ok


def solve_least_squares(X, y):
    """Minimize ``||X b - y||_2`` via a QR factorization.

    Parameters
    ----------
    X : (n, p) array with n >= p and full column rank.
    y : (n,) array.

    Returns
    -------
    (p,) array
        The least-squares coefficients.

    Raises
    ------
    RankDeficiencyError
        If any diagonal entry of R falls below ``1e-10`` times the largest
        column norm of X; the error carries the detected numerical rank.

    Never forms the normal equations: the factorization keeps the
    conditioning of X itself rather than of X^T X.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n, p = X.shape
    if y.shape != (n,):
        raise InvalidInputError(f"y has shape {y.shape}, expected ({n},)")
    if n < p:
        raise InvalidInputError(f"underdetermined system: {n} rows < {p} columns")

    Q, R = np.linalg.qr(X)
    col_norms = np.linalg.norm(X, axis=0)
    tol = RANK_RTOL * float(col_norms.max(initial=0.0))
    diag = np.abs(np.diag(R))
    rank = int(np.count_nonzero(diag > tol))
    if rank < p:
        raise RankDeficiencyError(rank, p)
    return scipy.linalg.solve_triangular(R, Q.T @ y, lower=False)


def empirical_quantile(values, q):
    """The k-th smallest value with k = ceil(q * n), clamped to [1, n].

    This is the lower empirical quantile: ``q = 0`` returns the minimum and
    ``q = 1`` the maximum, and the result is always an element of ``values``.
    """
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        raise InvalidInputError("empirical_quantile of an empty collection")
    if not 0.0 <= q <= 1.0:
        raise InvalidInputError(f"quantile level {q} outside [0, 1]")
    n = v.size
    k = min(max(math.ceil(q * n), 1), n)
    return float(np.partition(v, k - 1)[k - 1])

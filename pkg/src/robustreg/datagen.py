"""Seeded generators for the synthetic benchmark scenarios.

Covers symmetrized-Pareto linear models, the deterministic-target
corruption scheme, and the three-point noise law that makes ordinary
least squares fail with the advertised polynomial frequency.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvalidConfigError, InvalidInputError

KIND_SYM_PARETO = "sym-pareto"
KIND_GAUSSIAN = "gaussian"
KIND_OLS_LB = "ols-lower-bound"

_KINDS = (KIND_SYM_PARETO, KIND_GAUSSIAN, KIND_OLS_LB)


@dataclass(frozen=True)
class DistributionSpec:
    """One coordinate's law.  sym-pareto uses ``alpha`` (k-th moment exists
    iff k < alpha); gaussian uses ``sigma``, with sigma = 0 degenerating to
    a point mass at 0.  Samples are scaled by sqrt(covariance_scale)."""

    kind: str
    alpha: float | None = None
    sigma: float | None = None
    tau: float | None = None
    covariance_scale: float = 1.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InvalidConfigError(f"unknown distribution kind {self.kind!r}")
        if self.kind == KIND_SYM_PARETO and (self.alpha is None or self.alpha <= 0):
            raise InvalidConfigError("sym-pareto needs alpha > 0")
        if self.kind == KIND_GAUSSIAN and (self.sigma is None or self.sigma < 0):
            raise InvalidConfigError("gaussian needs sigma >= 0")
        if self.tau is not None and not 0 < self.tau <= 0.25:
            raise InvalidConfigError("tau must lie in (0, 1/4]")
        if self.covariance_scale <= 0:
            raise InvalidConfigError("covariance_scale must be positive")


@dataclass(frozen=True)
class CorruptionSpec:
    epsilon: float
    covariate_target: np.ndarray | None = None  # None: 10 * all-ones
    response_target: float = 200.0
    covariate_fraction: float = 0.5  # share of the eps*n corrupted points

    def __post_init__(self):
        if not 0 <= self.epsilon < 0.5:
            raise InvalidConfigError("epsilon must lie in [0, 1/2)")
        if not 0 <= self.covariate_fraction <= 1:
            raise InvalidConfigError("covariate_fraction must lie in [0, 1]")


@dataclass(frozen=True)
class LinearModelDraw:
    X: np.ndarray
    y: np.ndarray
    beta_star: np.ndarray
    corrupted_indices: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=int))


def sample_sym_pareto(alpha, u, sign):
    """Inverse-CDF transform: sign * ((1-u)^(-1/alpha) - 1).

    The magnitude has density alpha * (1+x)^(-(1+alpha)) on x >= 0; the
    sign is supplied by the caller so magnitude and sign streams stay
    independent.
    """
    if alpha <= 0:
        raise InvalidInputError("alpha must be positive")
    u_arr = np.asarray(u, dtype=float)
    if np.any(u_arr < 0) or np.any(u_arr >= 1):
        raise InvalidInputError("u must lie in [0, 1)")
    out = np.asarray(sign, dtype=float) * ((1.0 - u_arr) ** (-1.0 / alpha) - 1.0)
    return float(out) if np.isscalar(u) or u_arr.ndim == 0 else out


def _sample_iid(spec, shape, rng):
    # one rng call for magnitudes, then one for signs, so the stream layout
    # is part of the determinism contract
    if spec.kind == KIND_SYM_PARETO:
        u = rng.random(shape)
        signs = rng.integers(0, 2, size=shape) * 2 - 1
        vals = sample_sym_pareto(spec.alpha, u, signs)
    elif spec.kind == KIND_GAUSSIAN:
        vals = rng.normal(0.0, spec.sigma, size=shape) if spec.sigma > 0 else np.zeros(shape)
    else:
        raise InvalidConfigError(f"{spec.kind!r} is not an i.i.d.-coordinate law")
    return np.asarray(vals, dtype=float) * math.sqrt(spec.covariance_scale)


def _unit_sphere(p, rng):
    g = rng.normal(size=p)
    norm = float(np.linalg.norm(g))
    if norm == 0.0:
        g = np.zeros(p)
        g[0] = 1.0
        return g
    return g / norm


def gen_linear_model(n, p, cov_spec, noise_spec, seed):
    """Draw beta* uniform on the unit sphere, then X with i.i.d.
    coordinates, then independent noise; y = X beta* + z."""
    if n < 1 or p < 1:
        raise InvalidInputError("n and p must be positive")
    rng = np.random.default_rng(seed)
    beta = _unit_sphere(p, rng)
    X = _sample_iid(cov_spec, (n, p), rng)
    z = _sample_iid(noise_spec, (n,), rng)
    return LinearModelDraw(X=X, y=X @ beta + z, beta_star=beta)


def corrupt_adversarial(draw, spec, seed):
    """Replace floor(eps*n) seeded-random responses by the target value;
    the first floor(fraction*eps*n) of those also get their covariate row
    replaced (10 * all-ones unless CorruptionSpec overrides it)."""
    n, p = draw.X.shape
    n_resp = int(math.floor(spec.epsilon * n))
    n_cov = int(math.floor(spec.covariate_fraction * spec.epsilon * n))
    if n_resp == 0:
        return LinearModelDraw(draw.X.copy(), draw.y.copy(), draw.beta_star.copy())
    target = spec.covariate_target
    if target is None:
        target = 10.0 * np.ones(p)
    else:
        target = np.asarray(target, dtype=float)
        if target.shape != (p,):
            raise InvalidInputError("covariate_target has the wrong length")
    idx = np.random.default_rng(seed).choice(n, size=n_resp, replace=False)
    X = draw.X.copy()
    y = draw.y.copy()
    y[idx] = spec.response_target
    X[idx[:n_cov]] = target
    return LinearModelDraw(X, y, draw.beta_star.copy(), corrupted_indices=np.sort(idx))


def gen_ols_lower_bound(n, p, sigma, tau, seed):
    """Hypercube covariates with three-point noise.

    Coordinates are uniform on {-1, 1}; the noise takes the values
    -a, 0, +a with a = sigma * sqrt(n / (2 tau)) and the extremes each at
    probability tau / n.  Needs n >= 10 p so the design stays well
    conditioned.
    """
    if not 0 < tau <= 0.25:
        raise InvalidConfigError("tau must lie in (0, 1/4]")
    if sigma <= 0:
        raise InvalidConfigError("sigma must be positive")
    if n < 10 * p:
        raise DomainError(f"need n >= 10 p, got n={n}, p={p}")
    rng = np.random.default_rng(seed)
    beta = _unit_sphere(p, rng)
    X = (rng.integers(0, 2, size=(n, p)) * 2 - 1).astype(float)
    a = sigma * math.sqrt(n / (2.0 * tau))
    u = rng.random(n)
    z = np.zeros(n)
    z[u < tau / n] = a
    z[(u >= tau / n) & (u < 2 * tau / n)] = -a
    return LinearModelDraw(X=X, y=X @ beta + z, beta_star=beta)


def write_draw_csv(draw, path):
    """Header x1,...,xp,y,corrupted with corrupted in {0,1}."""
    n, p = draw.X.shape
    flags = np.zeros(n, dtype=int)
    flags[draw.corrupted_indices] = 1
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"x{j + 1}" for j in range(p)] + ["y", "corrupted"])
        for i in range(n):
            w.writerow([repr(float(v)) for v in draw.X[i]] + [repr(float(draw.y[i])), int(flags[i])])


def read_xy_csv(path):
    """Read a draw CSV back as (X, y); a trailing corrupted column is
    accepted and dropped."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise InvalidInputError("empty csv")
    header = [h.strip() for h in rows[0]]
    if "y" not in header:
        raise InvalidInputError("csv needs a y column")
    y_col = header.index("y")
    x_cols = [j for j, h in enumerate(header) if h.startswith("x") and h[1:].isdigit()]
    if not x_cols:
        raise InvalidInputError("csv needs x1,...,xp columns")
    data = []
    for r in rows[1:]:
        if not r:
            continue
        try:
            data.append([float(r[j]) for j in x_cols] + [float(r[y_col])])
        except (ValueError, IndexError) as exc:
            raise InvalidInputError(f"bad csv row: {r!r}") from exc
    arr = np.asarray(data, dtype=float)
    if arr.size == 0:
        raise InvalidInputError("csv has no data rows")
    return arr[:, :-1], arr[:, -1]

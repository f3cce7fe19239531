"""Monte-Carlo trial runner and quantile-curve aggregation.

Each trial derives its own seeds from (master seed, trial index, salt),
so trials can run in any order on any number of workers and still produce
the identical results table.  Estimator failures inside a trial are data:
they become missing values with a status reason instead of aborting the
run.
"""

import csv
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .datagen import (
    KIND_SYM_PARETO,
    CorruptionSpec,
    DistributionSpec,
    gen_linear_model,
    gen_ols_lower_bound,
    corrupt_adversarial,
)
from .errors import InvalidConfigError, InvalidInputError, NumericalError, RankDeficiencyError
from .filtering import FilterConfig, filter_covariates
from .huber import GAMMA_MIN, HuberConfig, estimate_gamma, fit_huber
from .lad import fit_lad
from .lts import LtsConfig, fit_lts
from .numerics import empirical_quantile, solve_least_squares
from .postprocess import PostprocessConfig, postprocess_estimate
from .result import EstimatorResult

SCENARIO_HEAVY = "heavy"
SCENARIO_ADVERSARIAL = "adversarial"
SCENARIO_OLS_LB = "ols-lb"

_SCENARIOS = (SCENARIO_HEAVY, SCENARIO_ADVERSARIAL, SCENARIO_OLS_LB)
_BASES = ("ols", "huber", "lts", "lad")

# seed-stream salts; the split keeps generation, corruption, and method
# randomness independent of each other and of the trial schedule
SALT_GEN = 0
SALT_CORRUPT = 1
SALT_METHOD = 2

RESULTS_HEADER = ["trial", "method", "error", "status"]
CURVES_HEADER = ["method", "tau", "quantile_error"]

STATUS_OK = "ok"


def _ceil_stable(x):
    # representation noise must not push an exact product past an integer
    return math.ceil(round(x, 9))


def derive_seed(master, trial, salt):
    """Collapse SeedSequence([master, trial, salt]) to one integer."""
    w = np.random.SeedSequence([int(master), int(trial), int(salt)]).generate_state(2)
    return (int(w[0]) << 32) | int(w[1])


def parse_method(token):
    """'base[+filter][+post]' -> (base, filtered, postprocessed)."""
    parts = token.split("+")
    base, mods = parts[0], parts[1:]
    if base not in _BASES:
        raise InvalidConfigError(f"unknown method {base!r}")
    filtered = "filter" in mods
    post = "post" in mods
    for m in mods:
        if m not in ("filter", "post"):
            raise InvalidConfigError(f"unknown method modifier {m!r}")
    if len(mods) != len(set(mods)):
        raise InvalidConfigError(f"duplicate modifier in {token!r}")
    return base, filtered, post


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    n: int
    p: int
    trials: int
    seed: int
    methods: tuple = ("ols",)
    tau_grid: tuple = (0.01, 0.05, 0.2)
    alpha_x: float | None = None  # None: 2 for heavy, 4 for adversarial
    alpha_z: float = 2.0
    eps: float = 0.1
    gamma: float | str = 0.5  # "auto" estimates per trial
    trim_m: int | None = None  # None: ceil(0.15 n)
    filter_budget: int | None = None  # None: scenario default
    sigma: float = 1.0
    tau_lb: float = 0.05
    huber_max_iters: int = 1500
    lts_max_iters: int = 100
    post_buckets: int | None = None  # None: ceil(0.05 n)
    post_budget: int | None = None  # None: ceil(0.1 buckets)

    def __post_init__(self):
        if self.scenario not in _SCENARIOS:
            raise InvalidConfigError(f"unknown scenario {self.scenario!r}")
        if self.n < 1 or self.p < 1:
            raise InvalidConfigError("n and p must be positive")
        if self.trials < 1:
            raise InvalidConfigError("need at least one trial")
        if not self.methods:
            raise InvalidConfigError("method list is empty")
        for tok in self.methods:
            parse_method(tok)
        if len(set(self.methods)) != len(self.methods):
            raise InvalidConfigError("duplicate method token")
        if not self.tau_grid:
            raise InvalidConfigError("tau grid is empty")
        if any(not 0 < t < 1 for t in self.tau_grid):
            raise InvalidConfigError("tau values must lie in (0, 1)")
        if list(self.tau_grid) != sorted(self.tau_grid):
            raise InvalidConfigError("tau grid must be sorted ascending")
        if not 0 <= self.eps < 0.5:
            raise InvalidConfigError("eps must lie in [0, 1/2)")
        if self.gamma != "auto" and not (isinstance(self.gamma, (int, float)) and self.gamma > 0):
            raise InvalidConfigError("gamma must be positive or 'auto'")
        if self.alpha_x is not None and self.alpha_x <= 0:
            raise InvalidConfigError("alpha_x must be positive")
        if self.alpha_z <= 0:
            raise InvalidConfigError("alpha_z must be positive")

    @property
    def resolved_alpha_x(self):
        if self.alpha_x is not None:
            return self.alpha_x
        return 4.0 if self.scenario == SCENARIO_ADVERSARIAL else 2.0

    @property
    def resolved_trim_m(self):
        if self.trim_m is not None:
            return self.trim_m
        return _ceil_stable(0.15 * self.n)

    @property
    def resolved_filter_budget(self):
        if self.filter_budget is not None:
            return self.filter_budget
        if self.scenario == SCENARIO_ADVERSARIAL:
            return _ceil_stable(1.5 * self.eps * self.n)
        return _ceil_stable(0.05 * self.n)

    @property
    def resolved_post_buckets(self):
        return self.post_buckets if self.post_buckets is not None else _ceil_stable(0.05 * self.n)

    @property
    def resolved_post_budget(self):
        if self.post_budget is not None:
            return self.post_budget
        return _ceil_stable(0.1 * self.resolved_post_buckets)


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    method: str
    error: float | None
    status: str


@dataclass(frozen=True)
class QuantileCurve:
    method: str
    taus: tuple
    values: tuple
    missing: int = 0


def fit_ols(X, y):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y, dtype=float)
    beta = solve_least_squares(X, y)
    r = y - X @ beta
    return EstimatorResult(
        beta_hat=beta,
        iterations=0,
        final_objective=0.5 * float(np.mean(r**2)),
        final_grad_norm=0.0,
        converged=True,
    )


def _draw_for_trial(cfg, trial):
    gen_seed = derive_seed(cfg.seed, trial, SALT_GEN)
    if cfg.scenario == SCENARIO_OLS_LB:
        return gen_ols_lower_bound(cfg.n, cfg.p, cfg.sigma, cfg.tau_lb, gen_seed)
    cov = DistributionSpec(KIND_SYM_PARETO, alpha=cfg.resolved_alpha_x)
    noise = DistributionSpec(KIND_SYM_PARETO, alpha=cfg.alpha_z)
    draw = gen_linear_model(cfg.n, cfg.p, cov, noise, gen_seed)
    if cfg.scenario == SCENARIO_ADVERSARIAL:
        corrupt_seed = derive_seed(cfg.seed, trial, SALT_CORRUPT)
        draw = corrupt_adversarial(draw, CorruptionSpec(epsilon=cfg.eps), corrupt_seed)
    return draw


def _fit_one_method(token, draw, cfg, init, method_seed):
    base, filtered, post = parse_method(token)
    X, y = draw.X, draw.y
    if filtered:
        keep = filter_covariates(X, FilterConfig(budget=cfg.resolved_filter_budget)).surviving_indices
        X, y = X[keep], y[keep]

    if base == "ols":
        beta = fit_ols(X, y).beta_hat
    elif base == "huber":
        gamma = cfg.gamma
        if gamma == "auto":
            gamma = max(estimate_gamma(X, y, seed=method_seed), GAMMA_MIN)
        hcfg = HuberConfig(gamma=float(gamma), max_iters=cfg.huber_max_iters, init=init)
        beta = fit_huber(X, y, hcfg).beta_hat
    elif base == "lts":
        lcfg = LtsConfig(m=cfg.resolved_trim_m, max_iters=cfg.lts_max_iters)
        beta = fit_lts(X, y, lcfg).beta_hat
    else:
        beta = fit_lad(X, y).beta_hat

    if post:
        pcfg = PostprocessConfig(
            bucket_count=min(cfg.resolved_post_buckets, X.shape[0]),
            filter_budget=cfg.resolved_post_budget,
            seed=method_seed,
        )
        beta = postprocess_estimate(X, y, beta, pcfg)
    return beta


def run_one_trial(cfg, trial):
    draw = _draw_for_trial(cfg, trial)
    method_seed = derive_seed(cfg.seed, trial, SALT_METHOD)
    rng = np.random.default_rng(method_seed)
    # common random starting point for the descent methods; the trimming
    # recursion keeps its cold start at b = 0
    g = rng.normal(size=cfg.p)
    init = g / np.linalg.norm(g) if np.linalg.norm(g) > 0 else np.eye(1, cfg.p)[0]

    rows = []
    for token in cfg.methods:
        try:
            beta = _fit_one_method(token, draw, cfg, init, method_seed)
            err = float(np.linalg.norm(beta - draw.beta_star))
            if math.isfinite(err):
                rows.append(TrialRecord(trial, token, err, STATUS_OK))
            else:
                rows.append(TrialRecord(trial, token, None, "nonfinite"))
        except RankDeficiencyError:
            rows.append(TrialRecord(trial, token, None, "rank-deficient"))
        except NumericalError:
            rows.append(TrialRecord(trial, token, None, "numerical"))
        except np.linalg.LinAlgError:
            rows.append(TrialRecord(trial, token, None, "linalg"))
    return rows


def _trial_worker(args):
    cfg, trial = args
    return run_one_trial(cfg, trial)


def run_trials(cfg, workers=1):
    """Run all trials and return records sorted by (trial, method order).

    The worker count changes scheduling only; per-trial seed derivation
    makes the output identical for any value.
    """
    if workers < 1:
        raise InvalidConfigError("workers must be at least 1")
    if workers == 1:
        nested = [run_one_trial(cfg, t) for t in range(cfg.trials)]
    else:
        jobs = [(cfg, t) for t in range(cfg.trials)]
        chunk = max(1, cfg.trials // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            nested = list(pool.map(_trial_worker, jobs, chunksize=chunk))
    return [rec for rows in nested for rec in rows]


def quantile_curve(records, tau_grid):
    """Per-method curves of empirical_quantile(errors, 1 - tau).

    Missing values are excluded and counted; a method with no finite
    error at all is dropped with a warning.
    """
    tau_grid = tuple(float(t) for t in tau_grid)
    if not tau_grid:
        raise InvalidInputError("tau grid is empty")
    if any(not 0 < t < 1 for t in tau_grid):
        raise InvalidInputError("tau values must lie in (0, 1)")
    if list(tau_grid) != sorted(tau_grid):
        raise InvalidInputError("tau grid must be sorted ascending")

    by_method = {}
    missing = {}
    for rec in records:
        by_method.setdefault(rec.method, [])
        missing.setdefault(rec.method, 0)
        if rec.error is None:
            missing[rec.method] += 1
        else:
            by_method[rec.method].append(rec.error)

    curves = []
    for method, errs in by_method.items():
        if not errs:
            warnings.warn(f"method {method!r} has no finite errors; omitted", stacklevel=2)
            continue
        vals = tuple(empirical_quantile(np.asarray(errs), 1.0 - t) for t in tau_grid)
        curves.append(QuantileCurve(method, tau_grid, vals, missing[method]))
    return curves


def write_results_csv(records, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RESULTS_HEADER)
        for rec in records:
            err = "" if rec.error is None else repr(float(rec.error))
            w.writerow([rec.trial, rec.method, err, rec.status])


def read_results_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [h.strip() for h in rows[0]] != RESULTS_HEADER:
        raise InvalidInputError("results csv needs header trial,method,error,status")
    records = []
    for r in rows[1:]:
        if not r:
            continue
        if len(r) != 4:
            raise InvalidInputError(f"bad results row: {r!r}")
        err = None if r[2] == "" else float(r[2])
        records.append(TrialRecord(int(r[0]), r[1], err, r[3]))
    return records


def write_curves_csv(curves, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CURVES_HEADER)
        for c in curves:
            for tau, val in zip(c.taus, c.values):
                w.writerow([c.method, repr(float(tau)), repr(float(val))])

"""Command-line interface.

Exit codes: 0 success, 2 invalid input or config (argparse errors
included), 3 numerical failure, 4 refusal on a size cap.
"""

import argparse
import json
import math
import sys

import numpy as np

from .errors import (
    DomainError,
    InvalidConfigError,
    InvalidInputError,
    NumericalError,
    RankDeficiencyError,
    SizeCapError,
)
from .datagen import read_xy_csv
from .experiments import (
    ExperimentConfig,
    fit_ols,
    parse_method,
    quantile_curve,
    read_results_csv,
    run_trials,
    write_curves_csv,
    write_results_csv,
)
from .filtering import FilterConfig, MODE_EXACT, MODE_SPECTRAL, filter_covariates
from .huber import GAMMA_MIN, HuberConfig, estimate_gamma, fit_huber
from .lad import fit_lad
from .lts import LtsConfig, fit_lts
from .postprocess import PostprocessConfig, postprocess_estimate
from .stability import (
    StrongStabilityQuery,
    check_strong_stability,
    l1_stability_estimate,
    ssc_sss_params,
    weak_stability_params,
)


def _gamma_arg(text):
    if text == "auto":
        return "auto"
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"gamma must be a number or 'auto', got {text!r}")
    if val <= 0:
        raise argparse.ArgumentTypeError("gamma must be positive")
    return val


def _methods_arg(text):
    tokens = tuple(t.strip() for t in text.split(",") if t.strip())
    if not tokens:
        raise argparse.ArgumentTypeError("empty method list")
    for tok in tokens:
        try:
            parse_method(tok)
        except InvalidConfigError as exc:
            raise argparse.ArgumentTypeError(str(exc))
    return tokens


def _tau_list_arg(text):
    try:
        taus = tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad tau list {text!r}")
    if not taus:
        raise argparse.ArgumentTypeError("empty tau list")
    return taus


def build_parser():
    parser = argparse.ArgumentParser(prog="robustreg", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run Monte-Carlo trials to a results csv")
    sim.add_argument("--scenario", required=True, choices=["heavy", "adversarial", "ols-lb"])
    sim.add_argument("--n", type=int, default=200)
    sim.add_argument("--p", type=int, default=40)
    sim.add_argument("--trials", type=int, default=100)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--alpha-x", type=float, default=None)
    sim.add_argument("--alpha-z", type=float, default=2.0)
    sim.add_argument("--eps", type=float, default=0.1)
    sim.add_argument("--methods", type=_methods_arg, default=("ols",))
    sim.add_argument("--gamma", type=_gamma_arg, default=0.5)
    sim.add_argument("--trim-m", type=int, default=None)
    sim.add_argument("--filter-remove", type=int, default=None)
    sim.add_argument("--sigma", type=float, default=1.0)
    sim.add_argument("--tau", type=float, default=0.05, help="ols-lb noise tail parameter")
    sim.add_argument("--workers", type=int, default=1)
    sim.add_argument("--out", required=True)
    sim.set_defaults(func=cmd_simulate)

    fit = sub.add_parser("fit", help="fit one estimator to a csv of x1..xp,y rows")
    fit.add_argument("--method", required=True, choices=["ols", "huber", "lts", "lad"])
    fit.add_argument("--input", required=True)
    fit.add_argument("--gamma", type=_gamma_arg, default="auto")
    fit.add_argument("--trim-m", type=int, default=None)
    fit.add_argument("--filter-remove", type=int, default=0)
    fit.add_argument("--postprocess", action="store_true")
    fit.add_argument("--seed", type=int, default=0)
    fit.add_argument("--out", required=True)
    fit.set_defaults(func=cmd_fit)

    flt = sub.add_parser("filter", help="report which points the filter removes")
    flt.add_argument("--input", required=True)
    flt.add_argument("--remove", type=int, required=True)
    flt.add_argument("--mode", choices=[MODE_EXACT, MODE_SPECTRAL], default=MODE_EXACT)
    flt.add_argument("--out", required=True)
    flt.set_defaults(func=cmd_filter)

    cert = sub.add_parser("certify", help="stability certificates for the covariate rows")
    cert.add_argument("--kind", required=True, choices=["strong", "weak", "ssc-sss", "l1"])
    cert.add_argument("--input", required=True)
    cert.add_argument("--eps", type=float, default=0.1)
    cert.add_argument("--delta", type=float, default=None)
    cert.add_argument("--sigma", type=float, default=1.0)
    cert.add_argument("--level", type=int, default=None, help="subset size m for ssc-sss")
    cert.add_argument("--directions", type=int, default=200)
    cert.add_argument("--seed", type=int, default=0)
    cert.set_defaults(func=cmd_certify)

    qnt = sub.add_parser("quantiles", help="aggregate a results csv into quantile curves")
    qnt.add_argument("--input", required=True)
    qnt.add_argument("--tau", type=_tau_list_arg, required=True)
    qnt.add_argument("--out", required=True)
    qnt.set_defaults(func=cmd_quantiles)

    return parser


def cmd_simulate(args):
    cfg = ExperimentConfig(
        scenario=args.scenario,
        n=args.n,
        p=args.p,
        trials=args.trials,
        seed=args.seed,
        methods=args.methods,
        alpha_x=args.alpha_x,
        alpha_z=args.alpha_z,
        eps=args.eps,
        gamma=args.gamma,
        trim_m=args.trim_m,
        filter_budget=args.filter_remove,
        sigma=args.sigma,
        tau_lb=args.tau,
    )
    records = run_trials(cfg, workers=args.workers)
    write_results_csv(records, args.out)
    failed = sum(1 for r in records if r.error is None)
    print(f"wrote {len(records)} records to {args.out}" + (f" ({failed} failed)" if failed else ""))
    return 0


def cmd_fit(args):
    X, y = read_xy_csv(args.input)
    if args.filter_remove:
        keep = filter_covariates(X, FilterConfig(budget=args.filter_remove)).surviving_indices
        X, y = X[keep], y[keep]

    if args.method == "ols":
        res = fit_ols(X, y)
    elif args.method == "huber":
        gamma = args.gamma
        if gamma == "auto":
            gamma = max(estimate_gamma(X, y, seed=args.seed), GAMMA_MIN)
        res = fit_huber(X, y, HuberConfig(gamma=float(gamma)))
    elif args.method == "lts":
        m = args.trim_m if args.trim_m is not None else math.ceil(0.15 * X.shape[0])
        res = fit_lts(X, y, LtsConfig(m=m))
    else:
        res = fit_lad(X, y)

    beta = res.beta_hat
    if args.postprocess:
        k = max(1, math.ceil(0.05 * X.shape[0]))
        pcfg = PostprocessConfig(bucket_count=k, seed=args.seed)
        beta = postprocess_estimate(X, y, beta, pcfg)
        # the one-step improvement guarantee assumes an initial estimate
        # independent of the sample; reusing the same rows is the weaker regime
        print("note: postprocess reused the fitting sample (dependent regime)", file=sys.stderr)

    payload = {
        "beta_hat": [float(b) for b in beta],
        "iterations": int(res.iterations),
        "objective": float(res.final_objective),
        "converged": bool(res.converged),
    }
    with open(args.out, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    print(f"wrote {args.out}")
    return 0


def cmd_filter(args):
    X, _ = read_xy_csv(args.input)
    report = filter_covariates(X, FilterConfig(budget=args.remove, mode=args.mode))
    payload = {
        "surviving_indices": [int(i) for i in report.surviving_indices],
        "removed_indices": [int(i) for i in report.removed_indices],
        "removal_trace": [
            {"index": int(i), "score": float(s), "top_eigenvalue": float(lam)}
            for i, s, lam in report.removal_trace
        ],
    }
    with open(args.out, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    print(f"wrote {args.out}")
    return 0


def cmd_certify(args):
    X, _ = read_xy_csv(args.input)
    if args.kind == "strong":
        if args.delta is None:
            raise InvalidConfigError("strong certification needs --delta")
        q = StrongStabilityQuery(
            epsilon=args.eps, delta=args.delta, mu=np.zeros(X.shape[1]), sigma2=args.sigma**2
        )
        ok, worst_mean, worst_spec = check_strong_stability(X, q)
        payload = {
            "kind": "strong",
            "ok": bool(ok),
            "worst_mean_deviation": float(worst_mean),
            "worst_second_moment_deviation": float(worst_spec),
        }
    elif args.kind == "weak":
        params = weak_stability_params(X, args.eps)
        payload = {
            "kind": "weak",
            "epsilon": float(params.epsilon),
            "L": float(params.L),
            "U": float(params.U),
            "exact": bool(params.exact),
        }
    elif args.kind == "ssc-sss":
        if args.level is None:
            raise InvalidConfigError("ssc-sss certification needs --level")
        prof = ssc_sss_params(X, args.level)
        payload = {
            "kind": "ssc-sss",
            "m": int(prof.m),
            "lambda_m": float(prof.lambda_m),
            "Lambda_m": float(prof.Lambda_m),
        }
    else:
        est = l1_stability_estimate(X, args.eps, n_directions=args.directions, seed=args.seed)
        payload = {
            "kind": "l1",
            "epsilon": float(est.epsilon),
            "m_upper": float(est.m_upper),
            "M_lower": float(est.M_lower),
            "directions_sampled": int(est.directions_sampled),
            "exact": bool(est.exact),
        }
    print(json.dumps(payload, indent=2))
    return 0


def cmd_quantiles(args):
    records = read_results_csv(args.input)
    curves = quantile_curve(records, args.tau)
    write_curves_csv(curves, args.out)
    for c in curves:
        if c.missing:
            print(f"note: method {c.method} had {c.missing} missing values", file=sys.stderr)
    print(f"wrote {args.out}")
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InvalidInputError, InvalidConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SizeCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (NumericalError, RankDeficiencyError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Robust linear regression under heavy tails and contamination.

Spectral covariate filtering, Huber / least-trimmed-squares / least-
absolute-deviation estimators, stability certificates, one-step
postprocessing, and a seeded Monte-Carlo benchmark harness.
"""

from .errors import (
    DomainError,
    InvalidConfigError,
    InvalidInputError,
    NumericalError,
    RankDeficiencyError,
    SizeCapError,
)
from .result import EstimatorResult
from .numerics import empirical_quantile, power_iteration, solve_least_squares
from .filtering import (
    FilterConfig,
    FilterReport,
    RemovalRecord,
    filter_covariates,
    outlier_scores,
    second_moment_matrix,
)
from .stability import (
    L1StabilityEstimate,
    SscSssProfile,
    StrongStabilityQuery,
    WeakStabilityParams,
    check_strong_stability,
    l1_stability_estimate,
    ssc_sss_params,
    strong_to_weak,
    weak_stability_params,
)
from .huber import (
    GAMMA_MIN,
    HuberConfig,
    estimate_gamma,
    fit_huber,
    huber_loss_and_grad,
    huber_objective_grad,
    huber_pipeline,
    symmetrize_pairs,
)
from .lts import LtsConfig, fit_lts, hard_threshold, iteration_bound, lts_pipeline, lts_step
from .lad import LadConfig, fit_lad, lad_pipeline, lad_vertex_oracle
from .postprocess import (
    PostprocessConfig,
    median_of_means_buckets,
    postprocess_estimate,
    robust_mean,
    shift_map,
)
from .datagen import (
    CorruptionSpec,
    DistributionSpec,
    LinearModelDraw,
    corrupt_adversarial,
    gen_linear_model,
    gen_ols_lower_bound,
    read_xy_csv,
    sample_sym_pareto,
    write_draw_csv,
)
from .experiments import (
    ExperimentConfig,
    QuantileCurve,
    TrialRecord,
    derive_seed,
    fit_ols,
    parse_method,
    quantile_curve,
    read_results_csv,
    run_trials,
    write_curves_csv,
    write_results_csv,
)

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "InvalidConfigError",
    "InvalidInputError",
    "NumericalError",
    "RankDeficiencyError",
    "SizeCapError",
    "EstimatorResult",
    "empirical_quantile",
    "power_iteration",
    "solve_least_squares",
    "FilterConfig",
    "FilterReport",
    "RemovalRecord",
    "filter_covariates",
    "outlier_scores",
    "second_moment_matrix",
    "L1StabilityEstimate",
    "SscSssProfile",
    "StrongStabilityQuery",
    "WeakStabilityParams",
    "check_strong_stability",
    "l1_stability_estimate",
    "ssc_sss_params",
    "strong_to_weak",
    "weak_stability_params",
    "GAMMA_MIN",
    "HuberConfig",
    "estimate_gamma",
    "fit_huber",
    "huber_loss_and_grad",
    "huber_objective_grad",
    "huber_pipeline",
    "symmetrize_pairs",
    "LtsConfig",
    "fit_lts",
    "hard_threshold",
    "iteration_bound",
    "lts_pipeline",
    "lts_step",
    "LadConfig",
    "fit_lad",
    "lad_pipeline",
    "lad_vertex_oracle",
    "PostprocessConfig",
    "median_of_means_buckets",
    "postprocess_estimate",
    "robust_mean",
    "shift_map",
    "CorruptionSpec",
    "DistributionSpec",
    "LinearModelDraw",
    "corrupt_adversarial",
    "gen_linear_model",
    "gen_ols_lower_bound",
    "read_xy_csv",
    "sample_sym_pareto",
    "write_draw_csv",
    "ExperimentConfig",
    "QuantileCurve",
    "TrialRecord",
    "derive_seed",
    "fit_ols",
    "parse_method",
    "quantile_curve",
    "read_results_csv",
    "run_trials",
    "write_curves_csv",
    "write_results_csv",
]

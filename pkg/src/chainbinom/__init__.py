"""Chain binomial household outbreak models.

Exact outbreak-size distributions (final and truncated-in-time),
maximum likelihood inference on the secondary attack rate, SAR
regression on household covariates, truncation-bias analysis, and a
seeded simulation harness for confidence-interval coverage.
"""

from .bias import BiasPoint, best_final_approx, bias_curve, kl_divergence, stabilization_generation
from .data import DatasetFile, coronahouse_fixture, dumps_csv, load_csv, loads_csv, subset, write_csv
from .errors import (
    DataError,
    EnumerationCapError,
    EvaluationError,
    IntervalUnavailableError,
    SingularModelError,
)
from .estimate import (
    HouseholdObservation,
    SarEstimate,
    fit_sar,
    log_likelihood,
    normal_ci,
    wilks_ci,
)
from .glm import (
    IDENTITY,
    LOG,
    LOGIT,
    GlmFit,
    LinkFunction,
    design_matrix,
    fit_glm,
    get_link,
    glm_log_likelihood,
    predict_sar,
)
from .model import (
    ENUMERATION_CAP,
    FINAL,
    HouseholdConfig,
    OutbreakState,
    Scenario,
    chain_probability,
    count_scenarios,
    enumerate_scenarios,
    expected_far,
    final_size_pmf,
    incomplete_pmf,
    infection_probability,
    size_distribution,
    transition_pmf,
)
from .numerics import (
    OptimResult,
    chisq1_quantile,
    hessian_fd,
    minimize_multivariate,
    minimize_scalar,
    normal_quantile,
)
from .simulate import (
    DEFAULT_HOUSEHOLD_SIZES,
    RNG_ALGORITHM,
    CoverageRow,
    SimConfig,
    coverage_experiment,
    replication_rng,
    simulate_outbreak,
    simulate_study,
    simulate_totals,
)

__version__ = "0.1.0"

__all__ = [
    "BiasPoint", "best_final_approx", "bias_curve", "kl_divergence",
    "stabilization_generation",
    "DatasetFile", "coronahouse_fixture", "dumps_csv", "load_csv", "loads_csv",
    "subset", "write_csv",
    "DataError", "EnumerationCapError", "EvaluationError",
    "IntervalUnavailableError", "SingularModelError",
    "HouseholdObservation", "SarEstimate", "fit_sar", "log_likelihood",
    "normal_ci", "wilks_ci",
    "IDENTITY", "LOG", "LOGIT", "GlmFit", "LinkFunction", "design_matrix",
    "fit_glm", "get_link", "glm_log_likelihood", "predict_sar",
    "ENUMERATION_CAP", "FINAL", "HouseholdConfig", "OutbreakState", "Scenario",
    "chain_probability", "count_scenarios", "enumerate_scenarios",
    "expected_far", "final_size_pmf", "incomplete_pmf",
    "infection_probability", "size_distribution", "transition_pmf",
    "OptimResult", "chisq1_quantile", "hessian_fd", "minimize_multivariate",
    "minimize_scalar", "normal_quantile",
    "DEFAULT_HOUSEHOLD_SIZES", "RNG_ALGORITHM", "CoverageRow", "SimConfig",
    "coverage_experiment", "replication_rng", "simulate_outbreak",
    "simulate_study", "simulate_totals",
    "__version__",
]

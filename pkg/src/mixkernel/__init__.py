"""Kernel regression and classification for mixed functional and categorical
covariates, with cross-validated per-covariate weights that double as a
variable-selection device, plus a seeded simulation study harness."""

from .data import (
    ClassResponse,
    ContinuousResponse,
    CovariateBlock,
    Dataset,
    DatasetSchema,
    MixedSample,
)
from .distances import (
    CategoryValue,
    discrete_distance,
    l2_distance,
    ordinal_distance,
)
from .estimator import (
    Prediction,
    classify,
    kernel_row,
    loo_predict,
    pairwise_distances,
    predict_posterior,
    predict_posterior_block,
    predict_regression,
    predict_regression_block,
)
from .estimators import WeightedKernelClassifier, WeightedKernelRegressor
from .exceptions import (
    CardinalityMismatchError,
    EmptyDatasetError,
    GridMismatchError,
    InsufficientDataError,
    InvalidModeError,
    LengthMismatchError,
    MixKernelError,
    ResponseKindError,
    SchemaMismatchError,
    TooFewSamplesError,
)
from .grids import Curve, Grid, integrate, pointwise_combine, standardize_sample
from .harness import (
    ExperimentPlan,
    ExperimentReport,
    rate_diagnostics,
    run_experiment,
)
from .kernels import KernelSpec, WeightVector, boxcar, picard, product_kernel
from .selection import (
    CvConfig,
    FitResult,
    cv_objective_classification,
    cv_objective_regression,
    minimize_weights,
)
from .simdata import (
    ScenarioConfig,
    SimDraw,
    draw_scenario,
    gamma_density,
    threshold_classification,
)

__version__ = "0.1.0"

__all__ = [
    "CategoryValue",
    "ClassResponse",
    "ContinuousResponse",
    "CovariateBlock",
    "Curve",
    "CvConfig",
    "Dataset",
    "DatasetSchema",
    "ExperimentPlan",
    "ExperimentReport",
    "FitResult",
    "Grid",
    "KernelSpec",
    "MixedSample",
    "Prediction",
    "ScenarioConfig",
    "SimDraw",
    "WeightVector",
    "WeightedKernelClassifier",
    "WeightedKernelRegressor",
    "boxcar",
    "classify",
    "cv_objective_classification",
    "cv_objective_regression",
    "discrete_distance",
    "draw_scenario",
    "gamma_density",
    "integrate",
    "kernel_row",
    "l2_distance",
    "loo_predict",
    "minimize_weights",
    "ordinal_distance",
    "pairwise_distances",
    "picard",
    "pointwise_combine",
    "predict_posterior",
    "predict_posterior_block",
    "predict_regression",
    "predict_regression_block",
    "product_kernel",
    "rate_diagnostics",
    "run_experiment",
    "standardize_sample",
    "threshold_classification",
    # errors
    "MixKernelError",
    "GridMismatchError",
    "TooFewSamplesError",
    "CardinalityMismatchError",
    "LengthMismatchError",
    "SchemaMismatchError",
    "ResponseKindError",
    "EmptyDatasetError",
    "InvalidModeError",
    "InsufficientDataError",
]

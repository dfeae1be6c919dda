"""Frontier estimation by kernel regression on high power-transformed data."""

from .errors import DataError, DegenerateBandwidthError, DomainError, UndefinedBandError
from .estimators import (
    ConfidenceBand,
    EstimatorConfig,
    GridEstimate,
    PointEstimate,
    Sample,
    StepFunction,
    confidence_band,
    confidence_band_grid,
    estimate_frontier,
    estimate_frontier_corrected,
    estimate_frontier_grid,
    estimate_geffroy,
    geffroy_cells_for_bandwidth,
    f_hat,
    phi_hat,
    r_hat,
    sigma_hat_inv,
)
from .experiment import (
    Estimator,
    ExperimentConfig,
    ExperimentReport,
    coverage_study,
    l1_error,
    rule_bandwidth,
    rule_power,
    run_cell,
    run_experiment,
)
from .kernels import KernelFamily, KernelSpec, kernel_eval, kernel_scaled_eval, make_kernel
from .numerics import NEG_INF, log_beta, log_sum_exp
from .simulation import (
    Covariate,
    FrontierModel,
    GridFrontier,
    frontier_g1,
    frontier_g2,
    generate_sample,
    read_sample_csv,
    write_sample_csv,
)

__version__ = "0.1.0"

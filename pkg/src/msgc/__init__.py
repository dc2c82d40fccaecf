"""Multiscale Granger causality for linear multivariate stochastic processes.

Causality between the components of a stationary vector autoregression is
computed across time scales without re-fitting models to filtered or
downsampled data: the rescaled process is represented exactly in
innovations state-space form (filtering adds a moving-average part;
downsampling is handled at parameter level), and one-step prediction error
variances are read off Riccati solutions. Estimates on real data are
validated with IAAFT surrogate significance bands.
"""

from .exceptions import (
    DareConvergenceError,
    RankDeficiencyError,
    SingularInnovationError,
    UnstableModelError,
)
from .var_model import (
    SimulationConfig,
    TimeSeriesSet,
    VarModel,
    bi_config,
    build_benchmark,
    check_stability,
    estimate_var,
    mix_config,
    select_order_bic,
    simulate_benchmark,
    simulate_var,
    uni_config,
)
from .rescale import (
    FirFilter,
    apply_filter,
    averaging_filter,
    design_fir_hamming,
    downsample,
)
from .state_space import (
    DareSolution,
    IssModel,
    SsModel,
    downsample_iss,
    iss_submodel,
    solve_dare,
    var_filter_to_iss,
)
from .granger import (
    GcValue,
    MultiscaleGcResult,
    gc_from_iss,
    multiscale_gc_estimated,
    multiscale_gc_exact,
    multiscale_gc_naive,
)
from .surrogate import SignificanceBands, SurrogateConfig, iaaft, significance_bands
from .preprocess import (
    detrend_l1,
    load_csv,
    load_csv_with_time,
    normalize,
    resample_uniform,
)
from .reproduce import McStudy, reproduce_fig2, reproduce_fig3, reproduce_fig4
from .cli import AnalysisConfig, RunReport, run

__version__ = "0.1.0"

__all__ = [
    "AnalysisConfig",
    "DareConvergenceError",
    "DareSolution",
    "FirFilter",
    "GcValue",
    "IssModel",
    "McStudy",
    "MultiscaleGcResult",
    "RankDeficiencyError",
    "RunReport",
    "SignificanceBands",
    "SimulationConfig",
    "SingularInnovationError",
    "SsModel",
    "SurrogateConfig",
    "TimeSeriesSet",
    "UnstableModelError",
    "VarModel",
    "apply_filter",
    "averaging_filter",
    "bi_config",
    "build_benchmark",
    "check_stability",
    "design_fir_hamming",
    "detrend_l1",
    "downsample",
    "downsample_iss",
    "estimate_var",
    "gc_from_iss",
    "iaaft",
    "iss_submodel",
    "load_csv",
    "load_csv_with_time",
    "mix_config",
    "multiscale_gc_estimated",
    "multiscale_gc_exact",
    "multiscale_gc_naive",
    "normalize",
    "reproduce_fig2",
    "reproduce_fig3",
    "reproduce_fig4",
    "resample_uniform",
    "run",
    "select_order_bic",
    "significance_bands",
    "simulate_benchmark",
    "simulate_var",
    "solve_dare",
    "uni_config",
    "var_filter_to_iss",
]

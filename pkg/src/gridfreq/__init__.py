"""Power-grid frequency statistics, trading-window analysis and swing-equation simulation."""

__version__ = "0.1.0"

from .exceptions import (
    DivergenceError,
    FewLagsError,
    GridFreqError,
    InhomogeneousDampingError,
    NoCompleteDaysError,
    PowerImbalanceError,
    TraceFormatError,
)
from .timeseries import (
    AngularVelocityTrace,
    FrequencyTrace,
    ValidationReport,
    load_complete,
    load_trace,
    select_complete_days,
    to_angular_velocity,
    write_trace_csv,
)
from .profiles import (
    daily_mean_profile,
    hourly_mean_profile,
    partition_trading_windows,
    trading_mask,
    violation_profile,
)
from .stable import StableFit, fit_stable, sample_stable
from .stats import (
    autocorrelation,
    fit_decay,
    fit_decay_rate,
    fit_gaussian,
    histogram,
    summary_stats,
    tail_excess_ratio,
)
from .sim import GridModel, NoiseSpec, SimResult, bulk_velocity, simulate, simulate_bulk
from .theory import predict, predict_scale_stable, predict_std_gaussian, predicted_autocorrelation
from .pipeline import run_pipeline
from .estimators import DecayRateEstimator, FrequencyToAngularVelocity, GaussianMLE, StableEstimator

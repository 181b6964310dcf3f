"""Penalized regression for predictive time series with mixed persistence."""

__version__ = "0.1.0"

from .core import (
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    KKT_TOL,
    Family,
    FitResult,
    PenaltySpec,
    TimeSeriesDataset,
    kkt_scale,
    kkt_violation,
    ols_fit,
    sample_std,
    soft_threshold,
    weighted_lasso_solve,
)
from .dgp import (
    COINT_MATRIX,
    Design,
    DgpSpec,
    TruthInfo,
    dataset_to_csv,
    replication_seeds,
    simulate,
    simulate_dgp1,
    simulate_dgp2,
    simulate_dgp3,
    truth_to_dict,
)
from .exceptions import (
    AllCandidatesFailed,
    ConstantColumnWarning,
    DimensionMismatch,
    DomainError,
    EmptyWindow,
    LengthMismatch,
    MissingColumn,
    MissingTruth,
    NonFiniteValue,
    NonMonotoneDates,
    PredlassoError,
    SeriesTooShort,
    SingularDesign,
)
from .empirical import (
    REQUIRED_PREDICTORS,
    ForecastResult,
    HorizonSpec,
    ReturnPanel,
    ar1_coefficient,
    load_panel,
    long_horizon_return,
    rolling_forecast,
    write_coefficient_csv,
    write_forecast_csv,
    write_forecast_metrics_csv,
)
from .estimators import (
    ZERO_EPS,
    alasso_fit,
    fit_family,
    oracle_fit,
    plasso_fit,
    rwwd_forecast,
    slasso_fit,
    talasso_fit,
)
from .metrics import SelectionRates, mpae, mpse, selection_rates
from .montecarlo import (
    CointGroupReport,
    SelectionReport,
    calibrate_for_design,
    coint_group_screening,
    run_montecarlo,
)
from .tuning import (
    Schedule,
    TuningConfig,
    bic_select,
    calibrate_clambda,
    cv_select,
    default_grid,
    fold_blocks,
    lambda_schedule,
    penalty_level,
    load_calibration,
    save_calibration,
    schedule_for_family,
)

__all__ = [name for name in dir() if not name.startswith("_")]

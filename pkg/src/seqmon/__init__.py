"""Sequential change detection with a rejection-count martingale and time-uniform bounds."""

__version__ = "0.1.0"

from .bounds import (
    HybridSchedule,
    LilGeneralConfig,
    LilSpecConfig,
    LinearSchedule,
    build_hybrid_schedule,
    build_linear_schedule,
    hybrid_bound,
    kappa0,
    lil_bound_general,
    lil_bound_spec,
    lil_start_general,
    lil_start_spec,
    linear_bound_eval,
    make_schedule,
)
from .cusum import CusumResult, CusumWindow, cusum_changepoint, cusum_stat
from .detector import (
    Detected,
    LocalTest,
    MartingaleMonitor,
    MartingaleState,
    MonitorResult,
    SequentialMonitor,
    Stable,
    Warmup,
    apply_local_test,
    estimate_threshold,
    first_crossing,
    run_hybrid_monitor,
    run_lil_monitor,
    step,
)
from .exceptions import ConfigurationError, DataError, DomainError, PreconditionError, SeqmonError
from .pipeline import (
    FeatureKind,
    ReferenceProfile,
    StrideCurve,
    StrideDistanceTransformer,
    build_monitoring_run,
    feature,
    pool,
    reference_profile,
    resample,
)

__all__ = [
    "__version__",
    "CusumResult",
    "CusumWindow",
    "cusum_changepoint",
    "cusum_stat",
    "ConfigurationError",
    "DataError",
    "DomainError",
    "PreconditionError",
    "SeqmonError",
    "HybridSchedule",
    "LilGeneralConfig",
    "LilSpecConfig",
    "LinearSchedule",
    "build_hybrid_schedule",
    "build_linear_schedule",
    "hybrid_bound",
    "kappa0",
    "lil_bound_general",
    "lil_bound_spec",
    "lil_start_general",
    "lil_start_spec",
    "linear_bound_eval",
    "make_schedule",
    "Detected",
    "LocalTest",
    "MartingaleMonitor",
    "MartingaleState",
    "MonitorResult",
    "SequentialMonitor",
    "Stable",
    "Warmup",
    "apply_local_test",
    "estimate_threshold",
    "first_crossing",
    "run_hybrid_monitor",
    "run_lil_monitor",
    "step",
    "FeatureKind",
    "ReferenceProfile",
    "StrideCurve",
    "StrideDistanceTransformer",
    "build_monitoring_run",
    "feature",
    "pool",
    "reference_profile",
    "resample",
]

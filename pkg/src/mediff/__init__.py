"""Seasonal time-series anomaly detection via median decomposition and a
generalized ESD outlier test."""

from .calendar import (
    EMPTY_CALENDAR,
    CalendarConfig,
    EffectResolution,
    Holiday,
    resolve_effects,
)
from .config import AUTO, DetectorConfig, ZscoreMode
from .decompose import (
    DecompositionResult,
    blend_dst_seasonal,
    decompose,
    detrend,
    extract_event,
    extract_seasonal,
    extract_seasonal_trend,
    extract_trend,
    finalize_residual,
)
from .detector import (
    Anomaly,
    AnomalyReport,
    detect_batch,
    detect_batch_with_trace,
    detect_stream,
)
from .errors import InsufficientDataError, MediffError, UsageError
from .esd import EsdIteration, EsdOutcome, critical_value, esd_test
from .evalbench import (
    DstShiftPlan,
    EvalResult,
    HolidayPlan,
    LabelSet,
    LevelShiftPlan,
    SpikePlan,
    SyntheticSpec,
    condense,
    generate_synthetic,
    match_and_score,
    plan_random_events,
)
from .median import median, moving_median
from .series import MISSING, ONE_MINUTE, TimeSeries, iter_batches
from .student import t_cdf, t_quantile

__version__ = "0.1.0"

__all__ = [
    "AUTO",
    "Anomaly",
    "AnomalyReport",
    "CalendarConfig",
    "DecompositionResult",
    "DetectorConfig",
    "DstShiftPlan",
    "EMPTY_CALENDAR",
    "EffectResolution",
    "EsdIteration",
    "EsdOutcome",
    "EvalResult",
    "Holiday",
    "HolidayPlan",
    "InsufficientDataError",
    "LabelSet",
    "LevelShiftPlan",
    "MISSING",
    "MediffError",
    "ONE_MINUTE",
    "SpikePlan",
    "SyntheticSpec",
    "TimeSeries",
    "UsageError",
    "ZscoreMode",
    "blend_dst_seasonal",
    "condense",
    "critical_value",
    "decompose",
    "detect_batch",
    "detect_batch_with_trace",
    "detect_stream",
    "detrend",
    "esd_test",
    "extract_event",
    "extract_seasonal",
    "extract_seasonal_trend",
    "extract_trend",
    "finalize_residual",
    "generate_synthetic",
    "iter_batches",
    "match_and_score",
    "median",
    "moving_median",
    "plan_random_events",
    "resolve_effects",
    "t_cdf",
    "t_quantile",
    "__version__",
]

"""End-to-end batch detection: resolve calendar effects, decompose, run the
outlier test on the residual, and map flagged positions back to the series."""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from datetime import datetime

import numpy as np

from .calendar import EMPTY_CALENDAR, CalendarConfig, EffectResolution, resolve_effects
from .config import DetectorConfig
from .decompose import DecompositionResult, decompose
from .errors import InsufficientDataError, UsageError
from .esd import esd_test
from .series import TimeSeries


@dataclass(frozen=True)
class Anomaly:
    """One detected point with the evidence that flagged it.

    ``index`` is the 1-based position in the full series; ``zscore`` and
    ``critical`` are the test iteration's values, recorded verbatim (under
    the many-outlier stopping rule an individual retained iteration may
    score at or below its critical value).
    """

    index: int
    timestamp: datetime
    value: float
    residual: float
    zscore: float
    critical: float


@dataclass(frozen=True)
class AnomalyReport:
    series_id: str
    batch_span: tuple[datetime, datetime]
    anomalies: tuple[Anomaly, ...]
    effect: EffectResolution
    config_used: DetectorConfig
    elapsed_seconds: float

    @property
    def anomaly_indices(self) -> tuple[int, ...]:
        return tuple(a.index for a in self.anomalies)


def _as_series(y: TimeSeries | np.ndarray) -> TimeSeries:
    if isinstance(y, TimeSeries):
        return y
    return TimeSeries(values=np.asarray(y, dtype=np.float64))


def detect_batch_with_trace(
    y: TimeSeries | np.ndarray,
    config: DetectorConfig | None = None,
    calendar: CalendarConfig | None = None,
) -> tuple[AnomalyReport, DecompositionResult]:
    """Like :func:`detect_batch` but also returns the decomposition,
    for trace export and plotting."""
    started = time.perf_counter()
    series = _as_series(y)
    config = config or DetectorConfig()
    calendar = calendar if calendar is not None else EMPTY_CALENDAR

    if series.present_count() == 0:
        raise InsufficientDataError(
            f"batch '{series.series_id}' is entirely missing; nothing to detect"
        )

    effect = resolve_effects(
        (series.start_time, series.end_time),
        calendar,
        configured_beta=config.beta,
        requested_gamma=config.gamma,
        default_dst_effect=config.season_len * series.sample_period,
    )
    result = decompose(
        series.values,
        config,
        beta=effect.beta_effective,
        gamma=effect.gamma_effective,
    )
    n_present = int(np.count_nonzero(~np.isnan(result.residual)))
    m = config.resolve_max_outliers(n_present)
    outcome = esd_test(result.residual, m=m, alpha=config.alpha, mode=config.zscore_mode)

    kept = outcome.iterations[: outcome.num_outliers]
    by_position = {it.removed_index: it for it in kept}
    anomalies = []
    for pos in outcome.flagged:
        iteration = by_position[pos]
        k = result.residual_start + pos - 1
        anomalies.append(
            Anomaly(
                index=k,
                timestamp=series.time_at(k),
                value=float(series.values[k - 1]),
                residual=float(result.residual[pos - 1]),
                zscore=iteration.zscore,
                critical=iteration.critical,
            )
        )

    report = AnomalyReport(
        series_id=series.series_id,
        batch_span=(series.start_time, series.end_time),
        anomalies=tuple(anomalies),
        effect=effect,
        config_used=config,
        elapsed_seconds=time.perf_counter() - started,
    )
    return report, result


def detect_batch(
    y: TimeSeries | np.ndarray,
    config: DetectorConfig | None = None,
    calendar: CalendarConfig | None = None,
) -> AnomalyReport:
    """Detect anomalies in one batch.

    Pipeline: resolve the calendar into effective (beta, gamma) for the
    batch span, decompose, test the residual with max-outlier count
    resolved against the residual's present sample count, then map flagged
    residual positions to 1-based series positions.
    """
    report, _ = detect_batch_with_trace(y, config, calendar)
    return report


def detect_stream(
    batches,
    config: DetectorConfig | None = None,
    calendar: CalendarConfig | None = None,
) -> list[AnomalyReport]:
    """Detect over an ordered sequence of (possibly overlapping) batch
    windows; an anomaly re-reported at a timestamp already reported by an
    earlier window is dropped from the later report."""
    batches = [_as_series(b) for b in batches]
    if not batches:
        return []
    period = batches[0].sample_period
    for b in batches[1:]:
        if b.sample_period != period:
            raise UsageError(
                f"all batches must share one sample period; got {period} "
                f"and {b.sample_period}"
            )
    seen: set[datetime] = set()
    reports = []
    for batch in batches:
        report = detect_batch(batch, config, calendar)
        fresh = tuple(a for a in report.anomalies if a.timestamp not in seen)
        seen.update(a.timestamp for a in report.anomalies)
        reports.append(replace(report, anomalies=fresh))
    return reports

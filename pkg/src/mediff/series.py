"""Uniformly sampled time series with explicit missing values.

Missing samples are stored as NaN. Sample positions follow the 1-based
convention used everywhere at the public surface: sample k (1 <= k <= len)
was observed at ``start_time + (k - 1) * sample_period``. Internal numpy
arrays are 0-based; conversion happens only at API boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from typing import Iterator, Sequence

import numpy as np

from .errors import UsageError

ONE_MINUTE = timedelta(minutes=1)

MISSING = float("nan")


def _as_value_array(values: Sequence[float] | np.ndarray) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise UsageError(f"values must be one-dimensional, got shape {arr.shape}")
    if arr.size < 1:
        raise UsageError("a time series needs at least one sample")
    if np.isinf(arr).any():
        raise UsageError("non-missing values must be finite (found an infinity)")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class TimeSeries:
    """A uniformly sampled metric with NaN marking missing samples.

    Attributes:
        start_time: timestamp of sample k=1; must be timezone-aware.
        sample_period: spacing between consecutive samples (default one minute).
        values: float64 array, NaN where the sample is missing.
    """

    values: np.ndarray
    start_time: datetime = datetime(2025, 1, 6, tzinfo=timezone.utc)
    sample_period: timedelta = ONE_MINUTE
    series_id: str = "series"

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _as_value_array(self.values))
        if self.start_time.tzinfo is None:
            raise UsageError("start_time must be timezone-aware (UTC)")
        if self.sample_period <= timedelta(0):
            raise UsageError("sample_period must be positive")

    def __len__(self) -> int:
        return int(self.values.size)

    def time_at(self, k: int) -> datetime:
        """Timestamp of 1-based sample position k."""
        if not 1 <= k <= len(self):
            raise UsageError(f"sample position {k} outside [1, {len(self)}]")
        return self.start_time + (k - 1) * self.sample_period

    def index_at(self, ts: datetime) -> int:
        """1-based sample position of an exact timestamp."""
        delta = ts - self.start_time
        steps, rem = divmod(delta, self.sample_period)
        if rem or not 0 <= steps < len(self):
            raise UsageError(f"{ts.isoformat()} is not a sample instant of this series")
        return int(steps) + 1

    @property
    def end_time(self) -> datetime:
        """Timestamp of the last sample."""
        return self.time_at(len(self))

    @property
    def span(self) -> tuple[datetime, datetime]:
        """(first sample instant, last sample instant)."""
        return self.start_time, self.end_time

    @property
    def missing_mask(self) -> np.ndarray:
        return np.isnan(self.values)

    def present_count(self) -> int:
        return int(np.count_nonzero(~np.isnan(self.values)))

    def slice(self, start_k: int, end_k: int) -> "TimeSeries":
        """Sub-series covering 1-based positions [start_k, end_k], inclusive."""
        if not (1 <= start_k <= end_k <= len(self)):
            raise UsageError(
                f"slice [{start_k}, {end_k}] outside series bounds [1, {len(self)}]"
            )
        return TimeSeries(
            values=self.values[start_k - 1 : end_k],
            start_time=self.time_at(start_k),
            sample_period=self.sample_period,
            series_id=self.series_id,
        )


def iter_batches(series: TimeSeries, batch_len: int, stride: int) -> Iterator[TimeSeries]:
    """Sliding windows of ``batch_len`` samples advancing by ``stride``.

    A series no longer than one batch yields itself. The final window is
    anchored to the series end so every sample is covered at least once.
    """
    if batch_len < 1 or stride < 1:
        raise UsageError("batch_len and stride must be positive")
    n = len(series)
    if n <= batch_len:
        yield series
        return
    start = 1
    while True:
        end = start + batch_len - 1
        if end >= n:
            yield series.slice(n - batch_len + 1, n)
            return
        yield series.slice(start, end)
        start += stride

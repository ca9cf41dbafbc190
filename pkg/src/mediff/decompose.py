"""Median-based decomposition of a series into trend, seasonal,
seasonal-trend, DST-blended seasonal, event, and residual components.

Domain bookkeeping, in 1-based sample positions of the input series of
length n with trend window w_mu:

* trend, detrended, seasonal, seasonal_trend, dst_seasonal, and the
  intermediate residual r live on [w_mu, n] (length n - w_mu + 1);
* the event component lives on [w_mu + w_r - 1, n];
* the final residual lives on r's domain when gamma=0 and on the event
  domain when gamma=1.

Every component array is stored over exactly its domain; NaN inside a
domain means the value is missing (e.g. propagated from missing input),
never out-of-domain.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .config import DetectorConfig
from .errors import InsufficientDataError, UsageError
from .median import moving_median
from .series import TimeSeries


def _values_of(y: TimeSeries | np.ndarray) -> np.ndarray:
    if isinstance(y, TimeSeries):
        return y.values
    return np.asarray(y, dtype=np.float64)


def extract_trend(y: TimeSeries | np.ndarray, w_mu: int) -> np.ndarray:
    """Trailing moving median of window w_mu; defined from position w_mu on."""
    values = _values_of(y)
    if w_mu < 1:
        raise UsageError(f"trend window must be >= 1, got {w_mu}")
    if w_mu > values.size:
        raise InsufficientDataError(
            f"trend extraction with window w_mu={w_mu} needs at least {w_mu} "
            f"samples, series has {values.size}"
        )
    return moving_median(values, w_mu)[w_mu - 1 :]


def detrend(y: TimeSeries | np.ndarray, trend: np.ndarray) -> np.ndarray:
    """Series minus trend on the trend's domain (tail-aligned). NaN propagates."""
    values = _values_of(y)
    trend = np.asarray(trend, dtype=np.float64)
    if trend.size > values.size or trend.size == 0:
        raise UsageError(
            f"trend of length {trend.size} cannot align with a series of "
            f"length {values.size}"
        )
    return values[values.size - trend.size :] - trend


def extract_seasonal(
    detrended: np.ndarray, season_len: int, half_window: int
) -> np.ndarray:
    """Per-phase median across all season-aligned offsets, both directions.

    The collection set for position k is every in-domain sample whose offset
    from k is congruent (mod season_len) to some j in [-half_window,
    half_window]; the result is therefore exactly season-periodic.
    """
    detrended = np.asarray(detrended, dtype=np.float64)
    n = detrended.size
    if n == 0:
        raise UsageError("seasonal extraction needs a non-empty detrended series")
    if season_len < 1:
        raise UsageError(f"season_len must be >= 1, got {season_len}")
    if not 0 <= half_window < season_len:
        raise UsageError(
            f"seasonal half-window must satisfy 0 <= w_s < season_len, got "
            f"w_s={half_window} season_len={season_len}"
        )
    rows = math.ceil(n / season_len)
    padded = np.full(rows * season_len, np.nan)
    padded[:n] = detrended
    mat = padded.reshape(rows, season_len)
    # column p of roll(mat, -j) is mat[:, (p + j) % season_len]
    stack = np.stack(
        [np.roll(mat, -j, axis=1) for j in range(-half_window, half_window + 1)]
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        phase_medians = np.nanmedian(stack, axis=(0, 1))
    return np.tile(phase_medians, rows)[:n]


def extract_seasonal_trend(detrended: np.ndarray, w_s_hat: int) -> np.ndarray:
    """Short trailing moving median of the detrended series.

    Positions whose backward window would leave the domain use the
    available prefix, so the output covers the full detrended domain.
    """
    detrended = np.asarray(detrended, dtype=np.float64)
    if w_s_hat < 1:
        raise UsageError(f"seasonal-trend window must be >= 1, got {w_s_hat}")
    if detrended.size == 0:
        raise UsageError("seasonal-trend extraction needs a non-empty series")
    return moving_median(detrended, w_s_hat)


def blend_dst_seasonal(
    seasonal: np.ndarray, seasonal_trend: np.ndarray, beta: float
) -> np.ndarray:
    """Convex blend beta*seasonal + (1-beta)*seasonal_trend.

    At beta exactly 0 or 1 the unselected operand is ignored entirely, so
    its missing values cannot leak into the blend.
    """
    if not 0.0 <= beta <= 1.0:
        raise UsageError(f"beta must lie in [0, 1], got {beta}")
    seasonal = np.asarray(seasonal, dtype=np.float64)
    seasonal_trend = np.asarray(seasonal_trend, dtype=np.float64)
    if seasonal.shape != seasonal_trend.shape:
        raise UsageError(
            f"seasonal ({seasonal.size}) and seasonal-trend "
            f"({seasonal_trend.size}) must share a domain"
        )
    if beta == 1.0:
        return seasonal.copy()
    if beta == 0.0:
        return seasonal_trend.copy()
    return beta * seasonal + (1.0 - beta) * seasonal_trend


def extract_event(
    y: TimeSeries | np.ndarray,
    trend: np.ndarray,
    dst_seasonal: np.ndarray,
    w_r: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Intermediate residual r = y - trend - dst_seasonal and its trailing
    moving median e (the event component, dropping the first w_r - 1
    positions where the window would leave r's domain)."""
    values = _values_of(y)
    trend = np.asarray(trend, dtype=np.float64)
    dst_seasonal = np.asarray(dst_seasonal, dtype=np.float64)
    if trend.shape != dst_seasonal.shape:
        raise UsageError(
            f"trend ({trend.size}) and dst_seasonal ({dst_seasonal.size}) "
            f"must share a domain"
        )
    if w_r < 1:
        raise UsageError(f"event window must be >= 1, got {w_r}")
    r = detrend(values, trend) - dst_seasonal
    if r.size < w_r:
        raise InsufficientDataError(
            f"event extraction with window w_r={w_r} needs a residual of at "
            f"least {w_r} samples, got {r.size}"
        )
    e = moving_median(r, w_r)[w_r - 1 :]
    return r, e


def finalize_residual(r: np.ndarray, e: np.ndarray | None, gamma: int) -> np.ndarray:
    """Final residual r - gamma*e; e is tail-aligned to r when gamma=1."""
    if gamma not in (0, 1):
        raise UsageError(f"gamma must be 0 or 1, got {gamma}")
    r = np.asarray(r, dtype=np.float64)
    if gamma == 0:
        return r.copy()
    if e is None:
        raise UsageError("gamma=1 requires the event component")
    e = np.asarray(e, dtype=np.float64)
    if e.size > r.size:
        raise UsageError(
            f"event component ({e.size}) longer than residual ({r.size})"
        )
    return r[r.size - e.size :] - e


@dataclass(frozen=True)
class DecompositionResult:
    """All component series of one decomposition with their domains.

    ``trend_start`` / ``event_start`` / ``residual_start`` are the 1-based
    series positions of each component's first element.
    """

    series_len: int
    trend_start: int
    trend: np.ndarray
    detrended: np.ndarray
    seasonal: np.ndarray
    seasonal_trend: np.ndarray
    dst_seasonal: np.ndarray
    intermediate: np.ndarray
    event: np.ndarray | None
    event_start: int | None
    residual: np.ndarray
    residual_start: int
    beta: float
    gamma: int

    @property
    def residual_positions(self) -> np.ndarray:
        """1-based series positions of the residual samples."""
        return np.arange(self.residual_start, self.residual_start + self.residual.size)

    def reconstruction(self) -> np.ndarray:
        """trend + dst_seasonal + gamma*event + residual over the residual domain.

        Equals the input series there, up to floating-point round-off, at
        every position where nothing is missing.
        """
        offset = self.residual_start - self.trend_start
        total = (
            self.trend[offset:]
            + self.dst_seasonal[offset:]
            + self.residual
        )
        if self.gamma == 1 and self.event is not None:
            total = total + self.event[self.event.size - self.residual.size :]
        return total


def decompose(
    y: TimeSeries | np.ndarray,
    config: DetectorConfig | None = None,
    beta: float | None = None,
    gamma: int | None = None,
) -> DecompositionResult:
    """Run the full decomposition with explicit effective weights.

    ``beta``/``gamma`` default to the configured values; the detector passes
    calendar-resolved ones instead. With gamma=0 the event component is
    skipped entirely and the residual keeps the full trend domain.
    """
    config = config or DetectorConfig()
    values = _values_of(y)
    beta = config.beta if beta is None else beta
    gamma = config.gamma if gamma is None else gamma
    if gamma not in (0, 1):
        raise UsageError(f"gamma must be 0 or 1, got {gamma}")

    w_mu = config.trend_window
    trend = extract_trend(values, w_mu)
    detrended = detrend(values, trend)
    seasonal = extract_seasonal(detrended, config.season_len, config.w_s)
    seasonal_trend = extract_seasonal_trend(detrended, config.w_s_hat)
    dst_seasonal = blend_dst_seasonal(seasonal, seasonal_trend, beta)

    if gamma == 1:
        intermediate, event = extract_event(values, trend, dst_seasonal, config.w_r)
        residual = finalize_residual(intermediate, event, 1)
        event_start: int | None = w_mu + config.w_r - 1
        residual_start = w_mu + config.w_r - 1
    else:
        intermediate = detrended - dst_seasonal
        event = None
        event_start = None
        residual = intermediate.copy()
        residual_start = w_mu

    return DecompositionResult(
        series_len=values.size,
        trend_start=w_mu,
        trend=trend,
        detrended=detrended,
        seasonal=seasonal,
        seasonal_trend=seasonal_trend,
        dst_seasonal=dst_seasonal,
        intermediate=intermediate,
        event=event,
        event_start=event_start,
        residual=residual,
        residual_start=residual_start,
        beta=beta,
        gamma=gamma,
    )

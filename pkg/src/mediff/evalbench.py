"""Evaluation harness and synthetic labeled-corpus generator.

Scoring follows the event convention used throughout: runs of consecutive
anomalous indices form one event denoted by its first index, and a detection
counts as a true positive only when it lands within a fixed delay window
*after* a label (early detections are false positives).
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta, timezone

import numpy as np

from .calendar import CalendarConfig, Holiday
from .errors import UsageError
from .series import ONE_MINUTE, TimeSeries

TEN_MINUTES = timedelta(minutes=10)


@dataclass(frozen=True)
class LabelSet:
    """Ground-truth anomaly events for one series: each label is the 1-based
    index of the first point of an event."""

    series_id: str
    labels: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        labels = tuple(int(v) for v in self.labels)
        for prev, cur in zip(labels, labels[1:]):
            if cur <= prev:
                raise UsageError(
                    f"labels must be strictly increasing, got {prev} then {cur}"
                )
        if labels and labels[0] < 1:
            raise UsageError(f"labels are 1-based, got {labels[0]}")
        object.__setattr__(self, "labels", labels)


@dataclass(frozen=True)
class EvalResult:
    tp: int
    fp: int
    fn: int

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2.0 * r * p / (r + p) if r + p else 0.0

    def __add__(self, other: "EvalResult") -> "EvalResult":
        return EvalResult(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)


def condense(detections) -> list[int]:
    """Collapse maximal runs of consecutive indices to their first index."""
    ordered = sorted(set(int(d) for d in detections))
    out = []
    for idx in ordered:
        if not out or idx != prev + 1:
            out.append(idx)
        prev = idx
    return out


def match_and_score(
    detections,
    labels: LabelSet | tuple | list,
    sample_period: timedelta = ONE_MINUTE,
    delay_budget: timedelta = TEN_MINUTES,
) -> EvalResult:
    """Greedy earliest-first one-to-one matching of condensed detections to
    labels; detection d matches label t iff t <= d <= t + delay window."""
    label_list = list(labels.labels if isinstance(labels, LabelSet) else labels)
    det_list = sorted(int(d) for d in detections)
    if sample_period <= timedelta(0):
        raise UsageError(f"sample period must be positive, got {sample_period}")
    window = delay_budget / sample_period
    i = 0
    tp = 0
    for d in det_list:
        while i < len(label_list) and label_list[i] + window < d:
            i += 1
        if i < len(label_list) and label_list[i] <= d:
            tp += 1
            i += 1
    return EvalResult(tp=tp, fp=len(det_list) - tp, fn=len(label_list) - tp)


# ---------------------------------------------------------------------------
# Synthetic corpus generation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpikePlan:
    """Single-point spike at a 1-based index, sized in noise standard
    deviations (negative for a downward spike)."""

    index: int
    magnitude_sigmas: float = 8.0


@dataclass(frozen=True)
class LevelShiftPlan:
    """Sustained offset starting at a 1-based index for `duration` samples."""

    index: int
    duration: int
    magnitude_sigmas: float = 8.0


@dataclass(frozen=True)
class DstShiftPlan:
    """From `transition_index` onward the seasonal profile is evaluated
    `offset` samples late, i.e. the pattern arrives shifted in time."""

    transition_index: int
    offset: int = 60


@dataclass(frozen=True)
class HolidayPlan:
    """Calendar-known sustained dip (not an anomaly, so never labeled)."""

    start_index: int
    duration: int
    magnitude_sigmas: float = 10.0
    label: str = "holiday"


@dataclass(frozen=True)
class SyntheticSpec:
    weeks: int = 4
    season_len: int = 10080
    series_id: str = "synthetic"
    start_time: datetime = datetime(2025, 1, 6, tzinfo=timezone.utc)
    sample_period: timedelta = ONE_MINUTE
    base_level: float = 100.0
    trend_slope: float = 1e-4
    profile_amplitude: float = 20.0
    noise_std: float = 1.0
    spikes: tuple[SpikePlan, ...] = ()
    level_shifts: tuple[LevelShiftPlan, ...] = ()
    dst_shift: DstShiftPlan | None = None
    holiday: HolidayPlan | None = None
    seed: int = 0

    @property
    def length(self) -> int:
        return self.weeks * self.season_len


def _weekly_profile(u: np.ndarray) -> np.ndarray:
    """Smooth profile over season phase u in [0, 1): seven daily humps under
    a weekly envelope, so sub-cycles exist for the seasonal median to learn."""
    return (
        np.sin(2.0 * np.pi * 7.0 * u)
        + 0.35 * np.sin(2.0 * np.pi * u)
        + 0.20 * np.sin(2.0 * np.pi * 14.0 * u + 1.0)
    )


def generate_synthetic(spec: SyntheticSpec) -> tuple[TimeSeries, LabelSet, CalendarConfig]:
    """Build a deterministic labeled series plus its matching calendar.

    Labels carry the first index of every injected spike or level shift;
    the optional profile time-shift and holiday dip are calendar effects,
    recorded in the CalendarConfig rather than labeled.
    """
    if spec.weeks < 2:
        raise UsageError(f"synthetic series need at least 2 weeks, got {spec.weeks}")
    n = spec.length
    period = spec.sample_period

    def check_range(idx: int, what: str, duration: int = 1) -> None:
        if not 1 <= idx <= n - duration + 1:
            raise UsageError(
                f"{what} at index {idx} (duration {duration}) falls outside "
                f"the series of length {n}"
            )

    rng = np.random.default_rng(spec.seed)
    k = np.arange(n, dtype=np.float64)

    phase = (k % spec.season_len) / spec.season_len
    if spec.dst_shift is not None:
        check_range(spec.dst_shift.transition_index, "dst shift")
        t0 = spec.dst_shift.transition_index - 1
        shifted = ((k - spec.dst_shift.offset) % spec.season_len) / spec.season_len
        phase = np.where(k >= t0, shifted, phase)

    values = (
        spec.base_level
        + spec.trend_slope * k
        + spec.profile_amplitude * _weekly_profile(phase)
        + rng.normal(0.0, spec.noise_std, n)
    )

    labels: list[int] = []
    for spike in spec.spikes:
        check_range(spike.index, "spike")
        values[spike.index - 1] += spike.magnitude_sigmas * spec.noise_std
        labels.append(spike.index)
    for shift in spec.level_shifts:
        if shift.duration < 1:
            raise UsageError(f"level shift duration must be >= 1, got {shift.duration}")
        check_range(shift.index, "level shift", shift.duration)
        lo = shift.index - 1
        values[lo : lo + shift.duration] += shift.magnitude_sigmas * spec.noise_std
        labels.append(shift.index)

    ordered = sorted(labels)
    for prev, cur in zip(ordered, ordered[1:]):
        if cur == prev:
            raise UsageError(f"two injected events share index {cur}")

    holidays = ()
    if spec.holiday is not None:
        h = spec.holiday
        if h.duration < 1:
            raise UsageError(f"holiday duration must be >= 1, got {h.duration}")
        check_range(h.start_index, "holiday", h.duration)
        lo = h.start_index - 1
        values[lo : lo + h.duration] -= h.magnitude_sigmas * spec.noise_std
        h_start = spec.start_time + (h.start_index - 1) * period
        h_end = spec.start_time + (h.start_index - 1 + h.duration - 1) * period
        holidays = (Holiday(start=h_start, end=h_end, label=h.label),)

    transitions = ()
    if spec.dst_shift is not None:
        transitions = (
            spec.start_time + (spec.dst_shift.transition_index - 1) * period,
        )

    series = TimeSeries(
        values=values,
        start_time=spec.start_time,
        sample_period=period,
        series_id=spec.series_id,
    )
    label_set = LabelSet(series_id=spec.series_id, labels=tuple(ordered))
    calendar = CalendarConfig(dst_transitions=transitions, holidays=holidays)
    return series, label_set, calendar


def plan_random_events(
    seed: int,
    *,
    weeks: int = 4,
    season_len: int = 10080,
    num_spikes: int = 6,
    num_level_shifts: int = 2,
    noise_std: float = 1.0,
    magnitude_sigmas: float = 8.0,
    dst_shift: DstShiftPlan | None = None,
    holiday: HolidayPlan | None = None,
    series_id: str | None = None,
) -> SyntheticSpec:
    """Draw a reproducible event plan: spike/level-shift positions sampled
    uniformly after the first season (so every event lands where the trend
    window is fully formed), kept at least two event windows apart."""
    rng = np.random.default_rng(seed)
    n = weeks * season_len
    lo = season_len + max(200, season_len // 8)
    hi = n - 200
    if hi <= lo:
        raise UsageError(
            f"series too short for event placement: usable range [{lo}, {hi}]"
        )
    min_gap = 150
    positions: list[int] = []
    attempts = 0
    while len(positions) < num_spikes + num_level_shifts:
        attempts += 1
        if attempts > 10_000:
            raise UsageError("could not place events with the required spacing")
        cand = int(rng.integers(lo, hi + 1))
        if all(abs(cand - p) >= min_gap for p in positions):
            positions.append(cand)
    spikes = tuple(
        SpikePlan(
            index=p,
            magnitude_sigmas=float(magnitude_sigmas * (1 if rng.random() < 0.5 else -1)),
        )
        for p in positions[:num_spikes]
    )
    shifts = tuple(
        LevelShiftPlan(
            index=p,
            duration=int(rng.integers(5, 16)),
            magnitude_sigmas=float(magnitude_sigmas),
        )
        for p in positions[num_spikes:]
    )
    return SyntheticSpec(
        weeks=weeks,
        season_len=season_len,
        series_id=series_id or f"synthetic-{seed}",
        noise_std=noise_std,
        spikes=spikes,
        level_shifts=shifts,
        dst_shift=dst_shift,
        holiday=holiday,
        seed=seed,
    )

"""Calendar of DST transitions and holiday ranges, and their resolution
into per-batch decomposition weights.

The calendar holds explicit UTC instants; no time-zone database is
consulted. A DST transition affects detection for ``dst_effect_duration``
after the instant (the detector defaults that to one season length when
the calendar leaves it unset).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timedelta

from .errors import UsageError


@dataclass(frozen=True, order=True)
class Holiday:
    start: datetime
    end: datetime
    label: str = ""

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise UsageError(
                f"holiday {self.label!r} has start after end "
                f"({self.start.isoformat()} > {self.end.isoformat()})"
            )


@dataclass(frozen=True)
class CalendarConfig:
    """DST transition instants and holiday/event ranges, sorted ascending."""

    dst_transitions: tuple[datetime, ...] = ()
    holidays: tuple[Holiday, ...] = ()
    dst_effect_duration: timedelta | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "dst_transitions", tuple(sorted(self.dst_transitions)))
        object.__setattr__(self, "holidays", tuple(sorted(self.holidays)))
        for ts in self.dst_transitions:
            if ts.tzinfo is None:
                raise UsageError("DST transition instants must be timezone-aware")
        for h in self.holidays:
            if h.start.tzinfo is None or h.end.tzinfo is None:
                raise UsageError("holiday instants must be timezone-aware")
        if self.dst_effect_duration is not None and self.dst_effect_duration < timedelta(0):
            raise UsageError("dst_effect_duration must be non-negative")

    @property
    def is_empty(self) -> bool:
        return not self.dst_transitions and not self.holidays


EMPTY_CALENDAR = CalendarConfig()


@dataclass(frozen=True)
class EffectResolution:
    """Effective (beta, gamma) for one batch plus the calendar entries that matched."""

    beta_effective: float
    gamma_effective: int
    reasons: tuple[str, ...] = field(default_factory=tuple)


def _intervals_intersect(
    a_start: datetime, a_end: datetime, b_start: datetime, b_end: datetime
) -> bool:
    return a_start <= b_end and b_start <= a_end


def resolve_effects(
    batch_span: tuple[datetime, datetime],
    calendar: CalendarConfig,
    configured_beta: float,
    requested_gamma: int,
    default_dst_effect: timedelta | None = None,
) -> EffectResolution:
    """Resolve calendar entries intersecting a batch into effective weights.

    beta_effective is ``configured_beta`` when any DST transition's effect
    window [t, t + duration] intersects the span, else 1. gamma_effective
    is 1 only when gamma was requested and a holiday intersects the span.
    The effect duration comes from the calendar, falling back to
    ``default_dst_effect``, falling back to zero (the instant alone).
    """
    start, end = batch_span
    if start > end:
        raise UsageError(
            f"batch span start {start.isoformat()} is after end {end.isoformat()}"
        )
    if not 0.0 <= configured_beta <= 1.0:
        raise UsageError(f"beta must lie in [0, 1], got {configured_beta}")
    if requested_gamma not in (0, 1):
        raise UsageError(f"gamma must be 0 or 1, got {requested_gamma}")

    effect = calendar.dst_effect_duration
    if effect is None:
        effect = default_dst_effect if default_dst_effect is not None else timedelta(0)

    reasons: list[str] = []
    dst_hit = False
    for t in calendar.dst_transitions:
        if _intervals_intersect(start, end, t, t + effect):
            dst_hit = True
            reasons.append(f"dst-transition {t.isoformat()}")
    gamma_hit = False
    if requested_gamma == 1:
        for h in calendar.holidays:
            if _intervals_intersect(start, end, h.start, h.end):
                gamma_hit = True
                label = h.label or "holiday"
                reasons.append(
                    f"holiday {label} {h.start.isoformat()}..{h.end.isoformat()}"
                )

    return EffectResolution(
        beta_effective=configured_beta if dst_hit else 1.0,
        gamma_effective=1 if gamma_hit else 0,
        reasons=tuple(reasons),
    )

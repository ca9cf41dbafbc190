"""Detector parameters and their validation.

Defaults target weekly seasonality at one-minute sampling: season and trend
windows of 10080 samples, a +/-3 sample seasonal collection window, a
30-sample seasonal-trend window, a 60-sample event window, significance
0.05, and a suspected-outlier budget of 2% of the tested residual.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, fields, replace
from typing import Any, Mapping

from .errors import UsageError


class ZscoreMode(str, enum.Enum):
    """Deviation scoring used by the outlier test."""

    ROBUST_MAD = "robust_mad"
    CLASSIC = "classic"


#: Samples in one week at one-minute sampling.
WEEK_MINUTES = 10080

AUTO = "auto"


@dataclass(frozen=True)
class DetectorConfig:
    """All windows, weights, and test parameters of the detector.

    ``max_outliers="auto"`` resolves to round(0.02 * n) at test time, where
    n is the present-sample count of the tested residual (clamped to
    [1, n - 3]). ``w_mu=None`` resolves to ``season_len``.
    """

    season_len: int = WEEK_MINUTES
    w_mu: int | None = None
    w_s: int = 3
    w_s_hat: int = 30
    w_r: int = 60
    beta: float = 0.4
    gamma: int = 1
    max_outliers: int | str = AUTO
    alpha: float = 0.05
    zscore_mode: ZscoreMode = ZscoreMode.CLASSIC

    def __post_init__(self) -> None:
        if self.season_len < 1:
            raise UsageError(f"season_len must be >= 1, got {self.season_len}")
        if self.w_mu is not None and self.w_mu < 1:
            raise UsageError(f"w_mu must be >= 1, got {self.w_mu}")
        if not 0 <= self.w_s < self.season_len:
            raise UsageError(
                f"w_s must satisfy 0 <= w_s < season_len, got w_s={self.w_s} "
                f"season_len={self.season_len}"
            )
        if self.w_s_hat < 1:
            raise UsageError(f"w_s_hat must be >= 1, got {self.w_s_hat}")
        if self.w_r < 1:
            raise UsageError(f"w_r must be >= 1, got {self.w_r}")
        if not 0.0 <= self.beta <= 1.0:
            raise UsageError(f"beta must lie in [0, 1], got {self.beta}")
        if self.gamma not in (0, 1):
            raise UsageError(f"gamma must be 0 or 1, got {self.gamma}")
        if not 0.0 < self.alpha < 1.0:
            raise UsageError(f"alpha must lie in (0, 1), got {self.alpha}")
        if isinstance(self.max_outliers, str):
            if self.max_outliers != AUTO:
                raise UsageError(
                    f'max_outliers must be a positive integer or "auto", '
                    f"got {self.max_outliers!r}"
                )
        elif self.max_outliers < 1:
            raise UsageError(f"max_outliers must be >= 1, got {self.max_outliers}")
        if not isinstance(self.zscore_mode, ZscoreMode):
            try:
                object.__setattr__(self, "zscore_mode", ZscoreMode(self.zscore_mode))
            except ValueError as exc:
                valid = ", ".join(m.value for m in ZscoreMode)
                raise UsageError(
                    f"zscore_mode must be one of {valid}, got {self.zscore_mode!r}"
                ) from exc

    @property
    def trend_window(self) -> int:
        """w_mu with the default (one season) resolved."""
        return self.season_len if self.w_mu is None else self.w_mu

    def resolve_max_outliers(self, n_present: int) -> int:
        """Concrete suspected-outlier bound for a residual of n present samples."""
        if self.max_outliers == AUTO:
            m = round(0.02 * n_present)
            return max(1, min(m, n_present - 3))
        return int(self.max_outliers)

    def with_overrides(self, overrides: Mapping[str, Any]) -> "DetectorConfig":
        """Copy with named fields replaced; unknown keys are usage errors."""
        known = {f.name for f in fields(self)}
        unknown = sorted(set(overrides) - known)
        if unknown:
            raise UsageError(f"unknown config key(s): {', '.join(unknown)}")
        return replace(self, **dict(overrides))

    def to_dict(self) -> dict[str, Any]:
        return {
            "season_len": self.season_len,
            "w_mu": self.w_mu,
            "w_s": self.w_s,
            "w_s_hat": self.w_s_hat,
            "w_r": self.w_r,
            "beta": self.beta,
            "gamma": self.gamma,
            "max_outliers": self.max_outliers,
            "alpha": self.alpha,
            "zscore_mode": self.zscore_mode.value,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "DetectorConfig":
        return cls().with_overrides(data)

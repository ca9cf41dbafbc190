"""Generalized extreme Studentized deviate many-outlier test.

Runs the iterative test on a residual sample: in each of m iterations the
observation with the largest deviation from the center is scored and
removed, then critical values decide how many of the removals were real
outliers. Two scoring modes: CLASSIC uses mean and sample standard
deviation; ROBUST_MAD uses the median and the raw median absolute
deviation (no normal-consistency factor).

The outlier count is the largest iteration whose z-score exceeds its
critical value; the z-score sequence need not stay above the critical
curve up to that point, so earlier iterations are flagged even when their
own comparison failed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import ZscoreMode
from .errors import InsufficientDataError, UsageError
from .student import t_quantile

#: Floor applied when the scale statistic collapses to zero; any value not
#: exactly equal to the center then scores far beyond every critical value,
#: while exact ties score zero and are never flagged.
_ZERO_SCALE_FLOOR = 1e-12


@dataclass(frozen=True)
class EsdIteration:
    """One removal: the observation's position (1-based in the residual
    series handed to the test), its score, and the matching critical value."""

    removed_index: int
    zscore: float
    critical: float
    removed_value: float


@dataclass(frozen=True)
class EsdOutcome:
    iterations: tuple[EsdIteration, ...]
    num_outliers: int
    flagged: tuple[int, ...]

    @property
    def flagged_set(self) -> frozenset[int]:
        return frozenset(self.flagged)


def critical_value(n: int, i: int, alpha: float) -> float:
    """Critical value for iteration i of a generalized ESD test on n samples."""
    p = 1.0 - alpha / (2.0 * (n - i + 1))
    nu = n - i - 1
    t = t_quantile(p, float(nu))
    return (n - i) * t / math.sqrt((nu + t * t) * (n - i + 1))


def esd_test(
    residual: np.ndarray,
    m: int,
    alpha: float,
    mode: ZscoreMode = ZscoreMode.ROBUST_MAD,
) -> EsdOutcome:
    """Run the generalized ESD test on a residual sample.

    NaN entries (missing samples) are dropped before testing; all reported
    positions are 1-based into the array as passed, so they survive the
    removal. Requires at least m + 3 present samples so every critical
    value keeps >= 2 degrees of freedom.
    """
    if m < 1:
        raise UsageError(f"max outliers m must be >= 1, got {m}")
    if not 0.0 < alpha < 1.0:
        raise UsageError(f"alpha must lie in (0, 1), got {alpha}")
    mode = ZscoreMode(mode)

    values = np.asarray(residual, dtype=np.float64).ravel()
    present = ~np.isnan(values)
    active = values[present]
    positions = np.flatnonzero(present) + 1  # 1-based into the passed array
    n = int(active.size)
    if n < m + 3:
        raise InsufficientDataError(
            f"generalized ESD with m={m} needs at least {m + 3} present samples, "
            f"got {n}"
        )

    iterations: list[EsdIteration] = []
    num_outliers = 0
    for i in range(1, m + 1):
        if mode is ZscoreMode.ROBUST_MAD:
            center = float(np.median(active))
            deviations = np.abs(active - center)
            scale = float(np.median(deviations))
        else:
            center = float(np.mean(active))
            deviations = np.abs(active - center)
            scale = float(np.std(active, ddof=1))
        if scale == 0.0:
            scale = max(_ZERO_SCALE_FLOOR, _ZERO_SCALE_FLOOR * abs(center))

        j = int(np.argmax(deviations))  # first max -> lowest original index
        z = float(deviations[j]) / scale
        lam = critical_value(n, i, alpha)
        iterations.append(
            EsdIteration(
                removed_index=int(positions[j]),
                zscore=z,
                critical=lam,
                removed_value=float(active[j]),
            )
        )
        if z > lam:
            num_outliers = i
        active = np.delete(active, j)
        positions = np.delete(positions, j)

    flagged = tuple(sorted(it.removed_index for it in iterations[:num_outliers]))
    return EsdOutcome(
        iterations=tuple(iterations), num_outliers=num_outliers, flagged=flagged
    )

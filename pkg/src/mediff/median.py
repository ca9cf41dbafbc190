"""The median primitive used by every decomposition stage.

Policy: missing (NaN) entries are excluded; an all-missing window yields
NaN; an even count of present values yields the mean of the two middle
order statistics.
"""

from __future__ import annotations

import warnings
from typing import Sequence

import numpy as np
import pandas as pd

from .errors import UsageError


def median(window: Sequence[float] | np.ndarray) -> float:
    """Median of a window, excluding missing entries.

    Returns NaN when every entry is missing. Raises UsageError on an
    empty window.
    """
    arr = np.asarray(window, dtype=np.float64)
    if arr.size == 0:
        raise UsageError("median of an empty window is undefined")
    with warnings.catch_warnings():
        # all-NaN slice is a contract outcome, not a warning condition
        warnings.simplefilter("ignore", RuntimeWarning)
        return float(np.nanmedian(arr))


def moving_median(values: np.ndarray, window: int, min_count: int = 1) -> np.ndarray:
    """Trailing moving median; position k covers values[k-window+1 .. k].

    The first window-1 positions use the available prefix once it holds at
    least ``min_count`` present values (NaN otherwise). Missing entries are
    skipped inside every window.
    """
    if window < 1:
        raise UsageError(f"window must be >= 1, got {window}")
    out = (
        pd.Series(np.asarray(values, dtype=np.float64))
        .rolling(window, min_periods=min_count)
        .median()
        .to_numpy()
    )
    return out

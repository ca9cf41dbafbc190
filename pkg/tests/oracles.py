"""Independent brute-force reference implementations.

Everything here is written as a direct, naive transcription of the intended
math — pure-python loops, `statistics.median`, scipy's t distribution — and
deliberately shares no code with the package under test.
"""

from __future__ import annotations

import math
import statistics

import numpy as np
from scipy import stats


def naive_median(window) -> float:
    vals = [float(v) for v in window if not math.isnan(float(v))]
    if not vals:
        return float("nan")
    return float(statistics.median(vals))


def naive_moving_median(values, window: int) -> np.ndarray:
    """Trailing median over the last `window` samples, shrinking at the
    start; NaN entries skipped inside each window."""
    values = [float(v) for v in values]
    out = []
    for k in range(len(values)):
        lo = max(0, k - window + 1)
        out.append(naive_median(values[lo : k + 1]))
    return np.asarray(out)


def naive_seasonal(detrended, season_len: int, half_window: int) -> np.ndarray:
    """Median over { x = q + i*season_len + j } for every integer i (both
    signs), j in [-half_window, half_window], x inside the domain."""
    detrended = [float(v) for v in detrended]
    n = len(detrended)
    span = n // season_len + 1
    out = np.empty(n)
    for q in range(n):
        vals = []
        for i in range(-span, span + 1):
            for j in range(-half_window, half_window + 1):
                x = q + i * season_len + j
                if 0 <= x < n and not math.isnan(detrended[x]):
                    vals.append(detrended[x])
        out[q] = statistics.median(vals) if vals else float("nan")
    return out


def reference_critical_value(n: int, i: int, alpha: float) -> float:
    nu = n - i - 1
    tq = float(stats.t.ppf(1.0 - alpha / (2.0 * (n - i + 1)), nu))
    return (n - i) * tq / math.sqrt((nu + tq * tq) * (n - i + 1))


def reference_esd_classic(values, m: int, alpha: float):
    """Mean/sample-std score with everything recomputed from scratch each
    iteration; the max-deviation observation (lowest index on ties) is
    removed. Returns (iterations, num_outliers, flagged) with iterations as
    (position, zscore, critical, value) and 1-based positions."""
    work = []
    for idx, v in enumerate(values, start=1):
        v = float(v)
        if not math.isnan(v):
            work.append((idx, v))
    n = len(work)
    iterations = []
    for i in range(1, m + 1):
        data = [v for _, v in work]
        mean = sum(data) / len(data)
        std = math.sqrt(sum((v - mean) ** 2 for v in data) / (len(data) - 1))
        if std == 0.0:
            std = max(1e-12, 1e-12 * abs(mean))
        devs = [abs(v - mean) for v in data]
        best = max(range(len(devs)), key=devs.__getitem__)
        z = devs[best] / std
        lam = reference_critical_value(n, i, alpha)
        iterations.append((work[best][0], z, lam, work[best][1]))
        work.pop(best)
    num = 0
    for rank, (_, z, lam, _) in enumerate(iterations, start=1):
        if z > lam:
            num = rank
    flagged = tuple(sorted(pos for pos, _, _, _ in iterations[:num]))
    return iterations, num, flagged

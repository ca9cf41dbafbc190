"""Figure rendering for detection reports, decomposition traces, and
evaluation metrics. Import stays cheap: matplotlib loads on first use with
the non-interactive Agg backend, so rendering works headless."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .decompose import DecompositionResult
from .detector import AnomalyReport
from .series import TimeSeries


def _pyplot():
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    return plt


def _times(series: TimeSeries) -> list:
    return [series.time_at(k) for k in range(1, len(series) + 1)]


def plot_detection(
    path: str | Path,
    series: TimeSeries,
    report: AnomalyReport,
    result: DecompositionResult | None = None,
) -> None:
    """Observed series with flagged points marked; residual panel with the
    surviving test evidence when a decomposition is supplied."""
    plt = _pyplot()
    panels = 2 if result is not None else 1
    fig, axes = plt.subplots(panels, 1, figsize=(12, 3.2 * panels), sharex=True, squeeze=False)
    times = _times(series)

    ax = axes[0][0]
    ax.plot(times, series.values, lw=0.6, color="tab:blue", label="observed")
    if report.anomalies:
        ax.scatter(
            [a.timestamp for a in report.anomalies],
            [a.value for a in report.anomalies],
            color="tab:red", marker="x", s=36, zorder=5,
            label=f"anomalies ({len(report.anomalies)})",
        )
    ax.set_ylabel("value")
    ax.legend(loc="upper left", fontsize=8)
    ax.set_title(
        f"{report.series_id}: {len(report.anomalies)} anomalies "
        f"(beta={report.effect.beta_effective:g}, "
        f"gamma={report.effect.gamma_effective}, "
        f"{report.elapsed_seconds:.3f}s)"
    )

    if result is not None:
        ax = axes[1][0]
        rtimes = [series.time_at(int(k)) for k in result.residual_positions]
        ax.plot(rtimes, result.residual, lw=0.6, color="tab:gray", label="residual")
        if report.anomalies:
            ax.scatter(
                [a.timestamp for a in report.anomalies],
                [a.residual for a in report.anomalies],
                color="tab:red", marker="x", s=36, zorder=5,
            )
        ax.set_ylabel("residual")
        ax.legend(loc="upper left", fontsize=8)

    fig.autofmt_xdate()
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def plot_decomposition(
    path: str | Path, series: TimeSeries, result: DecompositionResult
) -> None:
    plt = _pyplot()
    rows = [
        ("observed", series.values, 1),
        ("trend", result.trend, result.trend_start),
        ("seasonal blend", result.dst_seasonal, result.trend_start),
        ("residual", result.residual, result.residual_start),
    ]
    if result.event is not None and result.event_start is not None:
        rows.insert(3, ("event", result.event, result.event_start))
    fig, axes = plt.subplots(len(rows), 1, figsize=(12, 2.1 * len(rows)), sharex=True)
    for ax, (name, arr, start) in zip(np.atleast_1d(axes), rows):
        ts = [series.time_at(start + i) for i in range(len(arr))]
        ax.plot(ts, arr, lw=0.6)
        ax.set_ylabel(name, fontsize=8)
    np.atleast_1d(axes)[0].set_title(
        f"{series.series_id}: decomposition "
        f"(beta={result.beta:g}, gamma={result.gamma})"
    )
    fig.autofmt_xdate()
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def plot_metrics(path: str | Path, rows: list[dict]) -> None:
    """Grouped bars of precision/recall/F1, one group per metrics row."""
    plt = _pyplot()
    rows = [r for r in rows if r.get("scope") == "series"] or list(rows)
    names = [str(r.get("series_id") or r.get("scope")) for r in rows]
    x = np.arange(len(rows))
    width = 0.27
    fig, ax = plt.subplots(figsize=(max(6, 0.9 * len(rows) + 3), 4))
    for offset, key in ((-width, "precision"), (0.0, "recall"), (width, "f1")):
        ax.bar(x + offset, [float(r[key]) for r in rows], width, label=key)
    ax.set_xticks(x)
    ax.set_xticklabels(names, rotation=45, ha="right", fontsize=8)
    ax.set_ylim(0, 1.05)
    ax.legend(fontsize=8)
    ax.set_title("evaluation metrics")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)

"""File formats: series CSV, decomposition trace CSV, anomaly-report JSONL,
label JSON, calendar JSON, and the evaluation metrics CSV.

All writers go through an atomic write-then-rename so a crashed run never
leaves a half-written artifact at the destination path.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np

from .calendar import CalendarConfig, Holiday
from .decompose import DecompositionResult
from .detector import AnomalyReport
from .errors import UsageError
from .evalbench import LabelSet
from .series import ONE_MINUTE, TimeSeries

REPORT_SCHEMA_VERSION = 1
LABELS_SCHEMA_VERSION = 1
CALENDAR_SCHEMA_VERSION = 1


def atomic_write_text(path: str | Path, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def format_timestamp(ts: datetime) -> str:
    """RFC 3339 with a Z suffix, second resolution when possible."""
    ts = ts.astimezone(timezone.utc)
    if ts.microsecond:
        return ts.isoformat().replace("+00:00", "Z")
    return ts.strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_timestamp(text: str) -> datetime:
    raw = text.strip()
    if raw.endswith(("Z", "z")):
        raw = raw[:-1] + "+00:00"
    ts = datetime.fromisoformat(raw)
    if ts.tzinfo is None:
        raise ValueError(f"timestamp {text!r} has no UTC offset")
    return ts.astimezone(timezone.utc)


# ---------------------------------------------------------------------------
# Series CSV: header `timestamp,value`; empty value field = missing
# ---------------------------------------------------------------------------


def write_series_csv(path: str | Path, series: TimeSeries) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["timestamp", "value"])
    for k in range(1, len(series) + 1):
        v = series.values[k - 1]
        writer.writerow([format_timestamp(series.time_at(k)), "" if math.isnan(v) else repr(float(v))])
    atomic_write_text(path, buf.getvalue())


def read_series_csv(path: str | Path, series_id: str | None = None) -> TimeSeries:
    """Parse a series CSV, validating a constant sample period with zero
    jitter; every parse error names the offending line."""
    path = Path(path)
    timestamps: list[datetime] = []
    values: list[float] = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise UsageError(f"{path}:1: empty file, expected header 'timestamp,value'")
        if [c.strip().lower() for c in header[:2]] != ["timestamp", "value"]:
            raise UsageError(
                f"{path}:1: expected header 'timestamp,value', got {','.join(header)!r}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 2:
                raise UsageError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
            try:
                ts = parse_timestamp(row[0])
            except ValueError as exc:
                raise UsageError(f"{path}:{lineno}: bad timestamp: {exc}") from exc
            cell = row[1].strip()
            if cell == "":
                value = float("nan")
            else:
                try:
                    value = float(cell)
                except ValueError as exc:
                    raise UsageError(
                        f"{path}:{lineno}: bad value {cell!r}: not a number"
                    ) from exc
                if math.isinf(value):
                    raise UsageError(f"{path}:{lineno}: infinite values are not allowed")
            timestamps.append(ts)
            values.append(value)
    if not timestamps:
        raise UsageError(f"{path}: no data rows")
    if len(timestamps) == 1:
        period = ONE_MINUTE
    else:
        period = timestamps[1] - timestamps[0]
        if period <= timedelta(0):
            raise UsageError(f"{path}:3: timestamps must be strictly increasing")
        for i in range(1, len(timestamps)):
            if timestamps[i] - timestamps[i - 1] != period:
                raise UsageError(
                    f"{path}:{i + 2}: irregular sample period: expected "
                    f"{period}, got {timestamps[i] - timestamps[i - 1]}"
                )
    return TimeSeries(
        values=np.asarray(values, dtype=np.float64),
        start_time=timestamps[0],
        sample_period=period,
        series_id=series_id or path.stem,
    )


# ---------------------------------------------------------------------------
# Decomposition trace CSV
# ---------------------------------------------------------------------------


def write_trace_csv(
    path: str | Path, series: TimeSeries, result: DecompositionResult
) -> None:
    """One row per series sample; component cells are empty outside each
    component's domain (and for missing values inside it)."""

    def cell(arr: np.ndarray | None, start: int | None, k: int) -> str:
        if arr is None or start is None:
            return ""
        i = k - start
        if not 0 <= i < arr.size:
            return ""
        v = arr[i]
        return "" if math.isnan(v) else repr(float(v))

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["index", "timestamp", "y", "trend", "seasonal", "seasonal_trend",
         "dst_seasonal", "event", "residual"]
    )
    t0 = result.trend_start
    for k in range(1, len(series) + 1):
        y = series.values[k - 1]
        writer.writerow(
            [
                k,
                format_timestamp(series.time_at(k)),
                "" if math.isnan(y) else repr(float(y)),
                cell(result.trend, t0, k),
                cell(result.seasonal, t0, k),
                cell(result.seasonal_trend, t0, k),
                cell(result.dst_seasonal, t0, k),
                cell(result.event, result.event_start, k),
                cell(result.residual, result.residual_start, k),
            ]
        )
    atomic_write_text(path, buf.getvalue())


# ---------------------------------------------------------------------------
# Anomaly reports: JSON Lines, one object per batch
# ---------------------------------------------------------------------------


def report_to_dict(report: AnomalyReport) -> dict:
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "series_id": report.series_id,
        "batch_start": format_timestamp(report.batch_span[0]),
        "batch_end": format_timestamp(report.batch_span[1]),
        "effect": {
            "beta_effective": report.effect.beta_effective,
            "gamma_effective": report.effect.gamma_effective,
            "reasons": list(report.effect.reasons),
        },
        "config": report.config_used.to_dict(),
        "elapsed_seconds": report.elapsed_seconds,
        "anomalies": [
            {
                "index": a.index,
                "timestamp": format_timestamp(a.timestamp),
                "value": a.value,
                "residual": a.residual,
                "zscore": a.zscore,
                "critical": a.critical,
            }
            for a in report.anomalies
        ],
    }


def write_reports_jsonl(path: str | Path, reports) -> None:
    lines = [json.dumps(report_to_dict(r), sort_keys=True) for r in reports]
    atomic_write_text(path, "\n".join(lines) + ("\n" if lines else ""))


def read_reports_jsonl(path: str | Path) -> list[dict]:
    path = Path(path)
    out = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise UsageError(f"{path}:{lineno}: bad report line: {exc}") from exc
            if not isinstance(obj, dict) or "series_id" not in obj:
                raise UsageError(f"{path}:{lineno}: not an anomaly report object")
            out.append(obj)
    return out


# ---------------------------------------------------------------------------
# Labels JSON
# ---------------------------------------------------------------------------


def write_labels_json(
    path: str | Path, labels: LabelSet, series: TimeSeries | None = None
) -> None:
    """Labels plus enough series metadata (start, period) for a later
    evaluation to interpret indices without re-reading the series."""
    doc: dict = {
        "schema_version": LABELS_SCHEMA_VERSION,
        "series_id": labels.series_id,
        "labels": list(labels.labels),
    }
    if series is not None:
        doc["start_time"] = format_timestamp(series.start_time)
        doc["sample_period_seconds"] = series.sample_period.total_seconds()
    atomic_write_text(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def read_labels_json(path: str | Path) -> tuple[LabelSet, datetime | None, timedelta | None]:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: bad labels file: {exc}") from exc
    if not isinstance(doc, dict) or "series_id" not in doc or "labels" not in doc:
        raise UsageError(f"{path}: labels file needs 'series_id' and 'labels'")
    label_set = LabelSet(series_id=doc["series_id"], labels=tuple(doc["labels"]))
    start = parse_timestamp(doc["start_time"]) if "start_time" in doc else None
    period = (
        timedelta(seconds=doc["sample_period_seconds"])
        if "sample_period_seconds" in doc
        else None
    )
    return label_set, start, period


# ---------------------------------------------------------------------------
# Calendar JSON (lossless round-trip)
# ---------------------------------------------------------------------------


def write_calendar_json(path: str | Path, calendar: CalendarConfig) -> None:
    doc = {
        "schema_version": CALENDAR_SCHEMA_VERSION,
        "dst_transitions": [format_timestamp(t) for t in calendar.dst_transitions],
        "dst_effect_duration_seconds": (
            calendar.dst_effect_duration.total_seconds()
            if calendar.dst_effect_duration is not None
            else None
        ),
        "holidays": [
            {"start": format_timestamp(h.start), "end": format_timestamp(h.end), "label": h.label}
            for h in calendar.holidays
        ],
    }
    atomic_write_text(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def read_calendar_json(path: str | Path) -> CalendarConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: bad calendar file: {exc}") from exc
    if not isinstance(doc, dict):
        raise UsageError(f"{path}: calendar file must hold a JSON object")
    try:
        transitions = tuple(parse_timestamp(t) for t in doc.get("dst_transitions", ()))
        holidays = tuple(
            Holiday(
                start=parse_timestamp(h["start"]),
                end=parse_timestamp(h["end"]),
                label=h.get("label", ""),
            )
            for h in doc.get("holidays", ())
        )
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"{path}: bad calendar entry: {exc}") from exc
    duration = doc.get("dst_effect_duration_seconds")
    return CalendarConfig(
        dst_transitions=transitions,
        holidays=holidays,
        dst_effect_duration=(
            timedelta(seconds=duration) if duration is not None else None
        ),
    )


def read_config_json(path: str | Path) -> dict:
    """A config file is a flat JSON object of DetectorConfig field overrides;
    validation happens when the overrides are applied."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: bad config file: {exc}") from exc
    if not isinstance(doc, dict):
        raise UsageError(f"{path}: config file must hold a JSON object")
    return doc


# ---------------------------------------------------------------------------
# Metrics CSV
# ---------------------------------------------------------------------------

METRICS_COLUMNS = [
    "scope", "series_id", "batches", "tp", "fp", "fn",
    "precision", "recall", "f1", "elapsed_seconds",
]


def write_metrics_csv(path: str | Path, rows: list[dict]) -> None:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=METRICS_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        out = dict(row)
        for key in ("precision", "recall", "f1", "elapsed_seconds"):
            if key in out and out[key] is not None and out[key] != "":
                out[key] = f"{float(out[key]):.6f}"
        writer.writerow(out)
    atomic_write_text(path, buf.getvalue())

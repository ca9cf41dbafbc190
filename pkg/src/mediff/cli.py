"""Command-line front end.

Subcommands: ``detect`` (series CSV -> anomaly report JSONL), ``decompose``
(series CSV -> columnar component trace), ``eval`` (report JSONL + labels
JSON -> metrics CSV), ``synth`` (labeled synthetic series + calendar).
Parameter precedence: built-in defaults, then the --config file, then
explicit command-line flags. With --plot, figures are rendered alongside
the delimited output files.
"""

from __future__ import annotations

import argparse
import re
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

from .config import AUTO, DetectorConfig
from .decompose import decompose
from .detector import detect_batch_with_trace, detect_stream
from .errors import MediffError, UsageError
from .evalbench import (
    DstShiftPlan,
    HolidayPlan,
    condense,
    match_and_score,
    plan_random_events,
    generate_synthetic,
)
from .io import (
    parse_timestamp,
    read_calendar_json,
    read_config_json,
    read_labels_json,
    read_reports_jsonl,
    read_series_csv,
    write_calendar_json,
    write_labels_json,
    write_metrics_csv,
    write_reports_jsonl,
    write_series_csv,
    write_trace_csv,
)
from .series import ONE_MINUTE, iter_batches

DEFAULT_BATCH_LEN = 40320
DEFAULT_STRIDE = 10080

_FLAG_TO_FIELD = {
    "beta": "beta",
    "gamma": "gamma",
    "alpha": "alpha",
    "max_outliers": "max_outliers",
    "window_trend": "w_mu",
    "window_seasonal": "w_s",
    "window_seasonal_trend": "w_s_hat",
    "window_event": "w_r",
    "season_len": "season_len",
    "zscore_mode": "zscore_mode",
}


@dataclass(frozen=True)
class RunManifest:
    """Everything one invocation needs, resolved from the parsed flags."""

    command: str
    input_paths: tuple[str, ...] = ()
    config_path: str | None = None
    calendar_path: str | None = None
    output_path: str = ""
    labels_paths: tuple[str, ...] = ()
    overrides: dict = field(default_factory=dict)
    plot: bool = False
    batch_len: int = DEFAULT_BATCH_LEN
    stride: int = DEFAULT_STRIDE
    seed: int = 0
    synth_options: dict = field(default_factory=dict)


def _max_outliers_arg(text: str):
    if text.strip().lower() == AUTO:
        return AUTO
    try:
        return int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"expected an integer or 'auto', got {text!r}"
        ) from exc


def _add_param_flags(sub: argparse.ArgumentParser) -> None:
    g = sub.add_argument_group("detector parameters")
    g.add_argument("--beta", type=float, help="DST seasonal blend weight in [0,1]")
    g.add_argument("--gamma", type=int, choices=(0, 1), help="event component switch")
    g.add_argument("--alpha", type=float, help="outlier-test significance level")
    g.add_argument("--max-outliers", type=_max_outliers_arg,
                   help="max outliers per batch, or 'auto' (2%% of the sample)")
    g.add_argument("--window-trend", type=int, help="trend window length (samples)")
    g.add_argument("--window-seasonal", type=int,
                   help="seasonal half-window (samples each side)")
    g.add_argument("--window-seasonal-trend", type=int,
                   help="seasonal-trend window length (samples)")
    g.add_argument("--window-event", type=int, help="event window length (samples)")
    g.add_argument("--season-len", type=int, help="samples per season")
    g.add_argument("--zscore-mode", choices=("robust_mad", "classic"),
                   help="outlier-test score variant")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mediff",
        description="Seasonal time-series anomaly detection via median "
                    "decomposition and a generalized ESD outlier test.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    detect = sub.add_parser("detect", help="detect anomalies in series CSV files")
    detect.add_argument("--input", nargs="+", required=True, metavar="CSV")
    detect.add_argument("--config", help="JSON file of parameter overrides")
    detect.add_argument("--calendar", help="JSON calendar of DST transitions and holidays")
    detect.add_argument("--output", default="mediff_report.jsonl")
    detect.add_argument("--batch-len", type=int, default=DEFAULT_BATCH_LEN)
    detect.add_argument("--stride", type=int, default=DEFAULT_STRIDE)
    detect.add_argument("--plot", action="store_true",
                        help="render a detection figure per series next to the output")
    _add_param_flags(detect)

    decomp = sub.add_parser("decompose", help="write the component trace for one series")
    decomp.add_argument("--input", nargs="+", required=True, metavar="CSV")
    decomp.add_argument("--config", help="JSON file of parameter overrides")
    decomp.add_argument("--output", default="mediff_trace.csv")
    decomp.add_argument("--plot", action="store_true",
                        help="render a component figure next to the output")
    _add_param_flags(decomp)

    evalp = sub.add_parser("eval", help="score report files against label files")
    evalp.add_argument("--input", nargs="+", required=True, metavar="REPORT_JSONL")
    evalp.add_argument("--labels", nargs="+", required=True, metavar="LABELS_JSON")
    evalp.add_argument("--output", default="mediff_metrics.csv")
    evalp.add_argument("--plot", action="store_true",
                       help="render a metrics figure next to the output")

    synth = sub.add_parser("synth", help="generate a labeled synthetic series")
    synth.add_argument("--output", default=".", help="output directory")
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--series-id", default=None)
    synth.add_argument("--weeks", type=int, default=4)
    synth.add_argument("--season-len", type=int, default=DEFAULT_STRIDE)
    synth.add_argument("--noise-std", type=float, default=1.0)
    synth.add_argument("--num-spikes", type=int, default=6)
    synth.add_argument("--num-level-shifts", type=int, default=2)
    synth.add_argument("--magnitude", type=float, default=8.0,
                       help="event magnitude in noise standard deviations")
    synth.add_argument("--dst-shift-offset", type=int, default=0,
                       help="season-pattern time shift in samples (0 = no shift), "
                            "starting at the final week")
    synth.add_argument("--with-holiday", action="store_true",
                       help="inject a calendar-known holiday dip")
    return parser


def manifest_from_args(args: argparse.Namespace) -> RunManifest:
    overrides = {}
    for flag, fieldname in _FLAG_TO_FIELD.items():
        value = getattr(args, flag, None)
        if value is not None:
            overrides[fieldname] = value
    synth_options = {}
    if args.command == "synth":
        synth_options = {
            "series_id": args.series_id,
            "weeks": args.weeks,
            "season_len": args.season_len,
            "noise_std": args.noise_std,
            "num_spikes": args.num_spikes,
            "num_level_shifts": args.num_level_shifts,
            "magnitude": args.magnitude,
            "dst_shift_offset": args.dst_shift_offset,
            "with_holiday": args.with_holiday,
        }
        # synth's --season-len shapes the generator, not a detector config
        overrides.pop("season_len", None)
    return RunManifest(
        command=args.command,
        input_paths=tuple(getattr(args, "input", ()) or ()),
        config_path=getattr(args, "config", None),
        calendar_path=getattr(args, "calendar", None),
        output_path=args.output,
        labels_paths=tuple(getattr(args, "labels", ()) or ()),
        overrides=overrides,
        plot=bool(getattr(args, "plot", False)),
        batch_len=getattr(args, "batch_len", DEFAULT_BATCH_LEN),
        stride=getattr(args, "stride", DEFAULT_STRIDE),
        seed=getattr(args, "seed", 0),
        synth_options=synth_options,
    )


def _resolve_config(manifest: RunManifest) -> DetectorConfig:
    config = DetectorConfig()
    if manifest.config_path:
        config = config.with_overrides(read_config_json(manifest.config_path))
    if manifest.overrides:
        config = config.with_overrides(manifest.overrides)
    return config


def _safe_name(series_id: str) -> str:
    return re.sub(r"[^\w.-]+", "_", series_id) or "series"


def _figure_path(output_path: str | Path, series_id: str | None = None) -> Path:
    out = Path(output_path)
    stem = out.stem or "mediff"
    name = f"{stem}.{_safe_name(series_id)}.png" if series_id else f"{stem}.png"
    return out.parent / name


def _run_detect(manifest: RunManifest) -> int:
    config = _resolve_config(manifest)
    calendar = (
        read_calendar_json(manifest.calendar_path) if manifest.calendar_path else None
    )
    all_reports = []
    for path in manifest.input_paths:
        series = read_series_csv(path)
        batches = list(iter_batches(series, manifest.batch_len, manifest.stride))
        if len(batches) == 1:
            report, trace = detect_batch_with_trace(batches[0], config, calendar)
            reports = [report]
        else:
            trace = None
            reports = detect_stream(batches, config, calendar)
        all_reports.extend(reports)
        if manifest.plot:
            from . import plotting

            merged = replace(
                reports[0],
                batch_span=(series.start_time, series.end_time),
                anomalies=tuple(a for r in reports for a in r.anomalies),
                elapsed_seconds=sum(r.elapsed_seconds for r in reports),
            )
            plotting.plot_detection(
                _figure_path(manifest.output_path, series.series_id),
                series,
                merged,
                trace,
            )
    write_reports_jsonl(manifest.output_path, all_reports)
    total = sum(len(r.anomalies) for r in all_reports)
    print(
        f"wrote {manifest.output_path}: {len(all_reports)} batch report(s), "
        f"{total} anomalies"
    )
    return 0


def _run_decompose(manifest: RunManifest) -> int:
    if len(manifest.input_paths) != 1:
        raise UsageError("decompose takes exactly one --input series")
    config = _resolve_config(manifest)
    series = read_series_csv(manifest.input_paths[0])
    result = decompose(series.values, config)
    write_trace_csv(manifest.output_path, series, result)
    if manifest.plot:
        from . import plotting

        plotting.plot_decomposition(
            _figure_path(manifest.output_path, series.series_id), series, result
        )
    print(
        f"wrote {manifest.output_path}: {len(series)} rows, residual domain "
        f"[{result.residual_start}, {len(series)}]"
    )
    return 0


def _run_eval(manifest: RunManifest) -> int:
    reports = []
    for path in manifest.input_paths:
        reports.extend(read_reports_jsonl(path))
    labels_by_series = {}
    for path in manifest.labels_paths:
        label_set, start, period = read_labels_json(path)
        labels_by_series[label_set.series_id] = (label_set, start, period)

    by_series: dict[str, list[dict]] = {}
    for rep in reports:
        by_series.setdefault(rep["series_id"], []).append(rep)

    rows = []
    batch_rows = []
    series_rows = []
    for series_id in sorted(by_series):
        if series_id not in labels_by_series:
            raise UsageError(f"no labels provided for series {series_id!r}")
        label_set, start, period = labels_by_series[series_id]
        period = period or ONE_MINUTE
        union: set[int] = set()
        elapsed = 0.0
        for rep in by_series[series_id]:
            indices = [a["index"] for a in rep.get("anomalies", ())]
            union.update(indices)
            elapsed += float(rep.get("elapsed_seconds", 0.0))
            if start is not None:
                b0 = parse_timestamp(rep["batch_start"])
                b1 = parse_timestamp(rep["batch_end"])
                in_batch = [
                    t for t in label_set.labels
                    if b0 <= start + (t - 1) * period <= b1
                ]
                r = match_and_score(condense(indices), in_batch, period)
                batch_rows.append(
                    {
                        "scope": "batch",
                        "series_id": series_id,
                        "batches": 1,
                        "tp": r.tp, "fp": r.fp, "fn": r.fn,
                        "precision": r.precision, "recall": r.recall, "f1": r.f1,
                        "elapsed_seconds": float(rep.get("elapsed_seconds", 0.0)),
                    }
                )
        r = match_and_score(condense(union), label_set, period)
        series_rows.append(
            {
                "scope": "series",
                "series_id": series_id,
                "batches": len(by_series[series_id]),
                "tp": r.tp, "fp": r.fp, "fn": r.fn,
                "precision": r.precision, "recall": r.recall, "f1": r.f1,
                "elapsed_seconds": elapsed,
            }
        )

    rows.extend(batch_rows)
    rows.extend(series_rows)

    def macro(name: str, parts: list[dict]) -> dict | None:
        if not parts:
            return None
        return {
            "scope": name,
            "series_id": "",
            "batches": sum(int(p["batches"]) for p in parts),
            "tp": sum(int(p["tp"]) for p in parts),
            "fp": sum(int(p["fp"]) for p in parts),
            "fn": sum(int(p["fn"]) for p in parts),
            "precision": sum(float(p["precision"]) for p in parts) / len(parts),
            "recall": sum(float(p["recall"]) for p in parts) / len(parts),
            "f1": sum(float(p["f1"]) for p in parts) / len(parts),
            "elapsed_seconds": sum(float(p["elapsed_seconds"]) for p in parts),
        }

    for agg in (macro("batch_macro", batch_rows), macro("series_macro", series_rows)):
        if agg is not None:
            rows.append(agg)
    if series_rows:
        tp = sum(int(p["tp"]) for p in series_rows)
        fp = sum(int(p["fp"]) for p in series_rows)
        fn = sum(int(p["fn"]) for p in series_rows)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        rows.append(
            {
                "scope": "pooled",
                "series_id": "",
                "batches": sum(int(p["batches"]) for p in series_rows),
                "tp": tp, "fp": fp, "fn": fn,
                "precision": precision, "recall": recall, "f1": f1,
                "elapsed_seconds": sum(float(p["elapsed_seconds"]) for p in series_rows),
            }
        )
    write_metrics_csv(manifest.output_path, rows)
    if manifest.plot:
        from . import plotting

        plotting.plot_metrics(_figure_path(manifest.output_path), rows)
    summary = next((r for r in rows if r["scope"] == "pooled"), None)
    if summary:
        print(
            f"wrote {manifest.output_path}: pooled precision "
            f"{summary['precision']:.4f} recall {summary['recall']:.4f} "
            f"f1 {summary['f1']:.4f}"
        )
    else:
        print(f"wrote {manifest.output_path}")
    return 0


def _run_synth(manifest: RunManifest) -> int:
    opts = manifest.synth_options
    weeks = opts["weeks"]
    season_len = opts["season_len"]
    dst = None
    if opts["dst_shift_offset"]:
        dst = DstShiftPlan(
            transition_index=(weeks - 1) * season_len + 1,
            offset=opts["dst_shift_offset"],
        )
    holiday = None
    if opts["with_holiday"]:
        holiday = HolidayPlan(
            start_index=season_len + season_len // 2,
            duration=max(120, season_len // 14),
        )
    spec = plan_random_events(
        manifest.seed,
        weeks=weeks,
        season_len=season_len,
        num_spikes=opts["num_spikes"],
        num_level_shifts=opts["num_level_shifts"],
        noise_std=opts["noise_std"],
        magnitude_sigmas=opts["magnitude"],
        dst_shift=dst,
        holiday=holiday,
        series_id=opts["series_id"],
    )
    series, labels, calendar = generate_synthetic(spec)
    outdir = Path(manifest.output_path)
    outdir.mkdir(parents=True, exist_ok=True)
    name = _safe_name(series.series_id)
    series_path = outdir / f"{name}.csv"
    labels_path = outdir / f"{name}.labels.json"
    calendar_path = outdir / f"{name}.calendar.json"
    write_series_csv(series_path, series)
    write_labels_json(labels_path, labels, series)
    write_calendar_json(calendar_path, calendar)
    print(f"wrote {series_path}, {labels_path}, {calendar_path}")
    return 0


_RUNNERS = {
    "detect": _run_detect,
    "decompose": _run_decompose,
    "eval": _run_eval,
    "synth": _run_synth,
}


def run(manifest: RunManifest) -> int:
    runner = _RUNNERS.get(manifest.command)
    if runner is None:
        raise UsageError(f"unknown command {manifest.command!r}")
    return runner(manifest)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(manifest_from_args(args))
    except UsageError as exc:
        print(f"mediff: error: {exc}", file=sys.stderr)
        return 2
    except MediffError as exc:
        print(f"mediff: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"mediff: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

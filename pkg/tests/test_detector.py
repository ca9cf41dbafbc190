from datetime import datetime, timedelta, timezone

import numpy as np
import pytest

from mediff import (
    CalendarConfig,
    DetectorConfig,
    Holiday,
    InsufficientDataError,
    TimeSeries,
    UsageError,
    decompose,
    detect_batch,
    detect_batch_with_trace,
    detect_stream,
    esd_test,
)

UTC = timezone.utc
START = datetime(2025, 1, 6, tzinfo=UTC)


def small_cfg(**kw):
    base = dict(season_len=144, w_mu=144, w_s=2, w_s_hat=10, w_r=12)
    base.update(kw)
    return DetectorConfig(**base)


def seasonal_noise(n, seed, amplitude=5.0, noise=1.0):
    rng = np.random.default_rng(seed)
    phase = np.arange(n) * 2 * np.pi / 144
    return amplitude * np.sin(phase) + rng.normal(scale=noise, size=n)


def make_series(values, **kw):
    return TimeSeries(values=np.asarray(values, dtype=np.float64), **kw)


class TestDetectBatch:
    def test_planted_spikes_are_flagged(self):
        y = seasonal_noise(576, seed=0)
        spikes = [200, 310, 455]  # 1-based
        for k in spikes:
            y[k - 1] += 8.0
        report = detect_batch(make_series(y), small_cfg())
        assert set(spikes) <= set(report.anomaly_indices)
        assert len(report.anomalies) <= len(spikes) + 2

    def test_pure_seasonal_zero_noise_is_quiet(self):
        # An exactly periodic input (one tiled period, w_s=0) decomposes to
        # an identically zero residual, and the test flags nothing.
        profile = 5.0 * np.sin(np.arange(144) * 2 * np.pi / 144)
        report = detect_batch(make_series(np.tile(profile, 4)), small_cfg(w_s=0))
        assert report.anomalies == ()

    def test_report_fields(self):
        y = seasonal_noise(576, seed=1)
        y[299] += 9.0
        series = make_series(y, series_id="web-7", start_time=START)
        cfg = small_cfg()
        report = detect_batch(series, cfg)
        assert report.series_id == "web-7"
        assert report.batch_span == (series.start_time, series.end_time)
        assert report.config_used is cfg
        assert report.elapsed_seconds > 0.0
        assert report.anomaly_indices == (300,)
        a = report.anomalies[0]
        assert a.timestamp == series.time_at(300)
        assert a.value == y[299]
        assert a.zscore > a.critical > 0.0
        assert a.residual == pytest.approx(9.0, abs=1.5)

    def test_anomaly_indices_ascending(self):
        y = seasonal_noise(576, seed=2)
        for k in (180, 420, 300):
            y[k - 1] -= 8.0
        report = detect_batch(make_series(y), small_cfg())
        idx = report.anomaly_indices
        assert list(idx) == sorted(idx)

    def test_no_calendar_means_plain_seasonal_no_event(self):
        y = seasonal_noise(576, seed=3)
        cfg = small_cfg(beta=0.4, gamma=1)
        report, result = detect_batch_with_trace(make_series(y), cfg)
        assert report.effect.beta_effective == 1.0
        assert report.effect.gamma_effective == 0
        assert report.effect.reasons == ()
        assert result.event is None
        assert result.residual_start == 144

    def test_matches_manual_pipeline(self):
        y = seasonal_noise(576, seed=4)
        y[249] += 8.0
        y[400] -= 8.0
        cfg = small_cfg()
        report = detect_batch(make_series(y), cfg)

        result = decompose(y, cfg, beta=1.0, gamma=0)
        m = cfg.resolve_max_outliers(int(np.count_nonzero(~np.isnan(result.residual))))
        outcome = esd_test(result.residual, m=m, alpha=cfg.alpha, mode=cfg.zscore_mode)
        expected = tuple(result.residual_start + pos - 1 for pos in outcome.flagged)
        assert report.anomaly_indices == expected

    def test_dst_transition_in_span_applies_blend(self):
        y = seasonal_noise(576, seed=5)
        series = make_series(y, start_time=START)
        cal = CalendarConfig(dst_transitions=(series.time_at(400),))
        cfg = small_cfg(beta=0.3)
        report, result = detect_batch_with_trace(series, cfg, cal)
        assert report.effect.beta_effective == 0.3
        assert any("dst" in r for r in report.effect.reasons)
        assert result.beta == 0.3

    def test_stale_dst_transition_expires(self):
        y = seasonal_noise(576, seed=6)
        series = make_series(y, start_time=START)
        cal = CalendarConfig(
            dst_transitions=(series.start_time - timedelta(days=30),),
            dst_effect_duration=timedelta(days=1),
        )
        report = detect_batch(series, small_cfg(beta=0.3), cal)
        assert report.effect.beta_effective == 1.0

    def test_holiday_in_span_enables_event_removal(self):
        y = seasonal_noise(576, seed=7)
        series = make_series(y, start_time=START)
        cal = CalendarConfig(
            holidays=(
                Holiday(series.time_at(200), series.time_at(260), label="maintenance"),
            )
        )
        report, result = detect_batch_with_trace(series, small_cfg(gamma=1), cal)
        assert report.effect.gamma_effective == 1
        assert any("maintenance" in r for r in report.effect.reasons)
        assert result.event is not None
        assert result.residual_start == 144 + 12 - 1

    def test_all_missing_batch_rejected(self):
        with pytest.raises(InsufficientDataError):
            detect_batch(make_series(np.full(576, np.nan)), small_cfg())

    def test_missing_values_tolerated(self):
        y = seasonal_noise(576, seed=8)
        y[299] += 8.0
        y[[10, 170, 350, 500]] = np.nan
        report = detect_batch(make_series(y), small_cfg())
        assert 300 in report.anomaly_indices

    def test_deterministic(self):
        y = seasonal_noise(576, seed=9)
        y[249] += 8.0
        a = detect_batch(make_series(y), small_cfg())
        b = detect_batch(make_series(y), small_cfg())
        assert a.anomaly_indices == b.anomaly_indices
        assert [x.zscore for x in a.anomalies] == [x.zscore for x in b.anomalies]

    def test_plain_array_input(self):
        y = seasonal_noise(576, seed=10)
        y[249] += 8.0
        report = detect_batch(y, small_cfg())
        assert 250 in report.anomaly_indices

    def test_defaults_on_weekly_scale(self):
        # Four weeks at one-minute sampling under the stock configuration:
        # every planted 8-sigma spike is recovered with at most a couple of
        # extraneous points, in well under the latency budget.
        n = 4 * 10080
        rng = np.random.default_rng(2025)
        u = (np.arange(n) % 10080) / 10080
        y = 100.0 + 20.0 * np.sin(2 * np.pi * 7 * u) + rng.normal(size=n)
        spikes = [11000, 13500, 16000, 18500, 21000, 23500, 26000, 28500, 31000, 36000]
        for k in spikes:
            y[k - 1] += 8.0
        report = detect_batch(make_series(y))
        assert set(spikes) <= set(report.anomaly_indices)
        assert len(report.anomalies) <= len(spikes) + 2
        assert report.elapsed_seconds < 2.0


class TestDetectStream:
    def build(self, seed=11):
        y = seasonal_noise(720, seed=seed)
        y[359], y[599] = y[359] + 9.0, y[599] + 9.0  # positions 360 and 600
        return make_series(y, start_time=START)

    def test_disjoint_batches_report_independently(self):
        series = self.build()
        batches = [series.slice(1, 400), series.slice(401, 720)]
        reports = detect_stream(batches, small_cfg())
        assert len(reports) == 2
        assert 360 in reports[0].anomaly_indices
        assert 200 in reports[1].anomaly_indices  # global 600
        assert reports[0].batch_span[1] < reports[1].batch_span[0]

    def test_overlapping_batches_deduplicate(self):
        series = self.build()
        batches = [series.slice(1, 400), series.slice(200, 720)]
        reports = detect_stream(batches, small_cfg())
        stamps = [a.timestamp for r in reports for a in r.anomalies]
        assert len(stamps) == len(set(stamps))
        assert series.time_at(360) in {a.timestamp for a in reports[0].anomalies}
        assert series.time_at(360) not in {a.timestamp for a in reports[1].anomalies}
        assert series.time_at(600) in {a.timestamp for a in reports[1].anomalies}

    def test_empty_sequence(self):
        assert detect_stream([], small_cfg()) == []

    def test_mixed_sample_periods_rejected(self):
        a = make_series(np.zeros(200), sample_period=timedelta(minutes=1))
        b = make_series(np.zeros(200), sample_period=timedelta(minutes=5))
        with pytest.raises(UsageError):
            detect_stream([a, b], small_cfg(season_len=48, w_mu=48))

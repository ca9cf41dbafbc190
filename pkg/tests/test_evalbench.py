from datetime import datetime, timedelta, timezone

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mediff import (
    DstShiftPlan,
    EvalResult,
    HolidayPlan,
    LabelSet,
    LevelShiftPlan,
    SpikePlan,
    SyntheticSpec,
    UsageError,
    condense,
    generate_synthetic,
    match_and_score,
    plan_random_events,
)

FIVE_MIN = timedelta(minutes=5)


class TestLabelSet:
    def test_holds_sorted_labels(self):
        ls = LabelSet("s", (5, 9, 100))
        assert ls.labels == (5, 9, 100)

    def test_empty_is_fine(self):
        assert LabelSet("s").labels == ()

    @pytest.mark.parametrize("labels", [(5, 5), (9, 3), (1, 2, 2)])
    def test_non_increasing_rejected(self, labels):
        with pytest.raises(UsageError):
            LabelSet("s", labels)

    def test_labels_are_one_based(self):
        with pytest.raises(UsageError):
            LabelSet("s", (0, 4))

    def test_numpy_ints_coerced(self):
        ls = LabelSet("s", tuple(np.array([3, 8])))
        assert ls.labels == (3, 8)
        assert all(isinstance(v, int) for v in ls.labels)


class TestEvalResult:
    def test_metric_arithmetic(self):
        r = EvalResult(tp=2, fp=1, fn=2)
        assert r.precision == pytest.approx(2 / 3)
        assert r.recall == pytest.approx(1 / 2)
        assert r.f1 == pytest.approx(4 / 7)

    def test_zero_denominators(self):
        r = EvalResult(tp=0, fp=0, fn=0)
        assert r.precision == r.recall == r.f1 == 0.0

    def test_addition_sums_counts(self):
        total = EvalResult(1, 2, 3) + EvalResult(4, 5, 6)
        assert (total.tp, total.fp, total.fn) == (5, 7, 9)


class TestCondense:
    @pytest.mark.parametrize(
        "detections,expected",
        [
            ([100, 101, 102, 500], [100, 500]),
            ([], []),
            ([7], [7]),
            ([1, 2, 3, 4, 5], [1]),
            ([10, 12, 13, 14, 20], [10, 12, 20]),
        ],
    )
    def test_examples(self, detections, expected):
        assert condense(detections) == expected

    def test_idempotent(self):
        x = [3, 4, 5, 9, 14, 15, 40]
        assert condense(condense(x)) == condense(x)

    @given(st.sets(st.integers(min_value=0, max_value=500), max_size=60))
    def test_properties(self, dets):
        out = condense(dets)
        assert out == sorted(out)
        assert set(out) <= dets
        # no two kept indices are consecutive, and every detection belongs
        # to a run that starts at some kept index
        assert all(b - a >= 2 for a, b in zip(out, out[1:]))
        for d in dets:
            assert any(o <= d and set(range(o, d + 1)) <= dets for o in out)


class TestMatchAndScore:
    def test_detection_within_delay_is_tp(self):
        r = match_and_score([1007], LabelSet("s", (1000,)))
        assert (r.tp, r.fp, r.fn) == (1, 0, 0)

    def test_detection_past_delay_is_fp_plus_fn(self):
        r = match_and_score([1015], LabelSet("s", (1000,)))
        assert (r.tp, r.fp, r.fn) == (0, 1, 1)

    def test_window_endpoints_inclusive(self):
        assert match_and_score([1000], [1000]).tp == 1
        assert match_and_score([1010], [1000]).tp == 1
        assert match_and_score([1011], [1000]).tp == 0

    def test_early_detection_is_fp(self):
        r = match_and_score([995], LabelSet("s", (1000,)))
        assert (r.tp, r.fp, r.fn) == (0, 1, 1)

    def test_one_to_one_matching(self):
        r = match_and_score([100, 105], [100])
        assert (r.tp, r.fp, r.fn) == (1, 1, 0)

    def test_greedy_earliest_first(self):
        # 104 takes label 100; 106 still matches 105
        r = match_and_score([104, 106], [100, 105])
        assert (r.tp, r.fp, r.fn) == (2, 0, 0)

    def test_sample_period_scales_window(self):
        assert match_and_score([102], [100], sample_period=FIVE_MIN).tp == 1
        assert match_and_score([103], [100], sample_period=FIVE_MIN).tp == 0

    def test_zero_delay_budget_means_exact_hits(self):
        r = match_and_score([100, 205], [100, 200], delay_budget=timedelta(0))
        assert (r.tp, r.fp, r.fn) == (1, 1, 1)

    def test_perfect_detection(self):
        labels = LabelSet("s", (10, 400, 900))
        r = match_and_score(list(labels.labels), labels)
        assert r.precision == r.recall == r.f1 == 1.0

    def test_no_detections(self):
        r = match_and_score([], LabelSet("s", (10, 20)))
        assert (r.tp, r.fp, r.fn) == (0, 0, 2)

    def test_bad_sample_period_rejected(self):
        with pytest.raises(UsageError):
            match_and_score([1], [1], sample_period=timedelta(0))

    @given(
        dets=st.sets(st.integers(min_value=1, max_value=3000), max_size=40),
        labels=st.sets(st.integers(min_value=1, max_value=3000), max_size=40),
        shift=st.integers(min_value=0, max_value=10_000),
    )
    def test_translation_invariance_and_count_conservation(self, dets, labels, shift):
        dets = condense(dets)
        labels = sorted(labels)
        r = match_and_score(dets, labels)
        assert r.tp + r.fp == len(dets)
        assert r.tp + r.fn == len(labels)
        moved = match_and_score([d + shift for d in dets], [t + shift for t in labels])
        assert (r.tp, r.fp, r.fn) == (moved.tp, moved.fp, moved.fn)


def quiet_spec(**kw):
    base = dict(
        weeks=2,
        season_len=1440,
        base_level=0.0,
        trend_slope=0.0,
        noise_std=0.0,
        seed=5,
    )
    base.update(kw)
    return SyntheticSpec(**base)


class TestGenerateSynthetic:
    def test_quiet_series_is_exactly_periodic_with_empty_labels(self):
        series, labels, calendar = generate_synthetic(quiet_spec())
        assert labels.labels == ()
        assert calendar.is_empty
        v = series.values
        assert np.array_equal(v[:1440], v[1440:2880])

    def test_spike_label_by_construction(self):
        spec = SyntheticSpec(spikes=(SpikePlan(index=20000, magnitude_sigmas=8.0),))
        series, labels, _ = generate_synthetic(spec)
        assert labels.labels == (20000,)
        assert len(series) == 40320

    def test_level_shift_label_is_first_index_only(self):
        spec = SyntheticSpec(
            level_shifts=(LevelShiftPlan(index=30000, duration=120),)
        )
        _, labels, _ = generate_synthetic(spec)
        assert labels.labels == (30000,)

    def test_labels_sorted_across_event_kinds(self):
        spec = SyntheticSpec(
            spikes=(SpikePlan(index=25000), SpikePlan(index=12000)),
            level_shifts=(LevelShiftPlan(index=18000, duration=30),),
        )
        _, labels, _ = generate_synthetic(spec)
        assert labels.labels == (12000, 18000, 25000)

    def test_seed_determinism_is_bit_exact(self):
        spec = SyntheticSpec(
            noise_std=1.5,
            spikes=(SpikePlan(index=15000),),
            level_shifts=(LevelShiftPlan(index=22000, duration=10),),
            seed=99,
        )
        a, la, ca = generate_synthetic(spec)
        b, lb, cb = generate_synthetic(spec)
        assert np.array_equal(a.values, b.values)
        assert la == lb and ca == cb

    def test_different_seeds_differ(self):
        a, _, _ = generate_synthetic(quiet_spec(noise_std=1.0, seed=1))
        b, _, _ = generate_synthetic(quiet_spec(noise_std=1.0, seed=2))
        assert not np.array_equal(a.values, b.values)

    def test_spike_raises_values_by_sigmas(self):
        base, _, _ = generate_synthetic(quiet_spec(noise_std=2.0))
        spiked, _, _ = generate_synthetic(
            quiet_spec(noise_std=2.0, spikes=(SpikePlan(index=2000, magnitude_sigmas=8.0),))
        )
        diff = spiked.values - base.values
        assert diff[1999] == pytest.approx(16.0)
        assert np.count_nonzero(diff) == 1

    def test_holiday_dips_without_label(self):
        base, _, _ = generate_synthetic(quiet_spec(noise_std=1.0))
        spec = quiet_spec(
            noise_std=1.0,
            holiday=HolidayPlan(start_index=2001, duration=50, magnitude_sigmas=10.0),
        )
        series, labels, calendar = generate_synthetic(spec)
        assert labels.labels == ()
        diff = series.values - base.values
        np.testing.assert_allclose(diff[2000:2050], -10.0)
        assert np.count_nonzero(diff) == 50
        assert len(calendar.holidays) == 1
        h = calendar.holidays[0]
        assert h.start == series.time_at(2001)
        assert h.end == series.time_at(2050)
        assert h.label == "holiday"

    def test_dst_shift_delays_the_profile(self):
        plain, _, _ = generate_synthetic(quiet_spec())
        t0 = 1440 + 300  # 1-based transition index
        shifted, labels, calendar = generate_synthetic(
            quiet_spec(dst_shift=DstShiftPlan(transition_index=t0, offset=60))
        )
        assert labels.labels == ()
        assert calendar.dst_transitions == (
            datetime(2025, 1, 6, tzinfo=timezone.utc) + (t0 - 1) * timedelta(minutes=1)
        ,)
        # untouched before the transition, time-shifted after it
        assert np.array_equal(shifted.values[: t0 - 1], plain.values[: t0 - 1])
        after = np.arange(t0 - 1, 2880)
        assert np.array_equal(shifted.values[after], plain.values[after - 60])

    def test_metadata_propagates(self):
        spec = quiet_spec(series_id="cpu-42")
        series, labels, _ = generate_synthetic(spec)
        assert series.series_id == labels.series_id == "cpu-42"
        assert series.sample_period == timedelta(minutes=1)
        assert len(series) == spec.length

    @pytest.mark.parametrize(
        "kw",
        [
            dict(spikes=(SpikePlan(index=0),)),
            dict(spikes=(SpikePlan(index=2881),)),
            dict(level_shifts=(LevelShiftPlan(index=2875, duration=10),)),
            dict(level_shifts=(LevelShiftPlan(index=100, duration=0),)),
            dict(holiday=HolidayPlan(start_index=2879, duration=5)),
            dict(dst_shift=DstShiftPlan(transition_index=3000)),
        ],
    )
    def test_out_of_range_plans_rejected(self, kw):
        with pytest.raises(UsageError):
            generate_synthetic(quiet_spec(**kw))

    def test_colliding_events_rejected(self):
        with pytest.raises(UsageError):
            generate_synthetic(
                quiet_spec(
                    spikes=(SpikePlan(index=2000),),
                    level_shifts=(LevelShiftPlan(index=2000, duration=5),),
                )
            )

    def test_single_week_rejected(self):
        with pytest.raises(UsageError):
            generate_synthetic(SyntheticSpec(weeks=1))


class TestPlanRandomEvents:
    def test_deterministic(self):
        assert plan_random_events(3) == plan_random_events(3)

    def test_counts_and_kinds(self):
        spec = plan_random_events(7, num_spikes=5, num_level_shifts=3)
        assert len(spec.spikes) == 5
        assert len(spec.level_shifts) == 3
        assert spec.series_id == "synthetic-7"

    def test_positions_spaced_and_in_bounds(self):
        spec = plan_random_events(11, weeks=4, season_len=10080)
        pos = [s.index for s in spec.spikes] + [s.index for s in spec.level_shifts]
        lo, hi = 10080 + 1260, 4 * 10080 - 200
        assert all(lo <= p <= hi for p in pos)
        spread = sorted(pos)
        assert all(b - a >= 150 for a, b in zip(spread, spread[1:]))

    def test_magnitudes_and_durations(self):
        spec = plan_random_events(13, magnitude_sigmas=8.0)
        assert all(abs(s.magnitude_sigmas) == 8.0 for s in spec.spikes)
        assert all(s.magnitude_sigmas == 8.0 for s in spec.level_shifts)
        assert all(5 <= s.duration <= 15 for s in spec.level_shifts)

    def test_generated_plan_feeds_generator(self):
        series, labels, _ = generate_synthetic(plan_random_events(17))
        assert len(labels.labels) == 8
        assert len(series) == 40320

    def test_too_small_series_rejected(self):
        with pytest.raises(UsageError):
            plan_random_events(1, weeks=2, season_len=300)

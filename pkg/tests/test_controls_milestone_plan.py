"""Milestone trend analysis and plan consistency checking."""

from datetime import timedelta

import pytest

from cockpit.catena.evaluate import EvaluationError
from cockpit.controls import milestone_trend, plan_consistency
from cockpit.controls.plan_checks import VIOLATION_KINDS
from cockpit.interchange import format_timestamp, parse_timestamp

DAY = timedelta(days=1)
T0 = parse_timestamp("2026-01-05")


def _snapshot(report_day: int, predicted_day: int, mid="ms-1"):
    return (T0 + report_day * DAY,
            [{"id": mid, "is-milestone": 1, "end": format_timestamp(T0 + predicted_day * DAY)}])


def test_constant_predictions_stable():
    snapshots = [_snapshot(d, 100) for d in (0, 7, 14, 21)]
    [trend] = milestone_trend(snapshots)
    assert trend.classification == "stable"
    assert trend.slope == pytest.approx(0.0)
    assert not trend.low_confidence


def test_two_day_weekly_slip_is_delayed():
    snapshots = [_snapshot(7 * k, 100 + 2 * k) for k in range(5)]
    [trend] = milestone_trend(snapshots)
    assert trend.classification == "delayed"
    assert trend.slope == pytest.approx(2 / 7)


def test_improving_predictions_accelerated():
    snapshots = [_snapshot(7 * k, 100 - 2 * k) for k in range(5)]
    [trend] = milestone_trend(snapshots)
    assert trend.classification == "accelerated"


def test_single_snapshot_low_confidence_stable():
    [trend] = milestone_trend([_snapshot(0, 100)])
    assert trend.classification == "stable"
    assert trend.low_confidence


def test_missing_milestone_recorded_as_gap():
    snapshots = [_snapshot(0, 100), (T0 + 7 * DAY, [{"id": "other", "is-milestone": 1,
                                                     "end": format_timestamp(T0)}]),
                 _snapshot(14, 100)]
    [trend] = milestone_trend(snapshots, ["ms-1"])
    assert len(trend.reports) == 2
    assert trend.gaps == [T0 + 7 * DAY]
    assert trend.classification == "stable"


def test_translation_invariance():
    base = [_snapshot(7 * k, 100 + 2 * k) for k in range(5)]
    shifted = [(r, [{**row, "end": format_timestamp(parse_timestamp(row["end"]) + 365 * DAY)}
                    for row in rows]) for r, rows in base]
    assert milestone_trend(base)[0].classification == \
        milestone_trend(shifted)[0].classification == "delayed"
    stable = [_snapshot(7 * k, 100) for k in range(4)]
    shifted_stable = [(r, [{**row, "end": format_timestamp(parse_timestamp(row["end"]) + 500 * DAY)}
                           for row in rows]) for r, rows in stable]
    assert milestone_trend(shifted_stable)[0].classification == "stable"


def test_threshold_is_configurable():
    snapshots = [_snapshot(7 * k, 100 + 2 * k) for k in range(5)]
    [strict] = milestone_trend(snapshots, slope_threshold=0.01)
    [lax] = milestone_trend(snapshots, slope_threshold=5.0)
    assert strict.classification == "delayed"
    assert lax.classification == "stable"


def test_no_snapshots_not_computable():
    with pytest.raises(EvaluationError):
        milestone_trend([])


def _day(offset: int) -> str:
    return format_timestamp(T0 + offset * DAY)


def _well_formed_plan():
    return [
        {"id": "root", "start": _day(0), "end": _day(100), "effort-baseline-hours": 100.0},
        {"id": "child", "parent-id": "root", "start": _day(10), "end": _day(50),
         "effort-baseline-hours": 40.0},
        {"id": "ms", "parent-id": "root", "start": _day(50), "end": _day(50), "is-milestone": 1},
    ]


def test_well_formed_plan_no_violations():
    assert plan_consistency(_well_formed_plan()) == []


def test_child_escaping_parent_window():
    plan = _well_formed_plan()
    plan[1]["end"] = _day(120)
    violations = plan_consistency(plan)
    assert [v.kind for v in violations] == ["child-outside-parent"]
    assert violations[0].subject == "child"


def test_end_before_start():
    plan = _well_formed_plan()
    plan[0]["end"] = _day(-5)
    kinds = {v.kind for v in plan_consistency(plan)}
    # the root window inverted also strands the children outside it
    assert "end-before-start" in kinds


def test_negative_baseline():
    plan = _well_formed_plan()
    plan[1]["effort-baseline-hours"] = -4.0
    violations = [v for v in plan_consistency(plan) if v.kind == "negative-baseline"]
    assert violations and violations[0].subject == "child"


def test_parent_cycle_reported_once():
    plan = [
        {"id": "a", "parent-id": "b", "start": _day(0), "end": _day(10)},
        {"id": "b", "parent-id": "a", "start": _day(0), "end": _day(10)},
    ]
    violations = plan_consistency(plan)
    assert [v.kind for v in violations] == ["parent-cycle"]
    assert "a" in violations[0].message and "b" in violations[0].message


def test_milestone_missing_date():
    plan = _well_formed_plan() + [{"id": "ms-undated", "parent-id": "root", "is-milestone": 1}]
    violations = [v for v in plan_consistency(plan) if v.kind == "milestone-missing-date"]
    assert violations and violations[0].subject == "ms-undated"


def test_two_seeded_violations_of_distinct_kinds_exactly_reported():
    plan = _well_formed_plan()
    plan[1]["effort-baseline-hours"] = -1.0
    plan.append({"id": "ms2", "parent-id": "root", "is-milestone": 1})
    violations = plan_consistency(plan)
    assert sorted(v.kind for v in violations) == ["milestone-missing-date", "negative-baseline"]


def test_all_five_kinds_detectable_in_one_plan():
    plan = [
        # seeded: end before start, on a root so no window side effects
        {"id": "z-inverted", "start": _day(10), "end": _day(5)},
        # seeded: negative baseline on an otherwise clean root
        {"id": "z-negative", "start": _day(0), "end": _day(10), "effort-baseline-hours": -3.0},
        # clean parent with a child escaping its window
        {"id": "parent", "start": _day(0), "end": _day(20)},
        {"id": "child", "parent-id": "parent", "start": _day(0), "end": _day(30)},
        # a two-member parent cycle
        {"id": "c1", "parent-id": "c2"},
        {"id": "c2", "parent-id": "c1"},
        # undated milestone
        {"id": "ms", "is-milestone": 1},
    ]
    violations = plan_consistency(plan)
    assert sorted(v.kind for v in violations) == sorted(VIOLATION_KINDS)

"""Effort aggregation and tolerance-range checking."""

import math

import pytest
from hypothesis import given, strategies as st

from cockpit.catena.evaluate import EvaluationError
from cockpit.controls import aggregate_effort, tolerance_range_check
from cockpit.status import Status

PLAN = [
    {"id": "root"},
    {"id": "parent", "parent-id": "root"},
    {"id": "leaf-a", "parent-id": "parent"},
    {"id": "leaf-b", "parent-id": "parent"},
    {"id": "leaf-c", "parent-id": "root"},
]


def _rec(person, activity, date, hours):
    return {"person-id": person, "activity-id": activity, "date": date, "hours": hours}


def test_two_persons_same_day_sum():
    records = [_rec("p1", "leaf-a", "2026-01-09", 3.0), _rec("p2", "leaf-a", "2026-01-09", 4.0)]
    result = aggregate_effort(records, PLAN)
    assert result.series["leaf-a"] == [("2026-01-09", 7.0)]
    assert result.total("leaf-a") == 7.0


def test_zero_records_all_zero():
    result = aggregate_effort([], PLAN)
    assert set(result.series) == {"root", "parent", "leaf-a", "leaf-b", "leaf-c"}
    assert all(result.total(a) == 0.0 for a in result.series)


def test_hierarchy_roll_up():
    records = [_rec("p1", "leaf-a", "2026-01-09", 5.0), _rec("p2", "leaf-b", "2026-01-12", 6.0)]
    result = aggregate_effort(records, PLAN)
    assert result.total("parent") == 11.0
    assert result.total("root") == 11.0
    # parent series is cumulative across both dates
    assert result.series["parent"] == [("2026-01-09", 5.0), ("2026-01-12", 11.0)]


def test_unknown_activity_rejected_but_computation_continues():
    records = [_rec("p1", "leaf-a", "2026-01-09", 5.0), _rec("p1", "ghost", "2026-01-09", 2.0)]
    result = aggregate_effort(records, PLAN)
    assert result.total("leaf-a") == 5.0
    assert len(result.rejected) == 1
    assert result.rejected[0]["reason"] == "unknown activity 'ghost'"


def test_cumulative_is_non_decreasing():
    records = [_rec("p1", "leaf-a", f"2026-01-{d:02d}", 2.0) for d in range(9, 20)]
    result = aggregate_effort(records, PLAN)
    values = [v for _, v in result.series["leaf-a"]]
    assert values == sorted(values)


@given(st.lists(
    st.tuples(st.integers(0, 4), st.sampled_from(["leaf-a", "leaf-b", "leaf-c"]),
              st.integers(5, 28), st.integers(1, 32)),
    max_size=40))
def test_conservation_on_random_logs(raw):
    """Total person hours == sum of leaf totals == root roll-up, exact.

    Hours are quarter-hour multiples, so every sum is an exact binary
    float and equality is exact, not approximate.
    """
    records = [_rec(f"p{p}", activity, f"2026-01-{day:02d}", quarter * 0.25)
               for p, activity, day, quarter in raw]
    result = aggregate_effort(records, PLAN)
    person_total = math.fsum(r["hours"] for r in records)
    leaf_total = math.fsum(result.total(a) for a in ("leaf-a", "leaf-b", "leaf-c"))
    assert person_total == leaf_total
    assert result.total("root") == person_total


def _series(*points):
    return list(points)


def test_tolerance_identity_all_green():
    actual = _series(("d1", 50.0), ("d2", 100.0))
    baseline = _series(("d1", 50.0), ("d2", 100.0))
    result = tolerance_range_check(actual, baseline, lower=0.0, upper=0.0, subject="a")
    assert all(p.deviation == 0.0 and p.status is Status.GREEN for p in result.points)


def test_tolerance_yellow_within_double_band():
    # 120 vs baseline 100 with upper 0.1: outside [90, 110], inside [80, 120]
    result = tolerance_range_check(_series(("d1", 120.0)), _series(("d1", 100.0)),
                                   lower=0.1, upper=0.1)
    [point] = result.points
    assert point.deviation == 20.0
    assert point.status is Status.YELLOW


def test_tolerance_red_beyond_double_band():
    result = tolerance_range_check(_series(("d1", 130.0)), _series(("d1", 100.0)),
                                   lower=0.1, upper=0.1)
    assert result.points[0].status is Status.RED


def test_tolerance_zero_band_flags_any_overrun_red():
    result = tolerance_range_check(_series(("d1", 100.5)), _series(("d1", 100.0)),
                                   lower=0.0, upper=0.0)
    [point] = result.points
    assert point.status is Status.RED
    assert point.deviation == 0.5


def test_tolerance_carry_forward_alignment():
    actual = _series(("2026-01-02", 40.0), ("2026-01-04", 80.0))
    baseline = _series(("2026-01-01", 100.0))
    result = tolerance_range_check(actual, baseline, lower=1.0, upper=0.0)
    # the baseline anchor has no actual yet and is skipped; afterwards the
    # baseline value carries forward to every actual timestamp
    stamps = [p.timestamp for p in result.points]
    assert stamps == ["2026-01-02", "2026-01-04"]
    assert all(p.baseline == 100.0 for p in result.points)


def test_tolerance_empty_baseline_not_computable():
    with pytest.raises(EvaluationError):
        tolerance_range_check(_series(("d1", 1.0)), [], lower=0.0, upper=0.0)


@given(st.lists(st.floats(0, 500), min_size=1, max_size=10), st.floats(1, 400),
       st.floats(0, 1), st.floats(0, 1))
def test_deviation_nonnegative_and_zero_iff_under_baseline(actuals, baseline, lower, upper):
    actual = [(f"d{i:02d}", a) for i, a in enumerate(actuals)]
    result = tolerance_range_check(actual, [("d00", baseline)], lower=lower, upper=upper)
    for point in result.points:
        assert point.deviation >= 0.0
        assert (point.deviation == 0.0) == (point.actual <= point.baseline)


@given(st.floats(0, 2), st.floats(0, 1), st.floats(0, 1), st.floats(100, 200))
def test_overrun_severity_monotone_in_actual(extra, lower, upper, baseline):
    """For actuals at or above the baseline, severity never decreases as
    the actual grows (the overrun side of the band)."""
    a1 = baseline * (1 + extra)
    a2 = a1 * 1.5
    s1 = tolerance_range_check([("d", a1)], [("d", baseline)], lower, upper).points[0].status
    s2 = tolerance_range_check([("d", a2)], [("d", baseline)], lower, upper).points[0].status
    assert s2.severity >= s1.severity

"""Earned value analysis against an independent brute-force oracle."""

import random
from datetime import timedelta

import pytest

from cockpit.controls import earned_value, leaf_activities, planned_fraction
from cockpit.interchange import format_timestamp, parse_timestamp

DAY = timedelta(days=1)
T0 = parse_timestamp("2026-01-05")


def _iso(dt):
    return format_timestamp(dt)


def _activity(aid, start_day, duration_days, baseline, parent=None):
    row = {"id": aid, "start": _iso(T0 + start_day * DAY),
           "end": _iso(T0 + (start_day + duration_days) * DAY),
           "effort-baseline-hours": float(baseline)}
    if parent:
        row["parent-id"] = parent
    return row


def brute_force_bcws(plan, t):
    """Day-by-day accumulation of each leaf's daily planned spend."""
    total = 0.0
    for row in leaf_activities(plan):
        start = parse_timestamp(row["start"])
        end = parse_timestamp(row["end"])
        days = int(round((end - start) / DAY))
        if days == 0:
            total += row["effort-baseline-hours"] if t >= end else 0.0
            continue
        rate = row["effort-baseline-hours"] / days
        cursor = start
        accumulated = 0.0
        while cursor + DAY <= min(t, end):
            accumulated += rate
            cursor += DAY
        total += accumulated
    return total


def brute_force_bcwp(plan, progress, t):
    total = 0.0
    for row in leaf_activities(plan):
        reports = sorted((r for r in progress if r["activity-id"] == row["id"]
                          and parse_timestamp(r["date"]) <= t),
                         key=lambda r: r["date"])
        fraction = reports[-1]["fraction-complete"] if reports else 0.0
        total += row["effort-baseline-hours"] * fraction
    return total


def brute_force_acwp(actuals, t):
    """Re-scan the cumulative series: latest value per activity at the cut."""
    latest: dict[str, float] = {}
    for rec in sorted(actuals, key=lambda r: r["timestamp"]):
        if parse_timestamp(rec["timestamp"]) <= t:
            latest[rec["activity-id"]] = rec["hours"]
    return sum(latest.values())


def test_single_activity_midpoint():
    # baseline 100, half complete, 40 spent: BCWP 50, ACWP 40, CPI 1.25
    plan = [_activity("a", 0, 10, 100.0)]
    t = T0 + 5 * DAY
    progress = [{"activity-id": "a", "date": _iso(t), "fraction-complete": 0.5}]
    actuals = [{"activity-id": "a", "timestamp": _iso(t), "hours": 40.0}]
    [snapshot] = [s for s in earned_value(plan, progress, actuals, t) if s.as_of == t]
    assert snapshot.bcwp == 50.0
    assert snapshot.acwp == 40.0
    assert snapshot.cpi == pytest.approx(1.25)
    assert snapshot.bcws == pytest.approx(50.0)
    assert snapshot.spi == pytest.approx(1.0)
    assert snapshot.cost_variance == pytest.approx(10.0)


def test_before_all_starts_everything_zero_and_undefined():
    plan = [_activity("a", 5, 10, 100.0)]
    t = T0 + 2 * DAY
    [snapshot] = [s for s in earned_value(plan, [], [], t) if s.as_of == t]
    assert snapshot.bcws == 0.0
    assert snapshot.bcwp == 0.0
    assert snapshot.spi is None
    assert snapshot.cpi is None


def test_on_plan_identities_exact():
    """Progress tracking the planned fraction with spend equal to planned
    cost gives CPI = SPI = 1 exactly (dyadic grid, no rounding)."""
    plan = [_activity("a", 0, 8, 320.0), _activity("b", 4, 16, 640.0)]
    grid = [T0 + d * DAY for d in range(0, 21, 2)]
    progress = []
    actuals = []
    for t in grid:
        spend = 0.0
        for row in plan:
            start, end = parse_timestamp(row["start"]), parse_timestamp(row["end"])
            fraction = planned_fraction(start, end, t)
            progress.append({"activity-id": row["id"], "date": _iso(t),
                             "fraction-complete": fraction})
            spend = row["effort-baseline-hours"] * fraction
            actuals.append({"activity-id": row["id"], "timestamp": _iso(t), "hours": spend})
    snapshots = earned_value(plan, progress, actuals, grid[-1])
    for snapshot in snapshots:
        if snapshot.bcws > 0:
            assert snapshot.spi == 1.0
            assert snapshot.cpi == 1.0
            assert snapshot.schedule_variance == 0.0


def test_milestones_and_parents_are_excluded():
    plan = [
        {"id": "root", "start": _iso(T0), "end": _iso(T0 + 10 * DAY),
         "effort-baseline-hours": 999.0},
        _activity("leaf", 0, 10, 100.0, parent="root"),
        {"id": "ms", "start": _iso(T0 + 10 * DAY), "end": _iso(T0 + 10 * DAY),
         "is-milestone": 1, "parent-id": "root"},
    ]
    assert [r["id"] for r in leaf_activities(plan)] == ["leaf"]
    t = T0 + 10 * DAY
    [snapshot] = [s for s in earned_value(plan, [], [], t) if s.as_of == t]
    assert snapshot.bcws == 100.0  # only the leaf's baseline, no double counting


def test_progress_out_of_range_rejected():
    plan = [_activity("a", 0, 10, 100.0)]
    progress = [{"activity-id": "a", "date": _iso(T0), "fraction-complete": 1.2}]
    with pytest.raises(Exception) as err:
        earned_value(plan, progress, [], T0 + DAY)
    assert "percent-complete" in str(err.value)


def _random_project(rng: random.Random):
    n = rng.randrange(1, 11)
    plan = []
    for i in range(n):
        start = rng.randrange(0, 30)
        duration = rng.choice([2, 4, 8, 16])
        baseline = rng.randrange(1, 200) * 0.25
        plan.append(_activity(f"a{i:02d}", start, duration, baseline))
    progress = []
    actuals = []
    for row in plan:
        start = parse_timestamp(row["start"])
        end = parse_timestamp(row["end"])
        duration = int(round((end - start) / DAY))
        for _ in range(rng.randrange(0, 4)):
            offset = rng.randrange(0, 2 * duration + 1)
            date = start + offset * DAY
            fraction = min(1.0, offset / duration)
            progress.append({"activity-id": row["id"], "date": _iso(date),
                             "fraction-complete": fraction})
        cumulative = 0.0
        for _ in range(rng.randrange(0, 4)):
            cumulative += rng.randrange(1, 40) * 0.25
            date = start + rng.randrange(0, 2 * duration + 1) * DAY
            actuals.append({"activity-id": row["id"], "timestamp": _iso(date),
                            "hours": cumulative})
    progress.sort(key=lambda r: (r["activity-id"], r["date"]))
    dedup = {}
    for rec in progress:
        dedup[(rec["activity-id"], rec["date"])] = rec
    progress = [dedup[k] for k in sorted(dedup)]
    # enforce monotone percent-complete per activity
    monotone = []
    last: dict[str, float] = {}
    for rec in progress:
        aid = rec["activity-id"]
        if rec["fraction-complete"] < last.get(aid, 0.0):
            continue
        last[aid] = rec["fraction-complete"]
        monotone.append(rec)
    actuals.sort(key=lambda r: (r["activity-id"], r["timestamp"]))
    return plan, monotone, actuals


def test_oracle_equivalence_on_randomized_projects():
    """100 random small projects: engine matches the day-by-day oracle to
    1e-9 relative on BCWS/BCWP/ACWP at whole-day cuts."""
    rng = random.Random(42)
    for _ in range(100):
        plan, progress, actuals = _random_project(rng)
        cut_day = rng.randrange(0, 70)
        t = T0 + cut_day * DAY
        snapshots = [s for s in earned_value(plan, progress, actuals, t) if s.as_of == t]
        assert snapshots, "cut time itself is always on the grid"
        snapshot = snapshots[0]
        assert snapshot.bcws == pytest.approx(brute_force_bcws(plan, t), rel=1e-9, abs=1e-9)
        assert snapshot.bcwp == pytest.approx(brute_force_bcwp(plan, progress, t),
                                              rel=1e-9, abs=1e-9)
        assert snapshot.acwp == pytest.approx(brute_force_acwp(actuals, t), rel=1e-9, abs=1e-9)
        if snapshot.bcwp == snapshot.acwp and snapshot.acwp > 0:
            assert snapshot.cpi == 1.0
        if snapshot.bcwp == snapshot.bcws and snapshot.bcws > 0:
            assert snapshot.spi == 1.0


def test_bcwp_monotone_in_time():
    plan = [_activity("a", 0, 8, 100.0)]
    progress = [{"activity-id": "a", "date": _iso(T0 + d * DAY),
                 "fraction-complete": min(1.0, d / 8)} for d in range(0, 12, 2)]
    snapshots = earned_value(plan, progress, [], T0 + 12 * DAY)
    values = [s.bcwp for s in snapshots]
    assert values == sorted(values)

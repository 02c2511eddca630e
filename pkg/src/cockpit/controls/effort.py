"""Effort aggregation and tolerance-range checking."""

from __future__ import annotations

from dataclasses import dataclass, field

from cockpit.catena.evaluate import EvaluationError
from cockpit.status import Status


@dataclass
class EffortAggregate:
    """Per-activity cumulative effort over time, with hierarchy roll-up."""

    series: dict[str, list[tuple[str, float]]]  # activity id -> [(date, cumulative hours)]
    rejected: list[dict] = field(default_factory=list)

    def total(self, activity: str) -> float:
        points = self.series.get(activity) or []
        return points[-1][1] if points else 0.0


def aggregate_effort(records: list[dict], plan: list[dict]) -> EffortAggregate:
    """Cumulative hours per activity, summed across persons.

    Parent activities additionally receive the rolled-up sum of their
    descendants.  Records naming unknown activities are collected in
    ``rejected`` and the computation continues.
    """
    activity_ids = [str(row["id"]) for row in plan if row.get("id") is not None]
    known = set(activity_ids)
    children: dict[str, list[str]] = {}
    for row in plan:
        parent = row.get("parent-id")
        if parent and str(parent) in known and row.get("id") is not None:
            children.setdefault(str(parent), []).append(str(row["id"]))

    direct: dict[str, list[tuple[str, float]]] = {a: [] for a in activity_ids}
    rejected: list[dict] = []
    for rec in records:
        activity = str(rec.get("activity-id", ""))
        if activity not in known:
            entry = dict(rec)
            entry["reason"] = f"unknown activity {activity!r}"
            rejected.append(entry)
            continue
        direct[activity].append((str(rec.get("date", "")), float(rec.get("hours", 0.0))))

    def descendants(activity: str) -> list[str]:
        out = [activity]
        stack = list(children.get(activity, []))
        seen = {activity}
        while stack:
            node = stack.pop()
            if node in seen:
                continue
            seen.add(node)
            out.append(node)
            stack.extend(children.get(node, []))
        return out

    series: dict[str, list[tuple[str, float]]] = {}
    for activity in activity_ids:
        merged: list[tuple[str, float]] = []
        for member in descendants(activity):
            merged.extend(direct[member])
        merged.sort(key=lambda p: (p[0], p[1]))
        points: list[tuple[str, float]] = []
        running = 0.0
        for date, hours in merged:
            running += hours
            if points and points[-1][0] == date:
                points[-1] = (date, running)
            else:
                points.append((date, running))
        series[activity] = points
    return EffortAggregate(series=series, rejected=rejected)


@dataclass
class DeviationPoint:
    timestamp: str
    baseline: float
    actual: float
    deviation: float
    status: Status


@dataclass
class DeviationSeries:
    subject: str
    points: list[DeviationPoint]


def tolerance_range_check(actual: list[tuple[str, float]], baseline: list[tuple[str, float]],
                          lower: float, upper: float, subject: str = "") -> DeviationSeries:
    """Compare an actual series against a baseline band.

    At each aligned timestamp the deviation is ``max(0, actual - baseline)``.
    The status is green inside ``[b*(1-lower), b*(1+upper)]``, yellow when
    outside by at most the band again, red beyond that.  Series are aligned
    by carry-forward of the most recent value; timestamps where either side
    is still undefined are skipped.
    """
    if lower < 0 or upper < 0:
        raise EvaluationError("tolerance bounds must be non-negative")
    if not baseline:
        raise EvaluationError(f"baseline series is empty for subject {subject!r}")
    actual = sorted(actual, key=lambda p: p[0])
    baseline = sorted(baseline, key=lambda p: p[0])
    stamps = sorted({ts for ts, _ in actual} | {ts for ts, _ in baseline})
    points: list[DeviationPoint] = []
    for ts in stamps:
        a = _carry(actual, ts)
        b = _carry(baseline, ts)
        if a is None or b is None:
            continue
        deviation = max(0.0, a - b)
        lo1, hi1 = b * (1 - lower), b * (1 + upper)
        lo2, hi2 = b * (1 - 2 * lower), b * (1 + 2 * upper)
        if lo1 <= a <= hi1:
            status = Status.GREEN
        elif lo2 <= a <= hi2:
            status = Status.YELLOW
        else:
            status = Status.RED
        points.append(DeviationPoint(ts, b, a, deviation, status))
    return DeviationSeries(subject=subject, points=points)


def _carry(points: list[tuple[str, float]], ts: str) -> float | None:
    value = None
    for pts, pval in points:
        if pts > ts:
            break
        value = pval
    return value

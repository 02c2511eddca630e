"""Earned value analysis over a baselined project plan."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime

from cockpit.catena.evaluate import EvaluationError
from cockpit.interchange import format_timestamp, parse_timestamp


@dataclass
class EvaSnapshot:
    as_of: datetime
    bcws: float
    bcwp: float
    acwp: float

    @property
    def cpi(self) -> float | None:
        return self.bcwp / self.acwp if self.acwp > 0 else None

    @property
    def spi(self) -> float | None:
        return self.bcwp / self.bcws if self.bcws > 0 else None

    @property
    def cost_variance(self) -> float:
        return self.bcwp - self.acwp

    @property
    def schedule_variance(self) -> float:
        return self.bcwp - self.bcws

    def to_record(self) -> dict:
        rec: dict = {
            "timestamp": format_timestamp(self.as_of),
            "bcws": self.bcws,
            "bcwp": self.bcwp,
            "acwp": self.acwp,
            "cost-variance": self.cost_variance,
            "schedule-variance": self.schedule_variance,
        }
        if self.cpi is not None:
            rec["cpi"] = self.cpi
        if self.spi is not None:
            rec["spi"] = self.spi
        return rec


def leaf_activities(plan: list[dict]) -> list[dict]:
    """Non-milestone activities without children (baselines live on leaves)."""
    parents = {str(row["parent-id"]) for row in plan if row.get("parent-id")}
    return [row for row in plan
            if row.get("id") is not None
            and str(row["id"]) not in parents
            and not row.get("is-milestone")]


def planned_fraction(start: datetime, end: datetime, t: datetime) -> float:
    """Share of planned work scheduled by ``t``, linear over the window."""
    if end <= start:  # zero-length window: all work lands at the instant
        return 1.0 if t >= end else 0.0
    if t <= start:
        return 0.0
    if t >= end:
        return 1.0
    return (t - start).total_seconds() / (end - start).total_seconds()


def earned_value(plan: list[dict], progress: list[dict], actuals: list[dict],
                 as_of: datetime) -> list[EvaSnapshot]:
    """BCWS/BCWP/ACWP series over leaf activities of the plan.

    BCWS spreads each activity's baseline linearly over its window;
    BCWP applies the latest reported completion fraction; ACWP carries
    cumulative actual spend forward.  Percent-complete must be in [0, 1]
    and non-decreasing per activity.
    """
    leaves = leaf_activities(plan)
    windows: dict[str, tuple[datetime, datetime, float]] = {}
    for row in leaves:
        aid = str(row["id"])
        start = parse_timestamp(row["start"], f"plan.{aid}.start") if row.get("start") else None
        end = parse_timestamp(row["end"], f"plan.{aid}.end") if row.get("end") else None
        if start is None or end is None:
            raise EvaluationError(f"activity {aid!r} lacks a planned window")
        windows[aid] = (start, end, float(row.get("effort-baseline-hours", 0.0)))

    progress_by_activity: dict[str, list[tuple[datetime, float]]] = {}
    for rec in sorted(progress, key=lambda r: (str(r.get("activity-id")), str(r.get("date")))):
        aid = str(rec.get("activity-id", ""))
        if aid not in windows:
            continue
        value = float(rec.get("fraction-complete", 0.0))
        if not 0.0 <= value <= 1.0:
            raise EvaluationError(f"percent-complete out of [0,1] for activity {aid!r}: {value}")
        points = progress_by_activity.setdefault(aid, [])
        when = parse_timestamp(rec.get("date"), "progress.date")
        if points and value < points[-1][1]:
            raise EvaluationError(f"percent-complete decreases for activity {aid!r}")
        points.append((when, value))

    actual_by_activity: dict[str, list[tuple[datetime, float]]] = {}
    for rec in sorted(actuals, key=lambda r: (str(r.get("activity-id")), str(r.get("timestamp")))):
        aid = str(rec.get("activity-id", ""))
        if aid not in windows:
            continue
        actual_by_activity.setdefault(aid, []).append(
            (parse_timestamp(rec.get("timestamp"), "actuals.timestamp"),
             float(rec.get("hours", 0.0))))

    grid: set[datetime] = {as_of}
    for start, end, _ in windows.values():
        grid.add(start)
        grid.add(end)
    for points in progress_by_activity.values():
        grid.update(ts for ts, _ in points)
    for points in actual_by_activity.values():
        grid.update(ts for ts, _ in points)
    stamps = sorted(t for t in grid if t <= as_of)

    def carry(points: list[tuple[datetime, float]], t: datetime) -> float:
        value = 0.0
        for pts, pval in points:
            if pts > t:
                break
            value = pval
        return value

    snapshots = []
    for t in stamps:
        bcws = sum(b * planned_fraction(s, e, t) for s, e, b in windows.values())
        bcwp = sum(windows[aid][2] * carry(progress_by_activity.get(aid, []), t)
                   for aid in windows)
        acwp = sum(carry(actual_by_activity.get(aid, []), t) for aid in windows)
        snapshots.append(EvaSnapshot(as_of=t, bcws=bcws, bcwp=bcwp, acwp=acwp))
    return snapshots

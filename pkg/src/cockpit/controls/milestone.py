"""Milestone trend analysis over successive plan snapshots."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone

from cockpit.catena.evaluate import EvaluationError
from cockpit.interchange import parse_timestamp

DEFAULT_SLOPE_THRESHOLD = 0.1  # predicted-date days per report day


@dataclass
class MilestoneTrend:
    milestone: str
    reports: list[tuple[datetime, datetime]]  # (report date, predicted date)
    classification: str  # "stable" | "delayed" | "accelerated"
    slope: float = 0.0
    low_confidence: bool = False
    gaps: list[datetime] = field(default_factory=list)  # snapshots lacking the milestone


def milestone_trend(snapshots: list[tuple[datetime, list[dict]]],
                    milestones: list[str] | None = None,
                    slope_threshold: float = DEFAULT_SLOPE_THRESHOLD) -> list[MilestoneTrend]:
    """Track predicted milestone dates across plan snapshots.

    Classification comes from the least-squares slope of predicted date
    over report date: above the threshold is delayed, below its negation
    accelerated, otherwise stable.  Fewer than two readings yield a
    stable, low-confidence trend.
    """
    if not snapshots:
        raise EvaluationError("milestone trend needs at least one plan snapshot")
    snapshots = sorted(snapshots, key=lambda s: s[0])
    if milestones is None or not milestones:
        found: set[str] = set()
        for _, rows in snapshots:
            found.update(str(r["id"]) for r in rows if r.get("is-milestone") and r.get("id"))
        milestones = sorted(found)

    out = []
    for mid in milestones:
        reports: list[tuple[datetime, datetime]] = []
        gaps: list[datetime] = []
        for report_date, rows in snapshots:
            predicted = None
            for row in rows:
                if str(row.get("id")) == mid:
                    date = row.get("end") or row.get("start")
                    if date:
                        predicted = parse_timestamp(date, f"plan.{mid}.end")
                    break
            if predicted is None:
                gaps.append(report_date)
            else:
                reports.append((report_date, predicted))
        if len(reports) < 2:
            out.append(MilestoneTrend(mid, reports, "stable", 0.0, True, gaps))
            continue
        slope = _least_squares_slope(reports)
        if slope > slope_threshold:
            classification = "delayed"
        elif slope < -slope_threshold:
            classification = "accelerated"
        else:
            classification = "stable"
        out.append(MilestoneTrend(mid, reports, classification, slope, False, gaps))
    return out


_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


def _least_squares_slope(reports: list[tuple[datetime, datetime]]) -> float:
    xs = [(r - _EPOCH).total_seconds() / 86400.0 for r, _ in reports]
    ys = [(p - _EPOCH).total_seconds() / 86400.0 for _, p in reports]
    n = len(xs)
    mean_x = sum(xs) / n
    mean_y = sum(ys) / n
    sxx = sum((x - mean_x) ** 2 for x in xs)
    if sxx == 0:
        return 0.0
    sxy = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    return sxy / sxx

"""Effort-tracking regularity and defect-detection efficiency."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta

from cockpit.catena.evaluate import EvaluationError
from cockpit.interchange import parse_timestamp
from cockpit.status import Status

DEFAULT_REGULARITY_THRESHOLD = 0.8


@dataclass
class RegularityEntry:
    person: str
    fraction: float
    flagged: bool

    def to_record(self) -> dict:
        return {
            "person-id": self.person,
            "fraction": self.fraction,
            "flagged": int(self.flagged),
            "status": (Status.YELLOW if self.flagged else Status.GREEN).value,
        }


def effort_tracking_regularity(records: list[dict], roster: list[str],
                               interval: timedelta, window_start: datetime,
                               window_end: datetime,
                               threshold: float = DEFAULT_REGULARITY_THRESHOLD) -> list[RegularityEntry]:
    """Per person: the share of collection periods with at least one record.

    Periods tile the window from its start; a trailing partial period
    counts as a full one.  Persons below the threshold are flagged.
    """
    if interval.total_seconds() <= 0:
        raise EvaluationError("regularity interval must be positive")
    if not roster:
        return []
    total = 0
    cursor = window_start
    while cursor < window_end:
        total += 1
        cursor = cursor + interval
    dates: dict[str, list[datetime]] = {}
    for rec in records:
        person = str(rec.get("person-id", ""))
        when = parse_timestamp(rec.get("date"), "effort.date")
        dates.setdefault(person, []).append(when)
    out = []
    for person in sorted(set(roster)):
        if total == 0:
            out.append(RegularityEntry(person, 1.0, False))
            continue
        covered = 0
        stamps = sorted(dates.get(person, []))
        for k in range(total):
            lo = window_start + k * interval
            hi = lo + interval
            if any(lo <= s < hi for s in stamps):
                covered += 1
        fraction = covered / total
        out.append(RegularityEntry(person, fraction, fraction < threshold))
    return out


@dataclass
class EfficiencyEntry:
    activity: str
    defects: int
    hours: float
    efficiency: float | None  # None when unmeasurable
    unmeasurable: bool

    def to_record(self) -> dict:
        rec: dict = {
            "activity-id": self.activity,
            "defects": self.defects,
            "hours": self.hours,
            "unmeasurable": int(self.unmeasurable),
        }
        if self.efficiency is not None:
            rec["efficiency"] = self.efficiency
        return rec


def defect_detection_efficiency(defects: list[dict],
                                qa_hours: dict[str, float]) -> list[EfficiencyEntry]:
    """Defects found per hour for every detecting activity.

    Activities with logged defects but zero hours are flagged unmeasurable
    instead of reporting an infinite rate.
    """
    counts: dict[str, int] = {}
    for rec in defects:
        activity = str(rec.get("detecting-activity-id", ""))
        counts[activity] = counts.get(activity, 0) + 1
    for hours in qa_hours.values():
        if hours < 0:
            raise EvaluationError("qa effort hours must be non-negative")
    activities = sorted(set(counts) | set(qa_hours))
    out = []
    for activity in activities:
        count = counts.get(activity, 0)
        hours = float(qa_hours.get(activity, 0.0))
        if hours > 0:
            out.append(EfficiencyEntry(activity, count, hours, count / hours, False))
        elif count == 0:
            out.append(EfficiencyEntry(activity, 0, hours, 0.0, False))
        else:
            out.append(EfficiencyEntry(activity, count, hours, None, True))
    return out

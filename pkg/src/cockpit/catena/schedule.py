"""Collection schedules: due timestamps and overdue detection."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime

from cockpit.catena.instances import DataEntry, VisualizationCatena
from cockpit.catena.store import ProjectDataStore
from cockpit.interchange import format_timestamp


@dataclass
class CollectionStatus:
    entry: str
    due: list[datetime]
    overdue: list[datetime]

    @property
    def is_overdue(self) -> bool:
        return bool(self.overdue)

    def to_dict(self) -> dict:
        return {
            "entry": self.entry,
            "due": [format_timestamp(d) for d in self.due],
            "overdue": [format_timestamp(d) for d in self.overdue],
            "is-overdue": self.is_overdue,
        }


def due_timestamps(entry: DataEntry, now: datetime) -> list[datetime]:
    """``start + k * interval`` up to min(now, end)."""
    horizon = min(now, entry.schedule.end)
    due = []
    k = 0
    while True:
        ts = entry.schedule.start + k * entry.schedule.interval
        if ts > horizon:
            break
        due.append(ts)
        k += 1
    return due


def slot_served(due: datetime, interval, stamps: list[datetime]) -> bool:
    """Whether a payload arrived within one interval after the due time.

    The window is half-open ``(due, due + interval]`` so a payload landing
    exactly on a slot boundary serves the slot it closes, never two.
    """
    window_end = due + interval
    return any(due < s <= window_end for s in stamps)


def collection_status(vc: VisualizationCatena, store: ProjectDataStore,
                      now: datetime) -> list[CollectionStatus]:
    """Due and overdue collection slots for every data entry.

    A due timestamp is overdue when its full interval has elapsed without
    a payload arriving inside its window.  Late payloads do not
    retroactively serve an elapsed slot.
    """
    out = []
    for eid, entry in sorted(vc.data_entries.items()):
        due = due_timestamps(entry, now)
        stamps = [p.timestamp for p in store.payloads_for(eid, now)]
        overdue = []
        for ts in due:
            if now < ts + entry.schedule.interval:
                continue
            if not slot_served(ts, entry.schedule.interval, stamps):
                overdue.append(ts)
        out.append(CollectionStatus(entry=eid, due=due, overdue=overdue))
    return out

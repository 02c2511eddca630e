"""Deviation records and post-project detection-latency analysis."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from datetime import datetime
from typing import Any

from cockpit.interchange import (
    StructuralError,
    expect_list,
    expect_object,
    format_duration,
    format_timestamp,
    get_string,
    parse_timestamp,
)
from cockpit.status import Status

DEVIATION_KINDS = ("effort-overrun", "schedule-slip", "quality-threshold",
                   "regularity", "plan-inconsistency")


@dataclass
class DeviationRecord:
    """A detected plan deviation or project risk."""

    id: str
    source: str  # raising function instance
    subject: str  # activity / milestone / module / person id
    kind: str
    severity: Status
    raised_at: datetime
    data_as_of: datetime

    def __post_init__(self) -> None:
        if self.raised_at < self.data_as_of:
            raise StructuralError(f"deviation {self.id or self.subject}",
                                  "raised-at must not precede data-as-of")

    def with_derived_id(self) -> "DeviationRecord":
        """Deterministic id from content; safe for dedup across evaluations."""
        digest = hashlib.sha256("|".join([
            self.source, self.subject, self.kind,
            format_timestamp(self.data_as_of),
        ]).encode("utf-8")).hexdigest()[:12]
        self.id = f"dev-{digest}"
        return self

    @property
    def dedup_key(self) -> tuple:
        return (self.source, self.subject, self.kind, self.data_as_of)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "source": self.source,
            "subject": self.subject,
            "kind": self.kind,
            "severity": self.severity.value,
            "raised-at": format_timestamp(self.raised_at),
            "data-as-of": format_timestamp(self.data_as_of),
        }

    @classmethod
    def from_dict(cls, data: Any, path: str = "deviation") -> "DeviationRecord":
        obj = expect_object(data, path)
        return cls(
            id=str(obj.get("id", "")),
            source=get_string(obj, "source", path),
            subject=get_string(obj, "subject", path),
            kind=get_string(obj, "kind", path),
            severity=Status.from_value(obj.get("severity", "yellow")),
            raised_at=parse_timestamp(obj.get("raised-at"), f"{path}.raised-at"),
            data_as_of=parse_timestamp(obj.get("data-as-of"), f"{path}.data-as-of"),
        )


@dataclass
class GroundTruthEvent:
    """A deviation that actually happened, with its detection deadline."""

    event_id: str
    subject: str
    kind: str
    occurred_at: datetime
    deadline: datetime

    def to_dict(self) -> dict:
        return {
            "event-id": self.event_id,
            "subject": self.subject,
            "kind": self.kind,
            "occurred-at": format_timestamp(self.occurred_at),
            "deadline": format_timestamp(self.deadline),
        }

    @classmethod
    def from_dict(cls, data: Any, path: str = "event") -> "GroundTruthEvent":
        obj = expect_object(data, path)
        return cls(
            event_id=get_string(obj, "event-id", path),
            subject=get_string(obj, "subject", path),
            kind=get_string(obj, "kind", path),
            occurred_at=parse_timestamp(obj.get("occurred-at"), f"{path}.occurred-at"),
            deadline=parse_timestamp(obj.get("deadline"), f"{path}.deadline"),
        )


@dataclass
class RetrospectiveItem:
    event: GroundTruthEvent
    classification: str  # "in-time" | "too-late" | "not-detected"
    matched: DeviationRecord | None = None

    @property
    def latency(self) -> Any:
        if self.matched is None:
            return None
        return self.matched.raised_at - self.event.occurred_at

    def to_dict(self) -> dict:
        return {
            "event": self.event.to_dict(),
            "classification": self.classification,
            "matched": self.matched.to_dict() if self.matched else None,
            "latency": format_duration(self.latency) if self.matched else None,
        }


@dataclass
class RetrospectiveReport:
    items: list[RetrospectiveItem]

    def counts(self) -> dict[str, int]:
        out = {"in-time": 0, "too-late": 0, "not-detected": 0}
        for item in self.items:
            out[item.classification] += 1
        return out

    def to_dict(self) -> dict:
        return {
            "format": "retrospective-report/1",
            "items": [item.to_dict() for item in self.items],
            "counts": self.counts(),
        }


def retrospective(deviations: list[DeviationRecord],
                  ground_truth: list[GroundTruthEvent]) -> RetrospectiveReport:
    """Classify every ground-truth event as in-time, too-late, or not-detected.

    An event matches the earliest record with the same subject and kind
    raised at or after the event occurred; the deadline is inclusive.
    """
    items = []
    for event in ground_truth:
        candidates = [d for d in deviations
                      if d.subject == event.subject and d.kind == event.kind
                      and d.raised_at >= event.occurred_at]
        candidates.sort(key=lambda d: (d.raised_at, d.id))
        if not candidates:
            items.append(RetrospectiveItem(event, "not-detected"))
            continue
        match = candidates[0]
        label = "in-time" if match.raised_at <= event.deadline else "too-late"
        items.append(RetrospectiveItem(event, label, match))
    return RetrospectiveReport(items)


def deviations_from_dict(data: Any, path: str = "deviations") -> list[DeviationRecord]:
    obj = expect_object(data, path)
    return [DeviationRecord.from_dict(d, f"{path}[{i}]")
            for i, d in enumerate(expect_list(obj.get("deviations", []), path))]


def ground_truth_from_dict(data: Any, path: str = "ground-truth") -> list[GroundTruthEvent]:
    obj = expect_object(data, path)
    return [GroundTruthEvent.from_dict(e, f"{path}[{i}]")
            for i, e in enumerate(expect_list(obj.get("events", []), path))]

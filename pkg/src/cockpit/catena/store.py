"""Time-stamped payload history for data entries.

Payloads are append-only.  The effective content of an entry at a cut
time depends on the data type's accumulation mode:

* ``snapshot`` types: the latest payload at or before the cut wins
  (corrections supersede by timestamp).
* ``log`` types: payloads are replayed in order; ``add`` extends the
  record list, ``remove`` drops exact matches, ``change`` replaces them.

Payload order is canonical, ``(timestamp, content hash)``, so effective
content never depends on insertion order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Iterable

from cockpit.catena.types import DataTypeDef
from cockpit.interchange import (
    StructuralError,
    content_hash,
    expect_list,
    expect_object,
    format_timestamp,
    parse_timestamp,
)

ACTIONS = ("add", "change", "remove")


@dataclass
class Payload:
    entry: str
    timestamp: datetime
    records: list[dict] = field(default_factory=list)
    action: str = "add"
    source: str = ""

    def __post_init__(self) -> None:
        if self.action not in ACTIONS:
            raise StructuralError("payload.action", f"expected add|change|remove, got {self.action!r}")

    @property
    def sort_key(self) -> tuple:
        return (self.timestamp, content_hash({"a": self.action, "r": self.records}))

    def to_dict(self) -> dict:
        return {
            "entry": self.entry,
            "timestamp": format_timestamp(self.timestamp),
            "action": self.action,
            "records": self.records,
            "source": self.source,
        }

    @classmethod
    def from_dict(cls, data: Any, path: str = "payload") -> "Payload":
        obj = expect_object(data, path)
        return cls(
            entry=str(obj.get("entry", "")),
            timestamp=parse_timestamp(obj.get("timestamp"), f"{path}.timestamp"),
            records=[expect_object(r, f"{path}.records[{i}]")
                     for i, r in enumerate(expect_list(obj.get("records", []), f"{path}.records"))],
            action=str(obj.get("action", "add")),
            source=str(obj.get("source", "")),
        )


class ProjectDataStore:
    """Append-only store of payloads keyed by data entry."""

    def __init__(self, payloads: Iterable[Payload] = ()):  # noqa: D107
        self._payloads: dict[str, list[Payload]] = {}
        for p in payloads:
            self.append(p)

    def append(self, payload: Payload) -> None:
        self._payloads.setdefault(payload.entry, []).append(payload)

    def add(self, entry: str, timestamp: datetime, records: list[dict],
            action: str = "add", source: str = "") -> Payload:
        payload = Payload(entry=entry, timestamp=timestamp, records=records,
                          action=action, source=source)
        self.append(payload)
        return payload

    def entries(self) -> list[str]:
        return sorted(self._payloads)

    def payloads_for(self, entry: str, as_of: datetime | None = None) -> list[Payload]:
        """Payloads for an entry up to the cut, in canonical order."""
        found = self._payloads.get(entry, [])
        if as_of is not None:
            found = [p for p in found if p.timestamp <= as_of]
        return sorted(found, key=lambda p: p.sort_key)

    def effective_records(self, entry: str, data_type: DataTypeDef,
                          as_of: datetime | None = None) -> list[dict] | None:
        """Current content of an entry at the cut; None when no payload exists."""
        payloads = self.payloads_for(entry, as_of)
        if not payloads:
            return None
        if data_type.accumulation == "snapshot":
            return list(payloads[-1].records)
        current: list[dict] = []
        for p in payloads:
            if p.action == "add":
                current.extend(p.records)
            elif p.action == "remove":
                for target in p.records:
                    current = [r for r in current if not _matches(r, target)]
            else:  # change
                for pair in p.records:
                    old = pair.get("old")
                    new = pair.get("new")
                    if isinstance(old, dict):
                        current = [r for r in current if not _matches(r, old)]
                    if isinstance(new, dict):
                        current.append(new)
        return current

    def versions(self, entry: str, as_of: datetime | None = None,
                 data_type: DataTypeDef | None = None) -> list[tuple[datetime, list[dict]]]:
        """Timestamped content versions, one per payload at or before the cut.

        For snapshot types each version is that payload's records; for log
        types each version is the replayed state after that payload.
        """
        payloads = self.payloads_for(entry, as_of)
        if data_type is None or data_type.accumulation == "snapshot":
            return [(p.timestamp, list(p.records)) for p in payloads]
        out: list[tuple[datetime, list[dict]]] = []
        for i, p in enumerate(payloads):
            state = self._replay(payloads[: i + 1])
            out.append((p.timestamp, state))
        return out

    @staticmethod
    def _replay(payloads: list[Payload]) -> list[dict]:
        current: list[dict] = []
        for p in payloads:
            if p.action == "add":
                current.extend(p.records)
            elif p.action == "remove":
                for target in p.records:
                    current = [r for r in current if not _matches(r, target)]
            else:
                for pair in p.records:
                    old = pair.get("old")
                    new = pair.get("new")
                    if isinstance(old, dict):
                        current = [r for r in current if not _matches(r, old)]
                    if isinstance(new, dict):
                        current.append(new)
        return current

    def fingerprint(self, as_of: datetime | None = None) -> str:
        """Deterministic hash of all content at the cut (insertion-order free)."""
        doc = {entry: [p.to_dict() for p in self.payloads_for(entry, as_of)]
               for entry in self.entries()}
        return content_hash(doc)

    def to_dict(self) -> dict:
        payloads = []
        for entry in self.entries():
            payloads.extend(p.to_dict() for p in self.payloads_for(entry))
        return {"format": "project-store/1", "payloads": payloads}

    @classmethod
    def from_dict(cls, data: Any, path: str = "store") -> "ProjectDataStore":
        obj = expect_object(data, path)
        store = cls()
        for i, p in enumerate(expect_list(obj.get("payloads", []), f"{path}.payloads")):
            store.append(Payload.from_dict(p, f"{path}.payloads[{i}]"))
        return store


def _matches(record: dict, pattern: dict) -> bool:
    """A record matches when it agrees with every field the pattern names."""
    return all(record.get(k) == v for k, v in pattern.items())

"""Schedule-driven collection sweeps over a catena's external entries."""

from __future__ import annotations

from datetime import datetime
from pathlib import Path

from cockpit.catena.instances import VisualizationCatena
from cockpit.catena.schedule import due_timestamps, slot_served
from cockpit.catena.store import ProjectDataStore
from cockpit.catena.types import ComponentRepository
from cockpit.interchange import canonical_json
from cockpit.ingestion.dao import CollectionEvent, DaoBinding, fetch


def run_collection_sweep(vc: VisualizationCatena, repo: ComponentRepository,
                         store: ProjectDataStore, now: datetime,
                         base_dir: Path | str = ".") -> list[CollectionEvent]:
    """Fetch every external entry whose collection slots lack a payload.

    Each unserved due slot up to ``now`` triggers one fetch; the payload
    is stamped at the slot end (or ``now`` inside the current slot), so
    re-running a sweep at the same time is a no-op.  For log-like types,
    records already collected earlier are subtracted before storing, so
    a row is never duplicated even when windows overlap.  Per-entry
    errors never suppress collection for other entries.
    """
    events: list[CollectionEvent] = []
    for eid, entry in sorted(vc.data_entries.items()):
        if entry.origin != "external" or entry.active_dao is None:
            continue
        dtype = repo.data_types.get(entry.data_type)
        if dtype is None:
            events.append(CollectionEvent(eid, now, now, "error",
                                          f"unknown data type {entry.data_type!r}"))
            continue
        try:
            binding = DaoBinding.from_entry(entry, repo)
        except ValueError as exc:
            events.append(CollectionEvent(eid, now, now, "error", str(exc)))
            continue
        stamps = [p.timestamp for p in store.payloads_for(eid, now)]
        for due in due_timestamps(entry, now):
            if slot_served(due, entry.schedule.interval, stamps):
                continue
            slot_end = min(due + entry.schedule.interval, now)
            if slot_end <= due:
                continue
            result = fetch(binding, (None, slot_end), dtype, base_dir)
            records = result.records
            if dtype.accumulation == "log" and records:
                already = store.effective_records(eid, dtype, now) or []
                records = _subtract(records, already)
            event = CollectionEvent(
                entry=eid, due=due, executed_at=now,
                outcome=result.outcome if result.outcome != "ok" or records else "empty",
                message=result.message, rejected=result.rejected)
            if result.outcome != "error":
                store.add(eid, slot_end, records, source=f"dao:{binding.package}")
                event.payload_timestamp = slot_end
                stamps.append(slot_end)
            events.append(event)
    return events


def _subtract(records: list[dict], already: list[dict]) -> list[dict]:
    """Remove records already collected (multiset semantics)."""
    counts: dict[str, int] = {}
    for rec in already:
        key = canonical_json(rec)
        counts[key] = counts.get(key, 0) + 1
    out = []
    for rec in records:
        key = canonical_json(rec)
        if counts.get(key, 0) > 0:
            counts[key] -= 1
            continue
        out.append(rec)
    return out

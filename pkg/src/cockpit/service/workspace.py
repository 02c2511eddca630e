"""Per-project workspaces: versioned documents plus append-only histories.

A workspace is one directory: versioned repository/plan/catena documents,
an append-only payload store, an append-only deviation log, collection
events, and content-addressed evaluation results.  Mutations are
serialized per project by the service; files are written atomically.
"""

from __future__ import annotations

import json
import os
import threading
from datetime import datetime, timezone
from pathlib import Path

from cockpit.catena.evaluate import EvaluationResult, evaluate
from cockpit.catena.instances import VisualizationCatena
from cockpit.catena.report import CheckKind, CheckReport
from cockpit.catena.retrospective import (
    DeviationRecord,
    GroundTruthEvent,
    RetrospectiveReport,
    retrospective,
)
from cockpit.catena.schedule import collection_status
from cockpit.catena.store import Payload, ProjectDataStore
from cockpit.catena.types import ComponentRepository, validate_record, validate_repository
from cockpit.catena.validate import validate_catena
from cockpit.composer import ComposeResult, compose
from cockpit.controls import shipped_registry
from cockpit.gqm import GqmPlan, validate_plan
from cockpit.ingestion import run_collection_sweep
from cockpit.interchange import content_hash, document_json, format_timestamp


class WorkspaceError(Exception):
    """Service-level failure with a machine-readable code."""

    def __init__(self, code: str, message: str, status: int = 400):
        self.code = code
        self.message = message
        self.status = status
        super().__init__(message)


def not_found(message: str) -> WorkspaceError:
    return WorkspaceError("not-found", message, 404)


def not_configured(message: str) -> WorkspaceError:
    return WorkspaceError("not-configured", message, 409)


def capability_error(message: str) -> WorkspaceError:
    return WorkspaceError("capability-error", message, 409)


def validation_failed(message: str) -> WorkspaceError:
    return WorkspaceError("validation-failed", message, 422)


_LOCKS: dict[str, threading.Lock] = {}
_LOCKS_GUARD = threading.Lock()


def _lock_for(key: str) -> threading.Lock:
    with _LOCKS_GUARD:
        if key not in _LOCKS:
            _LOCKS[key] = threading.Lock()
        return _LOCKS[key]


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _append_line(path: Path, doc: dict) -> None:
    with path.open("a", encoding="utf-8") as fh:
        fh.write(json.dumps(doc, sort_keys=True, ensure_ascii=False) + "\n")


def _read_lines(path: Path) -> list[dict]:
    if not path.exists():
        return []
    out = []
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line:
            out.append(json.loads(line))
    return out


class Workspace:
    """All state of one controlled project."""

    def __init__(self, root: Path, project_id: str):
        self.root = Path(root)
        self.project_id = project_id
        self.path = self.root / project_id
        self.lock = _lock_for(str(self.path.resolve()) if self.path.exists() else str(self.path))

    # -- lifecycle ---------------------------------------------------------

    @classmethod
    def create(cls, root: Path | str, project_id: str, context: list[str]) -> "Workspace":
        ws = cls(Path(root), project_id)
        if ws.path.exists():
            raise WorkspaceError("already-exists", f"project {project_id!r} already exists", 409)
        ws.path.mkdir(parents=True)
        for sub in ("repository", "plan", "catena", "trace", "report", "evaluations", "sources"):
            (ws.path / sub).mkdir()
        meta = {
            "project": project_id,
            "context": list(context),
            "repository-version": 0,
            "plan-version": 0,
            "catena-version": 0,
            "created": format_timestamp(datetime.now(timezone.utc)),
        }
        _write_atomic(ws.path / "meta.json", document_json(meta))
        return ws

    @classmethod
    def open(cls, root: Path | str, project_id: str) -> "Workspace":
        ws = cls(Path(root), project_id)
        if not (ws.path / "meta.json").exists():
            raise not_found(f"unknown project {project_id!r}")
        return ws

    @classmethod
    def list_projects(cls, root: Path | str) -> list[str]:
        root = Path(root)
        if not root.exists():
            return []
        return sorted(p.name for p in root.iterdir() if (p / "meta.json").exists())

    @property
    def meta(self) -> dict:
        return json.loads((self.path / "meta.json").read_text(encoding="utf-8"))

    def _set_meta(self, **changes) -> dict:
        meta = self.meta
        meta.update(changes)
        _write_atomic(self.path / "meta.json", document_json(meta))
        return meta

    # -- versioned documents -------------------------------------------------

    def put_repository(self, doc: dict) -> dict:
        repo = ComponentRepository.from_dict(doc)
        report = validate_repository(repo)
        if not report.passed:
            return {"accepted": False, "report": report.to_dict()}
        with self.lock:
            version = self.meta["repository-version"] + 1
            _write_atomic(self.path / "repository" / f"v{version}.json",
                          document_json(repo.to_dict()))
            self._set_meta(**{"repository-version": version})
        return {"accepted": True, "version": version, "report": report.to_dict()}

    def repository(self) -> ComponentRepository:
        version = self.meta["repository-version"]
        if version == 0:
            raise not_configured("no component repository uploaded")
        doc = json.loads((self.path / "repository" / f"v{version}.json").read_text(encoding="utf-8"))
        return ComponentRepository.from_dict(doc)

    def put_plan(self, doc: dict) -> dict:
        plan = GqmPlan.from_dict(doc)
        report = validate_plan(plan)
        if not report.passed:
            return {"accepted": False, "report": report.to_dict()}
        with self.lock:
            version = self.meta["plan-version"] + 1
            _write_atomic(self.path / "plan" / f"v{version}.json", document_json(plan.to_dict()))
            self._set_meta(**{"plan-version": version})
        return {"accepted": True, "version": version, "report": report.to_dict()}

    def plan(self) -> GqmPlan:
        version = self.meta["plan-version"]
        if version == 0:
            raise not_configured("no measurement plan uploaded")
        doc = json.loads((self.path / "plan" / f"v{version}.json").read_text(encoding="utf-8"))
        return GqmPlan.from_dict(doc)

    def compose_catena(self) -> ComposeResult:
        """Compose from the current plan and repository; persist only on pass."""
        plan = self.plan()
        repo = self.repository()
        result = compose(plan, repo)
        if result.passed:
            with self.lock:
                version = self.meta["catena-version"] + 1
                _write_atomic(self.path / "catena" / f"v{version}.json",
                              document_json(result.catena.to_dict(repository=repo.to_dict())))
                _write_atomic(self.path / "trace" / f"v{version}.json",
                              document_json(result.trace.to_dict()))
                _write_atomic(self.path / "report" / f"v{version}.json",
                              document_json(result.report.to_dict()))
                self._set_meta(**{"catena-version": version})
        return result

    def catena(self) -> tuple[VisualizationCatena, ComponentRepository, int]:
        version = self.meta["catena-version"]
        if version == 0:
            raise not_configured("no visualization catena composed")
        doc = json.loads((self.path / "catena" / f"v{version}.json").read_text(encoding="utf-8"))
        repo = ComponentRepository.from_dict(doc.get("repository", {}))
        return VisualizationCatena.from_dict(doc), repo, version

    def catena_document(self) -> dict:
        version = self.meta["catena-version"]
        if version == 0:
            raise not_configured("no visualization catena composed")
        return json.loads((self.path / "catena" / f"v{version}.json").read_text(encoding="utf-8"))

    def trace_document(self) -> dict:
        version = self.meta["catena-version"]
        if version == 0:
            raise not_configured("no visualization catena composed")
        return json.loads((self.path / "trace" / f"v{version}.json").read_text(encoding="utf-8"))

    # -- data --------------------------------------------------------------

    def store(self) -> ProjectDataStore:
        store = ProjectDataStore()
        for doc in _read_lines(self.path / "store.jsonl"):
            store.append(Payload.from_dict(doc))
        return store

    def append_payload(self, payload: Payload) -> None:
        _append_line(self.path / "store.jsonl", payload.to_dict())

    def submit_form(self, form_instance_id: str, submitter_role: str, records: list,
                    action: str = "add", submitted_at: datetime | None = None) -> dict:
        vc, repo, _ = self.catena()
        wfi = vc.web_form_instances.get(form_instance_id)
        if wfi is None:
            raise not_found(f"unknown web form instance {form_instance_id!r}")
        form = repo.web_forms.get(wfi.form)
        entry = vc.data_entries.get(wfi.target_data_entry)
        if form is None or entry is None:
            raise not_configured("form instance references missing components")
        if entry.origin != "manual":
            raise capability_error(
                f"entry {entry.id!r} is collected externally; manual submission is not allowed")
        if action not in ("add", "change", "remove"):
            raise WorkspaceError("structural-error", f"unknown action {action!r}", 400)
        if action not in form.capabilities:
            raise capability_error(f"form {form.id!r} does not allow {action!r}")
        dtype = repo.data_types[entry.data_type]
        when = submitted_at or datetime.now(timezone.utc)

        accepted_records: list[dict] = []
        rejections: list[dict] = []
        if dtype.accumulation == "snapshot" or action == "add":
            for i, rec in enumerate(records):
                try:
                    accepted_records.append(validate_record(dtype, rec, f"records[{i}]"))
                except Exception as exc:
                    rejections.append({"index": i, "reason": str(exc)})
        elif action == "change":
            for i, pair in enumerate(records):
                old = pair.get("old") if isinstance(pair, dict) else None
                new = pair.get("new") if isinstance(pair, dict) else None
                if not isinstance(old, dict) or not isinstance(new, dict):
                    rejections.append({"index": i, "reason": "change records need old and new objects"})
                    continue
                try:
                    accepted_records.append(
                        {"old": old, "new": validate_record(dtype, new, f"records[{i}].new")})
                except Exception as exc:
                    rejections.append({"index": i, "reason": str(exc)})
        else:  # remove: records are match patterns, not full rows
            for rec in records:
                if isinstance(rec, dict) and rec:
                    accepted_records.append(rec)
        payload_ts = None
        if accepted_records or not records:
            with self.lock:
                payload = Payload(entry=entry.id, timestamp=when, records=accepted_records,
                                  action=action, source=f"form:{form_instance_id}")
                self.append_payload(payload)
            payload_ts = format_timestamp(when)
        return {
            "accepted": len(accepted_records),
            "rejected": rejections,
            "payload-timestamp": payload_ts,
            "submitter-role": submitter_role,
        }

    def collect(self, now: datetime) -> list[dict]:
        vc, repo, _ = self.catena()
        with self.lock:
            store = self.store()
            before = {(p.entry, p.sort_key) for eid in store.entries()
                      for p in store.payloads_for(eid)}
            events = run_collection_sweep(vc, repo, store, now, self.path / "sources")
            for eid in store.entries():
                for payload in store.payloads_for(eid):
                    if (payload.entry, payload.sort_key) not in before:
                        self.append_payload(payload)
            for event in events:
                _append_line(self.path / "collection-events.jsonl", event.to_dict())
        return [e.to_dict() for e in events]

    def collection_events(self) -> list[dict]:
        return _read_lines(self.path / "collection-events.jsonl")

    # -- evaluation ----------------------------------------------------------

    def evaluate_at(self, as_of: datetime) -> EvaluationResult:
        """Return the evaluation at the cut, computing and persisting when stale.

        Staleness is content-addressed: same catena version and same store
        content at the cut reuse the stored result bit-for-bit.
        """
        vc, repo, version = self.catena()
        store = self.store()
        fingerprint = content_hash({
            "catena-version": version,
            "as-of": format_timestamp(as_of),
            "store": store.fingerprint(as_of),
        })
        cache = self.path / "evaluations" / f"{fingerprint}.json"
        if cache.exists():
            return EvaluationResult.from_dict(json.loads(cache.read_text(encoding="utf-8")))
        result = evaluate(vc, repo, store, as_of, shipped_registry())
        with self.lock:
            _write_atomic(cache, document_json(result.to_dict()))
            self._log_deviations(result.deviations)
        return result

    def _log_deviations(self, deviations: list[DeviationRecord]) -> None:
        seen = {(d["source"], d["subject"], d["kind"], d["data-as-of"])
                for d in _read_lines(self.path / "deviations.jsonl")}
        for record in deviations:
            doc = record.to_dict()
            key = (doc["source"], doc["subject"], doc["kind"], doc["data-as-of"])
            if key in seen:
                continue
            seen.add(key)
            _append_line(self.path / "deviations.jsonl", doc)

    def deviation_log(self) -> list[DeviationRecord]:
        return [DeviationRecord.from_dict(d) for d in _read_lines(self.path / "deviations.jsonl")]

    def views(self, role: str | None, as_of: datetime) -> dict:
        vc, _, _ = self.catena()
        result = self.evaluate_at(as_of)
        out = []
        for vi in vc.top_level_views():
            if role and vi.role != role:
                continue
            view_result = result.views.get(vi.id)
            if view_result is None:
                continue
            out.append({
                "view-instance": vi.id,
                "role": vi.role,
                "status": view_result.status,
                "message": view_result.message,
                "payload": view_result.payload if view_result.status == "ok" else None,
            })
        return {"as-of": format_timestamp(as_of), "views": out}

    def checks(self, as_of: datetime) -> CheckReport:
        """Re-run every check on demand: static validation plus a fresh
        evaluation's data/computation/render statuses."""
        vc, repo, _ = self.catena()
        report = CheckReport()
        report.merge(validate_repository(repo))
        report.merge(validate_catena(vc, repo))
        result = self.evaluate_at(as_of)
        report.merge(result.checks)
        store = self.store()
        for status in collection_status(vc, store, as_of):
            report.add(f"collection:{status.entry}", CheckKind.DATA_READABLE,
                       not status.is_overdue,
                       "" if not status.is_overdue else
                       f"collection overdue for {len(status.overdue)} due timestamp(s)")
        return report

    def run_retrospective(self, events: list[GroundTruthEvent]) -> RetrospectiveReport:
        return retrospective(self.deviation_log(), events)

    def evaluations_index(self) -> list[dict]:
        out = []
        for path in sorted((self.path / "evaluations").glob("*.json")):
            doc = json.loads(path.read_text(encoding="utf-8"))
            out.append({"fingerprint": path.stem, "as-of": doc.get("as-of"),
                        "provenance": doc.get("provenance")})
        return out

    def evaluation_document(self, fingerprint: str) -> dict:
        path = self.path / "evaluations" / f"{fingerprint}.json"
        if not path.exists() or not fingerprint.isalnum():
            raise not_found(f"unknown evaluation {fingerprint!r}")
        return json.loads(path.read_text(encoding="utf-8"))

    def form_descriptors(self) -> list[dict]:
        """Everything a client needs to render manual data-entry forms."""
        vc, repo, _ = self.catena()
        store = self.store()
        out = []
        for wfi_id, wfi in sorted(vc.web_form_instances.items()):
            form = repo.web_forms.get(wfi.form)
            entry = vc.data_entries.get(wfi.target_data_entry)
            if form is None or entry is None:
                continue
            dtype = repo.data_types.get(entry.data_type)
            slot_data = {}
            for slot_name, bound_entry in sorted(wfi.slot_bindings.items()):
                bound = vc.data_entries.get(bound_entry)
                if bound is None:
                    continue
                bound_type = repo.data_types.get(bound.data_type)
                if bound_type is None:
                    continue
                records = store.effective_records(bound_entry, bound_type) or []
                slot_data[slot_name] = {"entry": bound_entry, "records": records}
            out.append({
                "instance": wfi_id,
                "form": form.to_dict(),
                "target-entry": entry.id,
                "schema": dtype.to_dict() if dtype else None,
                "capabilities": list(form.capabilities),
                "slot-data": slot_data,
            })
        return out

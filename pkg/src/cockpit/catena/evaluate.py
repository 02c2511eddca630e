"""Catena evaluation: execute function instances, materialize view payloads.

Evaluation is a pure function of the catena and the store content at the
cut time.  A failing function instance skips only its downstream cone;
everything else keeps rendering.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Callable

from cockpit.catena.instances import (
    FunctionInstance,
    ProducerRef,
    ViewInstance,
    VisualizationCatena,
    iter_refs,
)
from cockpit.catena.report import CheckItem, CheckKind, CheckReport
from cockpit.catena.retrospective import DeviationRecord
from cockpit.catena.store import ProjectDataStore
from cockpit.catena.types import ComponentRepository, DataTypeDef, FunctionDef, validate_records
from cockpit.catena.validate import evaluation_order
from cockpit.interchange import format_timestamp
from cockpit.status import Status


@dataclass
class PayloadValue:
    """Records flowing between components, tagged with their data type."""

    data_type: str
    records: list[dict]

    def to_dict(self) -> dict:
        return {"data-type": self.data_type, "records": self.records}


@dataclass
class TimedPayload:
    """One timestamped content version (multiplicity-many slots)."""

    timestamp: datetime | None
    data_type: str
    records: list[dict]


class EvaluationError(RuntimeError):
    """Raised by function implementations on unrecoverable input problems."""


class ExecutionContext:
    """What a function implementation sees: inputs, parameters, the cut time."""

    def __init__(self, instance: FunctionInstance, definition: FunctionDef,
                 inputs: dict[str, Any], parameters: dict[str, Any], as_of: datetime):
        self.instance = instance
        self.definition = definition
        self.as_of = as_of
        self._inputs = inputs
        self._parameters = parameters
        self.deviations: list[dict] = []

    def input(self, slot: str) -> Any:
        """PayloadValue, list of PayloadValue/TimedPayload, or None when unbound."""
        return self._inputs.get(slot)

    def records(self, slot: str) -> list[dict]:
        value = self._inputs.get(slot)
        if value is None:
            raise EvaluationError(f"missing mandatory payload for slot {slot!r}")
        if isinstance(value, PayloadValue):
            return value.records
        raise EvaluationError(f"slot {slot!r} holds a multi-payload binding")

    def param(self, name: str) -> Any:
        return self._parameters.get(name)

    def report(self, subject: str, kind: str, severity: Status,
               data_as_of: datetime | None = None) -> None:
        """Raise a deviation; the engine stamps raised-at with the cut time."""
        self.deviations.append({
            "subject": subject,
            "kind": kind,
            "severity": severity,
            "data-as-of": data_as_of or self.as_of,
        })


FunctionImpl = Callable[[ExecutionContext], "dict[str, list[dict]]"]


class FunctionRegistry:
    """Executable implementations keyed by function definition id."""

    def __init__(self) -> None:
        self._impls: dict[str, FunctionImpl] = {}

    def register(self, function_id: str, impl: FunctionImpl) -> None:
        self._impls[function_id] = impl

    def get(self, function_id: str) -> FunctionImpl | None:
        return self._impls.get(function_id)


@dataclass
class FunctionResult:
    status: str  # "ok" | "failed" | "skipped"
    outputs: dict[str, PayloadValue] = field(default_factory=dict)
    message: str = ""

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "outputs": {name: value.to_dict() for name, value in sorted(self.outputs.items())},
            "message": self.message,
        }


@dataclass
class ViewResult:
    status: str  # "ok" | "skipped" | "failed"
    payload: dict = field(default_factory=dict)
    message: str = ""

    def to_dict(self) -> dict:
        return {"status": self.status, "payload": self.payload, "message": self.message}


@dataclass
class EvaluationResult:
    as_of: datetime
    provenance: str
    functions: dict[str, FunctionResult] = field(default_factory=dict)
    views: dict[str, ViewResult] = field(default_factory=dict)
    deviations: list[DeviationRecord] = field(default_factory=list)
    checks: CheckReport = field(default_factory=CheckReport)

    def to_dict(self) -> dict:
        return {
            "format": "evaluation-result/1",
            "as-of": format_timestamp(self.as_of),
            "provenance": self.provenance,
            "functions": {fid: res.to_dict() for fid, res in sorted(self.functions.items())},
            "views": {vid: res.to_dict() for vid, res in sorted(self.views.items())},
            "deviations": [d.to_dict() for d in self.deviations],
            "checks": self.checks.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EvaluationResult":
        from cockpit.interchange import parse_timestamp

        result = cls(as_of=parse_timestamp(data["as-of"]), provenance=data.get("provenance", ""))
        for fid, res in data.get("functions", {}).items():
            outputs = {name: PayloadValue(out["data-type"], out["records"])
                       for name, out in res.get("outputs", {}).items()}
            result.functions[fid] = FunctionResult(res["status"], outputs, res.get("message", ""))
        for vid, res in data.get("views", {}).items():
            result.views[vid] = ViewResult(res["status"], res.get("payload", {}), res.get("message", ""))
        result.deviations = [DeviationRecord.from_dict(d) for d in data.get("deviations", [])]
        result.checks = CheckReport.from_dict(data.get("checks", {}))
        return result


def evaluate(vc: VisualizationCatena, repo: ComponentRepository, store: ProjectDataStore,
             as_of: datetime, registry: FunctionRegistry) -> EvaluationResult:
    """Run every function instance in dependency order, then build views.

    Only payloads timestamped at or before ``as_of`` influence the result.
    """
    result = EvaluationResult(as_of=as_of, provenance=vc.provenance)

    entry_content: dict[str, PayloadValue | None] = {}
    for eid, entry in sorted(vc.data_entries.items()):
        dtype = repo.data_types.get(entry.data_type)
        if dtype is None:
            entry_content[eid] = None
            result.checks.add(eid, CheckKind.DATA_READABLE, False,
                              f"unknown data type {entry.data_type!r}")
            continue
        records = store.effective_records(eid, dtype, as_of)
        if records is None:
            entry_content[eid] = None
            result.checks.add(eid, CheckKind.DATA_READABLE, True, "no payload collected yet")
            continue
        accepted, rejects = validate_records(dtype, records, eid)
        if rejects:
            entry_content[eid] = None
            result.checks.add(eid, CheckKind.DATA_READABLE, False, rejects[0])
        else:
            entry_content[eid] = PayloadValue(entry.data_type, accepted)
            result.checks.add(eid, CheckKind.DATA_READABLE, True, "")

    def resolve(ref: ProducerRef, many: bool) -> Any:
        """Resolve one producer reference; None when content is unavailable."""
        if ref.entry:
            entry = vc.data_entries.get(ref.entry)
            if entry is None:
                return None
            dtype = repo.data_types.get(entry.data_type)
            if dtype is None:
                return None
            if many:
                versions = store.versions(ref.entry, as_of, dtype)
                if not versions:
                    return None
                out = []
                for ts, records in versions:
                    accepted, rejects = validate_records(dtype, records, ref.entry)
                    if rejects:
                        return None
                    out.append(TimedPayload(ts, entry.data_type, accepted))
                return out
            return entry_content.get(ref.entry)
        fres = result.functions.get(ref.instance or "")
        if fres is None or fres.status != "ok":
            return None
        fi = vc.function_instances[ref.instance]
        fdef = repo.functions.get(fi.function)
        name = ref.output or (fdef.primary_output.name if fdef and fdef.outputs else None)
        if name is None:
            return None
        value = fres.outputs.get(name)
        if value is None:
            return None
        if many:
            return [TimedPayload(None, value.data_type, value.records)]
        return value

    order = evaluation_order(vc)
    for fid in order:
        fi = vc.function_instances[fid]
        fdef = repo.functions.get(fi.function)
        if fdef is None:
            result.functions[fid] = FunctionResult("failed", message=f"unknown function {fi.function!r}")
            result.checks.add(fid, CheckKind.COMPUTABLE, False, f"unknown function {fi.function!r}")
            continue
        impl = registry.get(fi.function)
        if impl is None:
            result.functions[fid] = FunctionResult(
                "failed", message=f"no implementation registered for {fi.function!r}")
            result.checks.add(fid, CheckKind.COMPUTABLE, False,
                              f"no implementation registered for {fi.function!r}")
            continue

        upstream_failed = ""
        inputs: dict[str, Any] = {}
        missing = ""
        for slot in fdef.input_slots:
            bound = fi.slot_bindings.get(slot.name)
            refs = bound if isinstance(bound, list) else [bound] if bound else []
            for ref in refs:
                if ref.instance and result.functions.get(ref.instance) is not None \
                        and result.functions[ref.instance].status != "ok":
                    upstream_failed = ref.instance
            if not refs:
                if slot.mandatory:
                    missing = missing or f"mandatory input slot {slot.name!r} is not bound"
                continue
            if slot.multiplicity == "many":
                gathered: list[Any] = []
                unavailable = False
                for ref in refs:
                    value = resolve(ref, many=True)
                    if value is None:
                        unavailable = True
                    else:
                        gathered.extend(value)
                if unavailable and slot.mandatory and not gathered:
                    missing = missing or f"missing mandatory payload for slot {slot.name!r}"
                inputs[slot.name] = gathered if gathered else None
            else:
                value = resolve(refs[0], many=False)
                if value is None and slot.mandatory:
                    missing = missing or f"missing mandatory payload for slot {slot.name!r}"
                inputs[slot.name] = value

        if upstream_failed:
            result.functions[fid] = FunctionResult(
                "skipped", message=f"upstream instance {upstream_failed!r} did not complete")
            result.checks.add(fid, CheckKind.COMPUTABLE, True,
                              f"skipped: upstream {upstream_failed!r} did not complete")
            continue
        if missing:
            result.functions[fid] = FunctionResult("failed", message=missing)
            result.checks.add(fid, CheckKind.COMPUTABLE, False, missing)
            continue

        parameters = {p.name: p.default for p in fdef.parameters if not p.mandatory}
        parameters.update(fi.parameter_bindings)
        ctx = ExecutionContext(fi, fdef, inputs, parameters, as_of)
        try:
            raw_outputs = impl(ctx)
        except EvaluationError as exc:
            result.functions[fid] = FunctionResult("failed", message=str(exc))
            result.checks.add(fid, CheckKind.COMPUTABLE, False, str(exc))
            continue
        outputs = {}
        for odef in fdef.outputs:
            records = raw_outputs.get(odef.name, [])
            outputs[odef.name] = PayloadValue(odef.data_type, records)
        result.functions[fid] = FunctionResult("ok", outputs)
        result.checks.add(fid, CheckKind.COMPUTABLE, True, "")
        for dev in ctx.deviations:
            result.deviations.append(DeviationRecord(
                id="",
                source=fid,
                subject=dev["subject"],
                kind=dev["kind"],
                severity=dev["severity"],
                raised_at=as_of,
                data_as_of=dev["data-as-of"],
            ).with_derived_id())

    result.deviations.sort(key=lambda d: (d.kind, d.subject, d.data_as_of, d.id))

    upstream_sources = _upstream_sources(vc)
    deviations_by_source: dict[str, list[str]] = {}
    for dev in result.deviations:
        deviations_by_source.setdefault(dev.source, []).append(dev.id)

    # Views render leaves-first so composites can embed children payloads.
    view_order = _view_order(vc)
    for vid in view_order:
        vi = vc.view_instances[vid]
        vdef = repo.views.get(vi.view)
        if vdef is None:
            result.views[vid] = ViewResult("failed", message=f"unknown view {vi.view!r}")
            result.checks.add(vid, CheckKind.RENDERABLE, False, f"unknown view {vi.view!r}")
            continue
        inputs: dict[str, Any] = {}
        skipped = ""
        for slot in vdef.input_slots:
            bound = vi.slot_bindings.get(slot.name)
            refs = bound if isinstance(bound, list) else [bound] if bound else []
            values = []
            for ref in refs:
                if ref.instance and result.functions.get(ref.instance) is not None \
                        and result.functions[ref.instance].status != "ok":
                    skipped = skipped or f"producer {ref.instance!r} did not complete"
                    continue
                value = resolve(ref, many=False)
                if value is not None:
                    values.append(value)
            if not values and refs and not skipped and slot.mandatory:
                skipped = f"no payload available for slot {slot.name!r}"
            if not values and not refs and slot.mandatory:
                skipped = skipped or f"mandatory input slot {slot.name!r} is not bound"
            inputs[slot.name] = values
        if skipped:
            result.views[vid] = ViewResult("skipped", message=skipped)
            result.checks.add(vid, CheckKind.RENDERABLE, True, f"skipped: {skipped}")
            continue
        flags = sorted({fid for src in upstream_sources.get(vid, set())
                        for fid in deviations_by_source.get(src, [])})
        try:
            payload = _materialize(vdef, vi, inputs, repo, result, flags)
        except Exception as exc:  # materialization must never halt evaluation
            result.views[vid] = ViewResult("failed", message=str(exc))
            result.checks.add(vid, CheckKind.RENDERABLE, False, str(exc))
            continue
        result.views[vid] = ViewResult("ok", payload)
        result.checks.add(vid, CheckKind.RENDERABLE, True, "")

    return result


def _view_order(vc: VisualizationCatena) -> list[str]:
    """Children before parents, deterministic."""
    from cockpit.catena.validate import topological_order

    edges = [(sub, vid) for vid, vi in sorted(vc.view_instances.items())
             for sub in vi.sub_views if sub in vc.view_instances]
    return topological_order(vc.view_instances.keys(), edges)


def _upstream_sources(vc: VisualizationCatena) -> dict[str, set[str]]:
    """Transitive function-instance producers for every view instance."""
    fn_upstream: dict[str, set[str]] = {}
    try:
        order = evaluation_order(vc)
    except Exception:
        order = sorted(vc.function_instances)
    for fid in order:
        fi = vc.function_instances[fid]
        ups = {fid}
        for _, ref in iter_refs(fi.slot_bindings):
            if ref.instance and ref.instance in fn_upstream:
                ups |= fn_upstream[ref.instance]
        fn_upstream[fid] = ups
    view_upstream: dict[str, set[str]] = {}
    for vid, vi in sorted(vc.view_instances.items()):
        ups: set[str] = set()
        for _, ref in iter_refs(vi.slot_bindings):
            if ref.instance:
                ups |= fn_upstream.get(ref.instance, {ref.instance})
        view_upstream[vid] = ups
    for vid, vi in sorted(vc.view_instances.items()):
        stack = list(vi.sub_views)
        while stack:
            sub = stack.pop()
            view_upstream[vid] = view_upstream.get(vid, set()) | view_upstream.get(sub, set())
            stack.extend(vc.view_instances[sub].sub_views if sub in vc.view_instances else [])
    return view_upstream


_NUMERIC_TYPES = ("duration-hours", "money", "count", "fraction")


def _materialize(vdef, vi: ViewInstance, inputs: dict[str, list[PayloadValue]],
                 repo: ComponentRepository, result: EvaluationResult,
                 deviation_flags: list[str]) -> dict:
    params = {p.name: p.default for p in vdef.parameters if not p.mandatory}
    params.update(vi.parameter_bindings)
    payload: dict = {
        "view-instance": vi.id,
        "render-kind": vdef.render_kind,
        "role": vi.role,
        "parameters": {k: v for k, v in sorted(params.items()) if v is not None},
        "deviations": deviation_flags,
    }
    values = [v for vals in inputs.values() for v in vals]
    if vdef.render_kind in ("line-chart", "bar-chart"):
        payload["series"] = _chart_series(values, params, repo)
    elif vdef.render_kind == "table":
        columns, rows = _table_data(values, params, repo)
        payload["columns"] = columns
        payload["rows"] = rows
    elif vdef.render_kind == "traffic-light":
        payload.update(_traffic_light(values))
    elif vdef.render_kind == "milestone-trend-chart":
        payload["series"] = _milestone_series(values)
    elif vdef.render_kind == "composite":
        children = []
        for sub in vi.sub_views:
            sub_result = result.views.get(sub)
            children.append({
                "view-instance": sub,
                "status": sub_result.status if sub_result else "missing",
                "payload": sub_result.payload if sub_result and sub_result.status == "ok" else None,
            })
        payload["children"] = children
    return payload


def _schema_for(value: PayloadValue, repo: ComponentRepository) -> DataTypeDef | None:
    return repo.data_types.get(value.data_type)


def _chart_series(values: list[PayloadValue], params: dict, repo: ComponentRepository) -> list[dict]:
    series: list[dict] = []
    for value in values:
        dtype = _schema_for(value, repo)
        x_field = params.get("x-field") or _first_field(dtype, ("timestamp",)) or "timestamp"
        group_field = params.get("group-field")
        if group_field is None:
            group_field = _first_field(dtype, ("identifier",), exclude=(x_field,)) or ""
        y_fields = params.get("y-fields") or _numeric_fields(dtype, exclude=(x_field, group_field))
        groups: dict[str, dict[str, list]] = {}
        for rec in value.records:
            x = rec.get(x_field)
            if x is None:
                continue
            gkey = str(rec.get(group_field, "")) if group_field else ""
            for yf in y_fields:
                y = rec.get(yf)
                if y is None or isinstance(y, str):
                    continue
                name = f"{gkey}:{yf}" if gkey else yf
                groups.setdefault(name, {"points": []})["points"].append([x, y])
        for name in sorted(groups):
            points = sorted(groups[name]["points"], key=lambda p: str(p[0]))
            series.append({"name": name, "points": points})
    return series


def _table_data(values: list[PayloadValue], params: dict,
                repo: ComponentRepository) -> tuple[list[str], list[list]]:
    columns: list[str] = list(params.get("columns") or [])
    rows: list[list] = []
    for value in values:
        dtype = _schema_for(value, repo)
        if not columns:
            if dtype is not None:
                columns = [f.name for f in dtype.schema]
            elif value.records:
                columns = sorted(value.records[0].keys())
        for rec in value.records:
            rows.append([rec.get(col) for col in columns])
    return columns, rows


def _traffic_light(values: list[PayloadValue]) -> dict:
    status = None
    score = None
    label = ""
    for value in values:
        for rec in value.records:
            if "status" in rec:
                try:
                    rec_status = Status.from_value(rec["status"])
                except ValueError:
                    continue
                if status is None or rec_status.severity > status.severity:
                    status = rec_status
                    score = rec.get("score")
                    label = str(rec.get("label", ""))
    return {
        "status": (status or Status.GREEN).value if values else None,
        "score": score,
        "label": label,
    }


def _milestone_series(values: list[PayloadValue]) -> list[dict]:
    groups: dict[str, dict] = {}
    for value in values:
        for rec in value.records:
            mid = rec.get("milestone-id")
            if mid is None:
                continue
            group = groups.setdefault(str(mid), {"milestone-id": str(mid), "points": [],
                                                 "classification": None})
            if "report-date" in rec and "predicted-date" in rec:
                group["points"].append([rec["report-date"], rec["predicted-date"]])
            if rec.get("classification"):
                group["classification"] = rec["classification"]
    out = []
    for mid in sorted(groups):
        group = groups[mid]
        group["points"] = sorted(group["points"], key=lambda p: str(p[0]))
        out.append(group)
    return out


def _first_field(dtype: DataTypeDef | None, types: tuple[str, ...],
                 exclude: tuple[str, ...] = ()) -> str | None:
    if dtype is None:
        return None
    for f in dtype.schema:
        if f.type in types and f.name not in exclude:
            return f.name
    return None


def _numeric_fields(dtype: DataTypeDef | None, exclude: tuple[str, ...] = ()) -> list[str]:
    if dtype is None:
        return []
    return [f.name for f in dtype.schema if f.type in _NUMERIC_TYPES and f.name not in exclude]

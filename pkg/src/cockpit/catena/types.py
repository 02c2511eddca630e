"""Type-level control components: the reusable building blocks.

Five component families live in a repository and are instantiated into a
visualization catena: data types, data-access-object packages, web forms,
processing functions, and views.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from cockpit.catena.report import CheckKind, CheckReport
from cockpit.interchange import (
    StructuralError,
    expect_list,
    expect_object,
    get_string,
    normalize_timestamp,
)

SCALAR_TYPES = ("timestamp", "duration-hours", "money", "count", "fraction", "text", "identifier")

DATA_KINDS = ("time-series", "project-plan", "effort-log", "defect-log",
              "quality-report", "scalar", "table")

RENDER_KINDS = ("line-chart", "bar-chart", "table", "traffic-light",
                "milestone-trend-chart", "composite")

# Data types whose payload history is replayed as an append-only log; all
# other kinds supersede (the latest payload is the current content).
_LOG_KINDS = ("time-series", "effort-log", "defect-log")


class DaoMode(str, Enum):
    READ = "read"
    WRITE = "write"
    UPDATE = "update"


@dataclass
class FieldDef:
    name: str
    type: str
    optional: bool = False

    def to_dict(self) -> dict:
        return {"name": self.name, "type": self.type, "optional": self.optional}

    @classmethod
    def from_dict(cls, data: Any, path: str) -> "FieldDef":
        obj = expect_object(data, path)
        ftype = get_string(obj, "type", path)
        if ftype not in SCALAR_TYPES:
            raise StructuralError(f"{path}.type", f"unknown scalar type {ftype!r}")
        return cls(name=get_string(obj, "name", path), type=ftype,
                   optional=bool(obj.get("optional", False)))


@dataclass
class MatchTag:
    """(measured object, quality attribute) pair used for component matching."""

    object: str
    quality_attribute: str

    def to_dict(self) -> dict:
        return {"object": self.object, "quality-attribute": self.quality_attribute}

    @classmethod
    def from_dict(cls, data: Any, path: str) -> "MatchTag":
        obj = expect_object(data, path)
        return cls(object=get_string(obj, "object", path),
                   quality_attribute=get_string(obj, "quality-attribute", path))

    def matches(self, obj: str, quality: str) -> bool:
        return (self.object in ("*", obj)) and (self.quality_attribute in ("*", quality))


@dataclass
class DataTypeDef:
    """Structure of data flowing through the catena."""

    id: str
    kind: str
    schema: list[FieldDef]
    version: int = 1
    tags: list[MatchTag] = field(default_factory=list)
    accumulation: str = ""  # "snapshot" | "log"; defaulted from kind when empty

    def __post_init__(self) -> None:
        if self.kind not in DATA_KINDS:
            raise StructuralError(f"data-type {self.id}.kind", f"unknown kind {self.kind!r}")
        names = [f.name for f in self.schema]
        if len(names) != len(set(names)):
            raise StructuralError(f"data-type {self.id}.schema", "field names must be unique")
        if not self.accumulation:
            self.accumulation = "log" if self.kind in _LOG_KINDS else "snapshot"
        if self.accumulation not in ("snapshot", "log"):
            raise StructuralError(f"data-type {self.id}.accumulation",
                                  f"expected snapshot|log, got {self.accumulation!r}")

    def field_def(self, name: str) -> FieldDef | None:
        for f in self.schema:
            if f.name == name:
                return f
        return None

    def invariant_items(self, report: CheckReport) -> None:
        if self.kind == "time-series":
            stamps = [f for f in self.schema if f.type == "timestamp" and not f.optional]
            values = [f for f in self.schema if f.type != "timestamp"]
            ok = len(stamps) == 1 and len(values) >= 1
            report.add(self.id, CheckKind.CONSISTENCY, ok,
                       "" if ok else "time-series needs exactly one timestamp field and at least one value field")
        if self.kind == "project-plan":
            needed = {"parent-id", "start", "end", "effort-baseline-hours"}
            have = {f.name for f in self.schema}
            missing = sorted(needed - have)
            report.add(self.id, CheckKind.CONSISTENCY, not missing,
                       "" if not missing else f"project-plan schema missing fields: {', '.join(missing)}")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "version": self.version,
            "schema": [f.to_dict() for f in self.schema],
            "tags": [t.to_dict() for t in self.tags],
            "accumulation": self.accumulation,
        }

    @classmethod
    def from_dict(cls, data: Any, path: str = "data-type") -> "DataTypeDef":
        obj = expect_object(data, path)
        tid = get_string(obj, "id", path)
        return cls(
            id=tid,
            kind=get_string(obj, "kind", path),
            version=int(obj.get("version", 1)),
            schema=[FieldDef.from_dict(f, f"{path}.schema[{i}]")
                    for i, f in enumerate(expect_list(obj.get("schema", []), f"{path}.schema"))],
            tags=[MatchTag.from_dict(t, f"{path}.tags[{i}]")
                  for i, t in enumerate(expect_list(obj.get("tags", []), f"{path}.tags"))],
            accumulation=str(obj.get("accumulation", "")),
        )


@dataclass
class ParameterDef:
    name: str
    type: str = "text"
    mandatory: bool = False
    default: Any = None

    def to_dict(self) -> dict:
        out: dict = {"name": self.name, "type": self.type, "mandatory": self.mandatory}
        if not self.mandatory:
            out["default"] = self.default
        return out

    @classmethod
    def from_dict(cls, data: Any, path: str) -> "ParameterDef":
        obj = expect_object(data, path)
        return cls(name=get_string(obj, "name", path),
                   type=str(obj.get("type", "text")),
                   mandatory=bool(obj.get("mandatory", False)),
                   default=obj.get("default"))


def _parameter_items(subject: str, params: list[ParameterDef], report: CheckReport) -> None:
    names = [p.name for p in params]
    if len(names) != len(set(names)):
        report.add(subject, CheckKind.CONSISTENCY, False, "parameter names must be unique")
    for p in params:
        if p.mandatory and p.default is not None:
            report.add(subject, CheckKind.CONSISTENCY, False,
                       f"mandatory parameter {p.name!r} must not carry a default")


@dataclass
class SlotDef:
    name: str
    data_type: str  # DataTypeDef id, "kind:<kind>", or "*"
    mandatory: bool = True
    multiplicity: str = "one"  # "one" | "many"

    def to_dict(self) -> dict:
        return {"slot-name": self.name, "data-type": self.data_type,
                "mandatory": self.mandatory, "multiplicity": self.multiplicity}

    @classmethod
    def from_dict(cls, data: Any, path: str) -> "SlotDef":
        obj = expect_object(data, path)
        mult = str(obj.get("multiplicity", "one"))
        if mult not in ("one", "many"):
            raise StructuralError(f"{path}.multiplicity", f"expected one|many, got {mult!r}")
        return cls(name=get_string(obj, "slot-name", path),
                   data_type=get_string(obj, "data-type", path),
                   mandatory=bool(obj.get("mandatory", True)),
                   multiplicity=mult)


@dataclass
class OutputDef:
    name: str
    data_type: str

    def to_dict(self) -> dict:
        return {"output-name": self.name, "data-type": self.data_type}

    @classmethod
    def from_dict(cls, data: Any, path: str) -> "OutputDef":
        obj = expect_object(data, path)
        return cls(name=get_string(obj, "output-name", path),
                   data_type=get_string(obj, "data-type", path))


@dataclass
class DaoPackageDef:
    """A way of accessing one data type from a concrete source kind."""

    id: str
    supported_data_type: str  # DataTypeDef id or "*"
    mode: DaoMode = DaoMode.READ
    parameters: list[ParameterDef] = field(default_factory=list)

    def invariant_items(self, report: CheckReport) -> None:
        _parameter_items(self.id, self.parameters, report)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "supported-data-type": self.supported_data_type,
            "mode": self.mode.value,
            "parameters": [p.to_dict() for p in self.parameters],
        }

    @classmethod
    def from_dict(cls, data: Any, path: str = "dao-package") -> "DaoPackageDef":
        obj = expect_object(data, path)
        mode = str(obj.get("mode", "read"))
        try:
            dao_mode = DaoMode(mode)
        except ValueError:
            raise StructuralError(f"{path}.mode", f"expected read|write|update, got {mode!r}") from None
        return cls(
            id=get_string(obj, "id", path),
            supported_data_type=get_string(obj, "supported-data-type", path),
            mode=dao_mode,
            parameters=[ParameterDef.from_dict(p, f"{path}.parameters[{i}]")
                        for i, p in enumerate(expect_list(obj.get("parameters", []), f"{path}.parameters"))],
        )


@dataclass
class WebFormDef:
    """Manual management of measurement data for exactly one data type."""

    id: str
    managed_data_type: str
    input_slots: list[SlotDef] = field(default_factory=list)
    capabilities: list[str] = field(default_factory=lambda: ["add"])
    parameters: list[ParameterDef] = field(default_factory=list)

    def invariant_items(self, report: CheckReport) -> None:
        bad = sorted(set(self.capabilities) - {"add", "change", "remove"})
        if bad:
            report.add(self.id, CheckKind.CONSISTENCY, False,
                       f"unknown capabilities: {', '.join(bad)}")
        names = [s.name for s in self.input_slots]
        if len(names) != len(set(names)):
            report.add(self.id, CheckKind.CONSISTENCY, False, "input slot names must be unique")
        _parameter_items(self.id, self.parameters, report)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "managed-data-type": self.managed_data_type,
            "input-slots": [s.to_dict() for s in self.input_slots],
            "capabilities": list(self.capabilities),
            "parameters": [p.to_dict() for p in self.parameters],
        }

    @classmethod
    def from_dict(cls, data: Any, path: str = "web-form") -> "WebFormDef":
        obj = expect_object(data, path)
        return cls(
            id=get_string(obj, "id", path),
            managed_data_type=get_string(obj, "managed-data-type", path),
            input_slots=[SlotDef.from_dict(s, f"{path}.input-slots[{i}]")
                         for i, s in enumerate(expect_list(obj.get("input-slots", []), f"{path}.input-slots"))],
            capabilities=[str(c) for c in expect_list(obj.get("capabilities", ["add"]), f"{path}.capabilities")],
            parameters=[ParameterDef.from_dict(p, f"{path}.parameters[{i}]")
                        for i, p in enumerate(expect_list(obj.get("parameters", []), f"{path}.parameters"))],
        )


@dataclass
class FunctionDef:
    """A packaged control technique or method."""

    id: str
    input_slots: list[SlotDef]
    outputs: list[OutputDef]
    parameters: list[ParameterDef] = field(default_factory=list)
    capability_tags: list[MatchTag] = field(default_factory=list)

    def invariant_items(self, report: CheckReport) -> None:
        if not self.outputs:
            report.add(self.id, CheckKind.CONSISTENCY, False, "function must declare at least one output")
        slot_names = [s.name for s in self.input_slots]
        out_names = [o.name for o in self.outputs]
        if len(slot_names) != len(set(slot_names)):
            report.add(self.id, CheckKind.CONSISTENCY, False, "slot names must be unique")
        if len(out_names) != len(set(out_names)):
            report.add(self.id, CheckKind.CONSISTENCY, False, "output names must be unique")
        _parameter_items(self.id, self.parameters, report)

    def slot(self, name: str) -> SlotDef | None:
        for s in self.input_slots:
            if s.name == name:
                return s
        return None

    def output(self, name: str) -> OutputDef | None:
        for o in self.outputs:
            if o.name == name:
                return o
        return None

    @property
    def primary_output(self) -> OutputDef:
        return self.outputs[0]

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "input-slots": [s.to_dict() for s in self.input_slots],
            "outputs": [o.to_dict() for o in self.outputs],
            "parameters": [p.to_dict() for p in self.parameters],
            "capability-tags": [t.to_dict() for t in self.capability_tags],
        }

    @classmethod
    def from_dict(cls, data: Any, path: str = "function") -> "FunctionDef":
        obj = expect_object(data, path)
        return cls(
            id=get_string(obj, "id", path),
            input_slots=[SlotDef.from_dict(s, f"{path}.input-slots[{i}]")
                         for i, s in enumerate(expect_list(obj.get("input-slots", []), f"{path}.input-slots"))],
            outputs=[OutputDef.from_dict(o, f"{path}.outputs[{i}]")
                     for i, o in enumerate(expect_list(obj.get("outputs", []), f"{path}.outputs"))],
            parameters=[ParameterDef.from_dict(p, f"{path}.parameters[{i}]")
                        for i, p in enumerate(expect_list(obj.get("parameters", []), f"{path}.parameters"))],
            capability_tags=[MatchTag.from_dict(t, f"{path}.capability-tags[{i}]")
                             for i, t in enumerate(expect_list(obj.get("capability-tags", []), f"{path}.capability-tags"))],
        )


@dataclass
class ViewDef:
    """A way of presenting data; may nest other views."""

    id: str
    render_kind: str
    input_slots: list[SlotDef] = field(default_factory=list)
    sub_view_slots: list[str] = field(default_factory=list)
    parameters: list[ParameterDef] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.render_kind not in RENDER_KINDS:
            raise StructuralError(f"view {self.id}.render-kind",
                                  f"unknown render kind {self.render_kind!r}")

    def invariant_items(self, report: CheckReport) -> None:
        is_composite = self.render_kind == "composite"
        if is_composite != bool(self.sub_view_slots):
            report.add(self.id, CheckKind.CONSISTENCY, False,
                       "composite render kind exactly when sub-view slots are declared")
        names = [s.name for s in self.input_slots]
        if len(names) != len(set(names)):
            report.add(self.id, CheckKind.CONSISTENCY, False, "input slot names must be unique")
        _parameter_items(self.id, self.parameters, report)

    def slot(self, name: str) -> SlotDef | None:
        for s in self.input_slots:
            if s.name == name:
                return s
        return None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "render-kind": self.render_kind,
            "input-slots": [s.to_dict() for s in self.input_slots],
            "sub-view-slots": list(self.sub_view_slots),
            "parameters": [p.to_dict() for p in self.parameters],
        }

    @classmethod
    def from_dict(cls, data: Any, path: str = "view") -> "ViewDef":
        obj = expect_object(data, path)
        return cls(
            id=get_string(obj, "id", path),
            render_kind=get_string(obj, "render-kind", path),
            input_slots=[SlotDef.from_dict(s, f"{path}.input-slots[{i}]")
                         for i, s in enumerate(expect_list(obj.get("input-slots", []), f"{path}.input-slots"))],
            sub_view_slots=[str(s) for s in expect_list(obj.get("sub-view-slots", []), f"{path}.sub-view-slots")],
            parameters=[ParameterDef.from_dict(p, f"{path}.parameters[{i}]")
                        for i, p in enumerate(expect_list(obj.get("parameters", []), f"{path}.parameters"))],
        )


@dataclass
class ComponentRepository:
    """Catalog of reusable control components, addressable by id."""

    data_types: dict[str, DataTypeDef] = field(default_factory=dict)
    dao_packages: dict[str, DaoPackageDef] = field(default_factory=dict)
    web_forms: dict[str, WebFormDef] = field(default_factory=dict)
    functions: dict[str, FunctionDef] = field(default_factory=dict)
    views: dict[str, ViewDef] = field(default_factory=dict)

    def data_type(self, type_id: str) -> DataTypeDef | None:
        return self.data_types.get(type_id)

    def to_dict(self) -> dict:
        return {
            "format": "control-repository/1",
            "data-types": [d.to_dict() for d in sorted(self.data_types.values(), key=lambda d: d.id)],
            "dao-packages": [d.to_dict() for d in sorted(self.dao_packages.values(), key=lambda d: d.id)],
            "web-forms": [d.to_dict() for d in sorted(self.web_forms.values(), key=lambda d: d.id)],
            "functions": [d.to_dict() for d in sorted(self.functions.values(), key=lambda d: d.id)],
            "views": [d.to_dict() for d in sorted(self.views.values(), key=lambda d: d.id)],
        }

    @classmethod
    def from_dict(cls, data: Any, path: str = "repository") -> "ComponentRepository":
        obj = expect_object(data, path)
        repo = cls()
        for i, d in enumerate(expect_list(obj.get("data-types", []), f"{path}.data-types")):
            dt = DataTypeDef.from_dict(d, f"{path}.data-types[{i}]")
            repo.data_types[dt.id] = dt
        for i, d in enumerate(expect_list(obj.get("dao-packages", []), f"{path}.dao-packages")):
            dao = DaoPackageDef.from_dict(d, f"{path}.dao-packages[{i}]")
            repo.dao_packages[dao.id] = dao
        for i, d in enumerate(expect_list(obj.get("web-forms", []), f"{path}.web-forms")):
            wf = WebFormDef.from_dict(d, f"{path}.web-forms[{i}]")
            repo.web_forms[wf.id] = wf
        for i, d in enumerate(expect_list(obj.get("functions", []), f"{path}.functions")):
            fn = FunctionDef.from_dict(d, f"{path}.functions[{i}]")
            repo.functions[fn.id] = fn
        for i, d in enumerate(expect_list(obj.get("views", []), f"{path}.views")):
            vw = ViewDef.from_dict(d, f"{path}.views[{i}]")
            repo.views[vw.id] = vw
        return repo


def validate_repository(repo: ComponentRepository) -> CheckReport:
    """Check every component definition's declared invariants."""
    report = CheckReport()
    for dt in sorted(repo.data_types.values(), key=lambda d: d.id):
        dt.invariant_items(report)
    for dao in sorted(repo.dao_packages.values(), key=lambda d: d.id):
        dao.invariant_items(report)
        if dao.supported_data_type != "*" and dao.supported_data_type not in repo.data_types:
            report.add(dao.id, CheckKind.CONSISTENCY, False,
                       f"supported data type {dao.supported_data_type!r} is not in the repository")
    for wf in sorted(repo.web_forms.values(), key=lambda d: d.id):
        wf.invariant_items(report)
        if wf.managed_data_type not in repo.data_types:
            report.add(wf.id, CheckKind.CONSISTENCY, False,
                       f"managed data type {wf.managed_data_type!r} is not in the repository")
        for slot in wf.input_slots:
            if not _slot_type_known(slot.data_type, repo):
                report.add(wf.id, CheckKind.CONSISTENCY, False,
                           f"slot {slot.name!r} references unknown data type {slot.data_type!r}")
    for fn in sorted(repo.functions.values(), key=lambda d: d.id):
        fn.invariant_items(report)
        for slot in fn.input_slots:
            if not _slot_type_known(slot.data_type, repo):
                report.add(fn.id, CheckKind.CONSISTENCY, False,
                           f"slot {slot.name!r} references unknown data type {slot.data_type!r}")
        for out in fn.outputs:
            if out.data_type not in repo.data_types:
                report.add(fn.id, CheckKind.CONSISTENCY, False,
                           f"output {out.name!r} references unknown data type {out.data_type!r}")
    for vw in sorted(repo.views.values(), key=lambda d: d.id):
        vw.invariant_items(report)
        for slot in vw.input_slots:
            if not _slot_type_known(slot.data_type, repo):
                report.add(vw.id, CheckKind.CONSISTENCY, False,
                           f"slot {slot.name!r} references unknown data type {slot.data_type!r}")
    return report


def _slot_type_known(declared: str, repo: ComponentRepository) -> bool:
    if declared == "*":
        return True
    if declared.startswith("kind:"):
        return declared[5:] in DATA_KINDS
    return declared in repo.data_types


def type_compatible(declared: str, actual: DataTypeDef) -> bool:
    """Whether a produced data type satisfies a slot declaration.

    Slots may name a concrete data type id, a kind pattern (``kind:table``),
    or accept anything (``*``).
    """
    if declared == "*":
        return True
    if declared.startswith("kind:"):
        return actual.kind == declared[5:]
    return actual.id == declared


def coerce_value(ftype: str, value: Any, path: str) -> Any:
    """Coerce one scalar to its canonical JSON form; raises StructuralError."""
    if value is None:
        raise StructuralError(path, "value is missing")
    if ftype == "timestamp":
        return normalize_timestamp(value, path)
    if ftype == "text":
        return str(value)
    if ftype == "identifier":
        text = str(value).strip()
        if not text:
            raise StructuralError(path, "identifier must be non-empty")
        return text
    if ftype in ("duration-hours", "money", "fraction"):
        try:
            num = float(value)
        except (TypeError, ValueError):
            raise StructuralError(path, f"expected number, got {value!r}") from None
        if math.isnan(num) or math.isinf(num):
            raise StructuralError(path, f"expected finite number, got {value!r}")
        if ftype == "duration-hours" and num < 0:
            raise StructuralError(path, f"hours must be non-negative, got {num}")
        return num
    if ftype == "count":
        if isinstance(value, bool):
            return int(value)
        if isinstance(value, str):
            low = value.strip().lower()
            if low in ("true", "yes"):
                return 1
            if low in ("false", "no"):
                return 0
            value = low
        try:
            num = float(value)
        except (TypeError, ValueError):
            raise StructuralError(path, f"expected count, got {value!r}") from None
        if math.isnan(num) or math.isinf(num) or num < 0 or num != int(num):
            raise StructuralError(path, f"expected non-negative integer, got {value!r}")
        return int(num)
    raise StructuralError(path, f"unknown scalar type {ftype!r}")


def validate_record(data_type: DataTypeDef, record: Any, path: str = "record") -> dict:
    """Validate and coerce one record against a data type schema.

    Returns the coerced record; raises StructuralError naming the first
    offending field.  Unknown fields are preserved verbatim.
    """
    obj = expect_object(record, path)
    out: dict = {}
    for fdef in data_type.schema:
        value = obj.get(fdef.name)
        if value is None or value == "":
            if fdef.optional:
                continue
            raise StructuralError(f"{path}.{fdef.name}", "missing mandatory field")
        out[fdef.name] = coerce_value(fdef.type, value, f"{path}.{fdef.name}")
    known = {f.name for f in data_type.schema}
    for key in sorted(obj.keys()):
        if key not in known:
            out[key] = obj[key]
    return out


def validate_records(data_type: DataTypeDef, records: list, path: str = "records") -> tuple[list[dict], list[str]]:
    """Validate a record batch; returns (accepted, rejection messages)."""
    accepted: list[dict] = []
    rejected: list[str] = []
    for i, rec in enumerate(records):
        try:
            accepted.append(validate_record(data_type, rec, f"{path}[{i}]"))
        except StructuralError as exc:
            rejected.append(str(exc))
    return accepted, rejected

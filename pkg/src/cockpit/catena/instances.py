"""Instance-level components wired together into a visualization catena."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timedelta
from typing import Any

from cockpit.interchange import (
    StructuralError,
    expect_list,
    expect_object,
    format_duration,
    format_timestamp,
    get_string,
    parse_duration,
    parse_timestamp,
)


@dataclass
class ProducerRef:
    """Reference to the producer bound into a slot.

    Either a data entry or a named output of a function instance.
    """

    entry: str | None = None
    instance: str | None = None
    output: str | None = None

    def __post_init__(self) -> None:
        if bool(self.entry) == bool(self.instance):
            raise StructuralError("producer", "exactly one of entry or instance must be set")

    @property
    def key(self) -> str:
        if self.entry:
            return f"entry:{self.entry}"
        return f"instance:{self.instance}:{self.output or ''}"

    def to_dict(self) -> dict:
        if self.entry:
            return {"entry": self.entry}
        out: dict = {"instance": self.instance}
        if self.output:
            out["output"] = self.output
        return out

    @classmethod
    def from_dict(cls, data: Any, path: str) -> "ProducerRef":
        if isinstance(data, str):
            # Shorthand: a bare string names a data entry.
            return cls(entry=data)
        obj = expect_object(data, path)
        if "entry" in obj:
            return cls(entry=get_string(obj, "entry", path))
        if "instance" in obj:
            return cls(instance=get_string(obj, "instance", path),
                       output=str(obj["output"]) if obj.get("output") else None)
        raise StructuralError(path, "producer must name an entry or an instance")


Bindings = dict[str, "ProducerRef | list[ProducerRef]"]


def _bindings_to_dict(bindings: Bindings) -> dict:
    out: dict = {}
    for name in sorted(bindings):
        value = bindings[name]
        if isinstance(value, list):
            out[name] = [ref.to_dict() for ref in value]
        else:
            out[name] = value.to_dict()
    return out


def _bindings_from_dict(data: Any, path: str) -> Bindings:
    obj = expect_object(data, path)
    out: Bindings = {}
    for name, value in obj.items():
        if isinstance(value, list):
            out[name] = [ProducerRef.from_dict(v, f"{path}.{name}[{i}]") for i, v in enumerate(value)]
        else:
            out[name] = ProducerRef.from_dict(value, f"{path}.{name}")
    return out


def iter_refs(bindings: Bindings):
    for name in sorted(bindings):
        value = bindings[name]
        if isinstance(value, list):
            for ref in value:
                yield name, ref
        else:
            yield name, value


@dataclass
class Schedule:
    start: datetime
    end: datetime
    interval: timedelta

    def to_dict(self) -> dict:
        return {
            "start": format_timestamp(self.start),
            "end": format_timestamp(self.end),
            "interval": format_duration(self.interval),
        }

    @classmethod
    def from_dict(cls, data: Any, path: str) -> "Schedule":
        obj = expect_object(data, path)
        return cls(
            start=parse_timestamp(obj.get("start"), f"{path}.start"),
            end=parse_timestamp(obj.get("end"), f"{path}.end"),
            interval=parse_duration(obj.get("interval"), f"{path}.interval"),
        )


@dataclass
class DaoConfig:
    """A data-access-object package bound to concrete parameters."""

    package: str
    parameters: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"package": self.package, "parameters": dict(sorted(self.parameters.items()))}

    @classmethod
    def from_dict(cls, data: Any, path: str) -> "DaoConfig":
        obj = expect_object(data, path)
        return cls(package=get_string(obj, "package", path),
                   parameters=dict(expect_object(obj.get("parameters", {}), f"{path}.parameters")))


@dataclass
class DataEntry:
    """Concrete measurement data managed by the cockpit."""

    id: str
    data_type: str
    origin: str  # "external" | "manual"
    schedule: Schedule
    active_dao: DaoConfig | None = None
    extra_daos: list[DaoConfig] = field(default_factory=list)  # invalid if non-empty; kept for checking
    linked_metric: str | None = None

    def __post_init__(self) -> None:
        if self.origin not in ("external", "manual"):
            raise StructuralError(f"data-entry {self.id}.origin",
                                  f"expected external|manual, got {self.origin!r}")

    def to_dict(self) -> dict:
        out: dict = {
            "id": self.id,
            "data-type": self.data_type,
            "origin": self.origin,
            "schedule": self.schedule.to_dict(),
        }
        daos = ([self.active_dao] if self.active_dao else []) + self.extra_daos
        if len(daos) == 1:
            out["active-dao"] = daos[0].to_dict()
        elif daos:
            out["active-dao"] = [d.to_dict() for d in daos]
        if self.linked_metric:
            out["linked-metric"] = self.linked_metric
        return out

    @classmethod
    def from_dict(cls, data: Any, path: str = "data-entry") -> "DataEntry":
        obj = expect_object(data, path)
        raw_dao = obj.get("active-dao")
        active: DaoConfig | None = None
        extra: list[DaoConfig] = []
        if isinstance(raw_dao, list):
            configs = [DaoConfig.from_dict(d, f"{path}.active-dao[{i}]") for i, d in enumerate(raw_dao)]
            if configs:
                active, extra = configs[0], configs[1:]
        elif raw_dao is not None:
            active = DaoConfig.from_dict(raw_dao, f"{path}.active-dao")
        return cls(
            id=get_string(obj, "id", path),
            data_type=get_string(obj, "data-type", path),
            origin=get_string(obj, "origin", path),
            schedule=Schedule.from_dict(obj.get("schedule"), f"{path}.schedule"),
            active_dao=active,
            extra_daos=extra,
            linked_metric=str(obj["linked-metric"]) if obj.get("linked-metric") else None,
        )


@dataclass
class WebFormInstance:
    """A web form wired to the data entry it manages."""

    id: str
    form: str
    target_data_entry: str
    slot_bindings: dict[str, str] = field(default_factory=dict)  # slot name -> data entry id
    parameter_bindings: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "form": self.form,
            "target-data-entry": self.target_data_entry,
            "slot-bindings": dict(sorted(self.slot_bindings.items())),
            "parameter-bindings": dict(sorted(self.parameter_bindings.items())),
        }

    @classmethod
    def from_dict(cls, data: Any, path: str = "web-form-instance") -> "WebFormInstance":
        obj = expect_object(data, path)
        bindings = expect_object(obj.get("slot-bindings", {}), f"{path}.slot-bindings")
        return cls(
            id=get_string(obj, "id", path),
            form=get_string(obj, "form", path),
            target_data_entry=get_string(obj, "target-data-entry", path),
            slot_bindings={k: str(v) for k, v in bindings.items()},
            parameter_bindings=dict(expect_object(obj.get("parameter-bindings", {}), f"{path}.parameter-bindings")),
        )


@dataclass
class FunctionInstance:
    """A processing function wired to its producers."""

    id: str
    function: str
    slot_bindings: Bindings = field(default_factory=dict)
    parameter_bindings: dict[str, Any] = field(default_factory=dict)
    linked_gqm_element: str | None = None

    def to_dict(self) -> dict:
        out: dict = {
            "id": self.id,
            "function": self.function,
            "slot-bindings": _bindings_to_dict(self.slot_bindings),
            "parameter-bindings": dict(sorted(self.parameter_bindings.items())),
        }
        if self.linked_gqm_element:
            out["linked-gqm-element"] = self.linked_gqm_element
        return out

    @classmethod
    def from_dict(cls, data: Any, path: str = "function-instance") -> "FunctionInstance":
        obj = expect_object(data, path)
        return cls(
            id=get_string(obj, "id", path),
            function=get_string(obj, "function", path),
            slot_bindings=_bindings_from_dict(obj.get("slot-bindings", {}), f"{path}.slot-bindings"),
            parameter_bindings=dict(expect_object(obj.get("parameter-bindings", {}), f"{path}.parameter-bindings")),
            linked_gqm_element=str(obj["linked-gqm-element"]) if obj.get("linked-gqm-element") else None,
        )


@dataclass
class ViewInstance:
    """A view wired to producers and, possibly, sub-views."""

    id: str
    view: str
    slot_bindings: Bindings = field(default_factory=dict)
    sub_views: list[str] = field(default_factory=list)
    role: str = ""
    parameter_bindings: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "view": self.view,
            "slot-bindings": _bindings_to_dict(self.slot_bindings),
            "sub-views": list(self.sub_views),
            "role": self.role,
            "parameter-bindings": dict(sorted(self.parameter_bindings.items())),
        }

    @classmethod
    def from_dict(cls, data: Any, path: str = "view-instance") -> "ViewInstance":
        obj = expect_object(data, path)
        return cls(
            id=get_string(obj, "id", path),
            view=get_string(obj, "view", path),
            slot_bindings=_bindings_from_dict(obj.get("slot-bindings", {}), f"{path}.slot-bindings"),
            sub_views=[str(s) for s in expect_list(obj.get("sub-views", []), f"{path}.sub-views")],
            role=str(obj.get("role", "")),
            parameter_bindings=dict(expect_object(obj.get("parameter-bindings", {}), f"{path}.parameter-bindings")),
        )


@dataclass
class VisualizationCatena:
    """The instance-level structure operationally controlling one project."""

    data_entries: dict[str, DataEntry] = field(default_factory=dict)
    web_form_instances: dict[str, WebFormInstance] = field(default_factory=dict)
    function_instances: dict[str, FunctionInstance] = field(default_factory=dict)
    view_instances: dict[str, ViewInstance] = field(default_factory=dict)
    provenance: str = ""

    def top_level_views(self) -> list[ViewInstance]:
        nested = {sub for vi in self.view_instances.values() for sub in vi.sub_views}
        return [vi for vid, vi in sorted(self.view_instances.items()) if vid not in nested]

    def to_dict(self, repository: dict | None = None) -> dict:
        out: dict = {
            "format": "visualization-catena/1",
            "provenance": self.provenance,
            "data-entries": [e.to_dict() for _, e in sorted(self.data_entries.items())],
            "web-form-instances": [w.to_dict() for _, w in sorted(self.web_form_instances.items())],
            "function-instances": [f.to_dict() for _, f in sorted(self.function_instances.items())],
            "view-instances": [v.to_dict() for _, v in sorted(self.view_instances.items())],
        }
        if repository is not None:
            out["repository"] = repository
        return out

    @classmethod
    def from_dict(cls, data: Any, path: str = "catena") -> "VisualizationCatena":
        obj = expect_object(data, path)
        vc = cls(provenance=str(obj.get("provenance", "")))
        for i, e in enumerate(expect_list(obj.get("data-entries", []), f"{path}.data-entries")):
            entry = DataEntry.from_dict(e, f"{path}.data-entries[{i}]")
            if entry.id in vc.data_entries:
                raise StructuralError(f"{path}.data-entries[{i}]", f"duplicate id {entry.id!r}")
            vc.data_entries[entry.id] = entry
        for i, w in enumerate(expect_list(obj.get("web-form-instances", []), f"{path}.web-form-instances")):
            wfi = WebFormInstance.from_dict(w, f"{path}.web-form-instances[{i}]")
            if wfi.id in vc.web_form_instances:
                raise StructuralError(f"{path}.web-form-instances[{i}]", f"duplicate id {wfi.id!r}")
            vc.web_form_instances[wfi.id] = wfi
        for i, f in enumerate(expect_list(obj.get("function-instances", []), f"{path}.function-instances")):
            fi = FunctionInstance.from_dict(f, f"{path}.function-instances[{i}]")
            if fi.id in vc.function_instances:
                raise StructuralError(f"{path}.function-instances[{i}]", f"duplicate id {fi.id!r}")
            vc.function_instances[fi.id] = fi
        for i, v in enumerate(expect_list(obj.get("view-instances", []), f"{path}.view-instances")):
            vi = ViewInstance.from_dict(v, f"{path}.view-instances[{i}]")
            if vi.id in vc.view_instances:
                raise StructuralError(f"{path}.view-instances[{i}]", f"duplicate id {vi.id!r}")
            vc.view_instances[vi.id] = vi
        return vc

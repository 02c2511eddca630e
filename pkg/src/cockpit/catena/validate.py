"""Completeness/consistency checking and dependency ordering for catenas."""

from __future__ import annotations

import heapq
from collections import defaultdict
from typing import Iterable

from cockpit.catena.instances import (
    FunctionInstance,
    ProducerRef,
    ViewInstance,
    VisualizationCatena,
    iter_refs,
)
from cockpit.catena.report import CheckKind, CheckReport
from cockpit.catena.types import ComponentRepository, type_compatible


class CycleError(ValueError):
    """The binding graph contains a cycle; carries the member ids."""

    def __init__(self, members: list[str]):
        self.members = members
        super().__init__("binding cycle through: " + " -> ".join(members))


def topological_order(nodes: Iterable[str], edges: Iterable[tuple[str, str]]) -> list[str]:
    """Deterministic topological order (ties broken by ascending id)."""
    nodes = sorted(set(nodes))
    node_set = set(nodes)
    indegree: dict[str, int] = {n: 0 for n in nodes}
    dependents: dict[str, list[str]] = defaultdict(list)
    for producer, consumer in edges:
        if producer not in node_set or consumer not in node_set:
            continue
        indegree[consumer] += 1
        dependents[producer].append(consumer)
    ready = [n for n in nodes if indegree[n] == 0]
    heapq.heapify(ready)
    order: list[str] = []
    while ready:
        node = heapq.heappop(ready)
        order.append(node)
        for nxt in sorted(dependents[node]):
            indegree[nxt] -= 1
            if indegree[nxt] == 0:
                heapq.heappush(ready, nxt)
    if len(order) != len(nodes):
        leftover = sorted(n for n in nodes if n not in set(order))
        producers: dict[str, list[str]] = defaultdict(list)
        for producer, consumers in dependents.items():
            for consumer in consumers:
                producers[consumer].append(producer)
        raise CycleError(_find_cycle(leftover, producers))
    return order


def _find_cycle(leftover: list[str], producers: dict[str, list[str]]) -> list[str]:
    """Walk upstream from a stuck node; every stuck node has an unprocessed
    producer, so the walk must revisit a node, closing the cycle."""
    remaining = set(leftover)
    seen: list[str] = []
    node = leftover[0]
    while node not in seen:
        seen.append(node)
        node = min(n for n in producers.get(node, []) if n in remaining)
    cycle = seen[seen.index(node):]
    return list(reversed(cycle))


def function_edges(vc: VisualizationCatena) -> list[tuple[str, str]]:
    """Producer -> consumer edges between function instances."""
    edges = []
    for fid, fi in sorted(vc.function_instances.items()):
        for _, ref in iter_refs(fi.slot_bindings):
            if ref.instance:
                edges.append((ref.instance, fid))
    return edges


def evaluation_order(vc: VisualizationCatena) -> list[str]:
    """Execution order over function instances; raises CycleError on cycles."""
    return topological_order(vc.function_instances.keys(), function_edges(vc))


class _Collector:
    """Accumulates failure messages, one report item per (subject, kind)."""

    def __init__(self) -> None:
        self.failures: dict[tuple[str, CheckKind], list[str]] = defaultdict(list)
        self.subjects: list[str] = []

    def subject(self, subject: str) -> None:
        if subject not in self.subjects:
            self.subjects.append(subject)

    def fail(self, subject: str, kind: CheckKind, message: str) -> None:
        self.subject(subject)
        self.failures[(subject, kind)].append(message)

    def report(self) -> CheckReport:
        report = CheckReport()
        for subject in self.subjects:
            for kind in (CheckKind.COMPLETENESS, CheckKind.CONSISTENCY):
                messages = self.failures.get((subject, kind), [])
                report.add(subject, kind, not messages, "; ".join(messages))
        return report


def validate_catena(vc: VisualizationCatena, repo: ComponentRepository) -> CheckReport:
    """Completeness and consistency checks over a whole catena.

    Semantic failures never raise; they become fail items.  The report
    carries one completeness and one consistency item per component plus
    one pair for the catena itself (graph-level checks).
    """
    c = _Collector()

    def producer_type(ref: ProducerRef) -> str | None:
        """Data type id produced by a reference, or None when unresolvable."""
        if ref.entry:
            entry = vc.data_entries.get(ref.entry)
            return entry.data_type if entry else None
        fi = vc.function_instances.get(ref.instance or "")
        if fi is None:
            return None
        fdef = repo.functions.get(fi.function)
        if fdef is None:
            return None
        out = fdef.output(ref.output) if ref.output else fdef.primary_output if fdef.outputs else None
        return out.data_type if out else None

    for eid, entry in sorted(vc.data_entries.items()):
        c.subject(eid)
        dtype = repo.data_types.get(entry.data_type)
        if dtype is None:
            c.fail(eid, CheckKind.CONSISTENCY, f"unknown data type {entry.data_type!r}")
        if entry.schedule.start > entry.schedule.end:
            c.fail(eid, CheckKind.CONSISTENCY, "schedule start is after schedule end")
        if entry.schedule.interval.total_seconds() <= 0:
            c.fail(eid, CheckKind.CONSISTENCY, "schedule interval must be positive")
        dao_count = (1 if entry.active_dao else 0) + len(entry.extra_daos)
        if entry.origin == "external":
            if dao_count == 0:
                c.fail(eid, CheckKind.COMPLETENESS, "external entry needs exactly one active data access object")
            elif dao_count > 1:
                c.fail(eid, CheckKind.CONSISTENCY,
                       f"external entry carries {dao_count} active data access objects, expected exactly one")
        else:
            if dao_count:
                c.fail(eid, CheckKind.CONSISTENCY, "manual entry must not carry a data access object")
        if entry.active_dao is not None:
            package = repo.dao_packages.get(entry.active_dao.package)
            if package is None:
                c.fail(eid, CheckKind.CONSISTENCY, f"unknown data access package {entry.active_dao.package!r}")
            else:
                if package.supported_data_type not in ("*", entry.data_type):
                    c.fail(eid, CheckKind.CONSISTENCY,
                           f"package {package.id!r} does not support data type {entry.data_type!r}")
                for pdef in package.parameters:
                    if pdef.mandatory and pdef.name not in entry.active_dao.parameters:
                        c.fail(eid, CheckKind.COMPLETENESS,
                               f"mandatory access parameter {pdef.name!r} is not bound")

    for wid, wfi in sorted(vc.web_form_instances.items()):
        c.subject(wid)
        fdef = repo.web_forms.get(wfi.form)
        target = vc.data_entries.get(wfi.target_data_entry)
        if fdef is None:
            c.fail(wid, CheckKind.CONSISTENCY, f"unknown web form {wfi.form!r}")
        if target is None:
            c.fail(wid, CheckKind.CONSISTENCY, f"unknown target data entry {wfi.target_data_entry!r}")
        if fdef and target and fdef.managed_data_type != target.data_type:
            c.fail(wid, CheckKind.CONSISTENCY,
                   f"form manages {fdef.managed_data_type!r} but the target entry holds {target.data_type!r}")
        if fdef:
            for slot in fdef.input_slots:
                bound = wfi.slot_bindings.get(slot.name)
                if bound is None:
                    if slot.mandatory:
                        c.fail(wid, CheckKind.COMPLETENESS, f"mandatory input slot {slot.name!r} is not bound")
                    continue
                entry = vc.data_entries.get(bound)
                if entry is None:
                    c.fail(wid, CheckKind.CONSISTENCY, f"slot {slot.name!r} bound to unknown entry {bound!r}")
                else:
                    etype = repo.data_types.get(entry.data_type)
                    if etype and not type_compatible(slot.data_type, etype):
                        c.fail(wid, CheckKind.CONSISTENCY,
                               f"slot {slot.name!r} expects {slot.data_type!r} but entry holds {entry.data_type!r}")
            for name in sorted(wfi.slot_bindings):
                if fdef.input_slots and name not in {s.name for s in fdef.input_slots}:
                    c.fail(wid, CheckKind.CONSISTENCY, f"binding names undeclared slot {name!r}")
            for pdef in fdef.parameters:
                if pdef.mandatory and pdef.name not in wfi.parameter_bindings:
                    c.fail(wid, CheckKind.COMPLETENESS, f"mandatory parameter {pdef.name!r} is not bound")

    def check_instance_bindings(subject: str, slots, bindings, params, bound_params) -> None:
        declared = {s.name for s in slots}
        for slot in slots:
            value = bindings.get(slot.name)
            if value is None or (isinstance(value, list) and not value):
                if slot.mandatory:
                    c.fail(subject, CheckKind.COMPLETENESS, f"mandatory input slot {slot.name!r} is not bound")
                continue
            refs = value if isinstance(value, list) else [value]
            if len(refs) > 1 and slot.multiplicity != "many":
                c.fail(subject, CheckKind.CONSISTENCY,
                       f"slot {slot.name!r} accepts one producer but {len(refs)} are bound")
            for ref in refs:
                if ref.entry and ref.entry not in vc.data_entries:
                    c.fail(subject, CheckKind.CONSISTENCY, f"slot {slot.name!r} bound to unknown entry {ref.entry!r}")
                    continue
                if ref.instance and ref.instance not in vc.function_instances:
                    c.fail(subject, CheckKind.CONSISTENCY,
                           f"slot {slot.name!r} bound to unknown function instance {ref.instance!r}")
                    continue
                ptype = producer_type(ref)
                if ptype is None:
                    c.fail(subject, CheckKind.CONSISTENCY,
                           f"slot {slot.name!r}: producer output cannot be resolved")
                    continue
                pdef = repo.data_types.get(ptype)
                if pdef and not type_compatible(slot.data_type, pdef):
                    c.fail(subject, CheckKind.CONSISTENCY,
                           f"slot {slot.name!r} expects {slot.data_type!r} but producer yields {ptype!r}")
        for name in sorted(bindings):
            if name not in declared:
                c.fail(subject, CheckKind.CONSISTENCY, f"binding names undeclared slot {name!r}")
        for pdef in params:
            if pdef.mandatory and pdef.name not in bound_params:
                c.fail(subject, CheckKind.COMPLETENESS, f"mandatory parameter {pdef.name!r} is not bound")

    for fid, fi in sorted(vc.function_instances.items()):
        c.subject(fid)
        fdef = repo.functions.get(fi.function)
        if fdef is None:
            c.fail(fid, CheckKind.CONSISTENCY, f"unknown function {fi.function!r}")
            continue
        check_instance_bindings(fid, fdef.input_slots, fi.slot_bindings,
                                fdef.parameters, fi.parameter_bindings)

    for vid, vi in sorted(vc.view_instances.items()):
        c.subject(vid)
        vdef = repo.views.get(vi.view)
        if vdef is None:
            c.fail(vid, CheckKind.CONSISTENCY, f"unknown view {vi.view!r}")
            continue
        check_instance_bindings(vid, vdef.input_slots, vi.slot_bindings,
                                vdef.parameters, vi.parameter_bindings)
        if vi.sub_views and vdef.render_kind != "composite":
            c.fail(vid, CheckKind.CONSISTENCY, "sub-views bound to a non-composite view")
        for sub in vi.sub_views:
            if sub not in vc.view_instances:
                c.fail(vid, CheckKind.CONSISTENCY, f"unknown sub-view {sub!r}")

    c.subject("catena")
    try:
        topological_order(vc.function_instances.keys(), function_edges(vc))
    except CycleError as exc:
        c.fail("catena", CheckKind.CONSISTENCY,
               "function binding cycle through: " + ", ".join(exc.members))
    sub_edges = [(vid, sub) for vid, vi in sorted(vc.view_instances.items()) for sub in vi.sub_views
                 if sub in vc.view_instances]
    try:
        topological_order(vc.view_instances.keys(), sub_edges)
    except CycleError as exc:
        c.fail("catena", CheckKind.CONSISTENCY,
               "view hierarchy cycle through: " + ", ".join(exc.members))

    return c.report()

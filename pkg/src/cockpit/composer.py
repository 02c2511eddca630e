"""Mechanical derivation of a visualization catena from a measurement plan.

Five steps run in order: data entries (plus web form instances for manual
collection), function instances for complex metrics, function instances
for questions with interpretation models, function instances for goals
with interpretation models, and finally view instances.  Every step keeps
full traceability from plan elements to the instances serving them.

Matching is tag-based (measured object x quality attribute, plus the
required output kind where one is known) with deterministic tie-breaking
by component id; ambiguity surfaces as a warning message on a passing
check item.  Generated instance ids are pure functions of plan element
ids, so identical inputs compose to identical catenas.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from cockpit.catena.instances import (
    DaoConfig,
    DataEntry,
    FunctionInstance,
    ProducerRef,
    Schedule,
    ViewInstance,
    VisualizationCatena,
    WebFormInstance,
)
from cockpit.catena.report import CheckKind, CheckReport
from cockpit.catena.types import ComponentRepository, type_compatible
from cockpit.catena.validate import validate_catena
from cockpit.gqm import GqmMetric, GqmPlan, RenderHint, metric_order, render_goal_sentence, validate_plan


class ComposeError(ValueError):
    """A derivation step cannot serve a plan element."""

    def __init__(self, subject: str, message: str):
        self.subject = subject
        super().__init__(message)


class UnmatchedMetricError(ComposeError):
    pass


class UnfillableSlotError(ComposeError):
    pass


class TraceabilityError(ComposeError):
    pass


class UnrenderableError(ComposeError):
    pass


@dataclass
class MatchQuery:
    """What the composer searches the repository with."""

    measured_object: str
    quality_attribute: str
    output_kind: str = "any"


@dataclass
class Producer:
    ref: ProducerRef
    data_type: str


@dataclass
class ElementTrace:
    function: str | None = None
    views: list[str] = field(default_factory=list)


@dataclass
class TraceabilityMap:
    """Plan element -> catena instance mapping with producer data types."""

    metrics: dict[str, Producer] = field(default_factory=dict)
    questions: dict[str, ElementTrace] = field(default_factory=dict)
    goals: dict[str, ElementTrace] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "format": "traceability-map/1",
            "metrics": {mid: {"producer": p.ref.to_dict(), "data-type": p.data_type}
                        for mid, p in sorted(self.metrics.items())},
            "questions": {qid: {"function": t.function, "views": list(t.views)}
                          for qid, t in sorted(self.questions.items())},
            "goals": {gid: {"function": t.function, "views": list(t.views)}
                      for gid, t in sorted(self.goals.items())},
        }


@dataclass
class ComposeResult:
    catena: VisualizationCatena
    trace: TraceabilityMap
    report: CheckReport

    @property
    def passed(self) -> bool:
        return self.report.passed


def role_tag(viewpoint: str) -> str:
    """Normalize a goal viewpoint phrase into a role tag."""
    text = viewpoint.strip().lower()
    if text.startswith("the "):
        text = text[4:]
    return re.sub(r"[^a-z0-9]+", "-", text).strip("-")


_DEFAULT_RENDER = {"time-series": "line-chart", "scalar": "traffic-light"}


def _default_render_kind(data_type_kind: str) -> str:
    return _DEFAULT_RENDER.get(data_type_kind, "table")


class _Ambiguities:
    def __init__(self) -> None:
        self.notes: list[tuple[str, str]] = []

    def note(self, subject: str, message: str) -> None:
        self.notes.append((subject, message))


def _match_data_type(metric: GqmMetric, repo: ComponentRepository, amb: _Ambiguities):
    candidates = [dt for _, dt in sorted(repo.data_types.items())
                  if any(tag.matches(metric.measured_object, metric.quality_attribute)
                         for tag in dt.tags)]
    if not candidates:
        raise UnmatchedMetricError(
            metric.id,
            f"no data type matches metric {metric.id!r} "
            f"(object {metric.measured_object!r}, quality attribute {metric.quality_attribute!r}); "
            f"considered: {', '.join(sorted(repo.data_types)) or 'none'}")
    if len(candidates) > 1:
        amb.note(metric.id, "multiple data types match: " + ", ".join(d.id for d in candidates))
    return candidates[0]


def _match_function(subject: str, query: MatchQuery, repo: ComponentRepository, amb: _Ambiguities):
    candidates = []
    for _, fn in sorted(repo.functions.items()):
        if not any(tag.matches(query.measured_object, query.quality_attribute)
                   for tag in fn.capability_tags):
            continue
        if query.output_kind != "any":
            kinds = {repo.data_types[o.data_type].kind for o in fn.outputs
                     if o.data_type in repo.data_types}
            if query.output_kind not in kinds:
                continue
        candidates.append(fn)
    if not candidates:
        raise UnmatchedMetricError(
            subject,
            f"no function matches (object {query.measured_object!r}, "
            f"quality attribute {query.quality_attribute!r}, output kind {query.output_kind!r}); "
            f"considered: {', '.join(sorted(repo.functions)) or 'none'}")
    if len(candidates) > 1:
        amb.note(subject, "multiple functions match: " + ", ".join(f.id for f in candidates))
    return candidates[0]


def derive_data_entries(plan: GqmPlan, repo: ComponentRepository,
                        errors: list[ComposeError] | None = None,
                        amb: _Ambiguities | None = None,
                        ) -> tuple[dict[str, DataEntry], dict[str, WebFormInstance], TraceabilityMap]:
    """One data entry per simple metric; manual collection gets a web form."""
    amb = amb or _Ambiguities()
    trace = TraceabilityMap()
    entries: dict[str, DataEntry] = {}
    forms: dict[str, WebFormInstance] = {}
    manual_metrics: list[tuple[GqmMetric, DataEntry]] = []

    for mid, metric in sorted(plan.metrics.items()):
        if metric.kind != "simple":
            continue
        try:
            dtype = _match_data_type(metric, repo, amb)
        except ComposeError as exc:
            if errors is None:
                raise
            errors.append(exc)
            continue
        dcs = metric.dcs
        if dcs is None:
            exc = UnmatchedMetricError(mid, f"simple metric {mid!r} has no data collection specification")
            if errors is None:
                raise exc
            errors.append(exc)
            continue
        entry_id = f"de-{mid}"
        origin = "manual" if dcs.manual else "external"
        active_dao = None
        if origin == "external":
            try:
                active_dao = _select_dao(mid, dtype.id, dcs.source, repo, amb)
            except ComposeError as exc:
                if errors is None:
                    raise
                errors.append(exc)
                continue
        entry = DataEntry(
            id=entry_id,
            data_type=dtype.id,
            origin=origin,
            schedule=Schedule(start=dcs.start, end=dcs.end, interval=dcs.interval),
            active_dao=active_dao,
            linked_metric=mid,
        )
        entries[entry_id] = entry
        trace.metrics[mid] = Producer(ProducerRef(entry=entry_id), dtype.id)
        if origin == "manual":
            manual_metrics.append((metric, entry))

    # Second pass: forms may need other entries (an effort form needs the
    # activity list), so every entry must exist before slots are bound.
    for metric, entry in manual_metrics:
        try:
            form = _select_form(metric.id, entry, repo, amb)
            bindings = _bind_form_slots(metric.id, form, entries, repo)
        except ComposeError as exc:
            if errors is None:
                raise
            errors.append(exc)
            continue
        wfi_id = f"wfi-{metric.id}"
        forms[wfi_id] = WebFormInstance(
            id=wfi_id, form=form.id, target_data_entry=entry.id, slot_bindings=bindings)
    return entries, forms, trace


def _select_dao(metric_id: str, data_type: str, source: str,
                repo: ComponentRepository, amb: _Ambiguities) -> DaoConfig:
    is_url = source.startswith(("http://", "https://"))
    concrete = [d for _, d in sorted(repo.dao_packages.items())
                if d.supported_data_type == data_type and d.mode.value == "read"]
    generic = [d for _, d in sorted(repo.dao_packages.items())
               if d.supported_data_type == "*" and d.mode.value == "read"]
    if is_url:
        candidates = [d for d in generic if any(p.name == "url" for p in d.parameters)]
    else:
        candidates = concrete or [d for d in generic if any(p.name == "path" for p in d.parameters)]
    if not candidates:
        raise UnmatchedMetricError(
            metric_id,
            f"no data access package reads {data_type!r} from {source!r}; "
            f"considered: {', '.join(sorted(repo.dao_packages)) or 'none'}")
    if len(candidates) > 1:
        amb.note(metric_id, "multiple access packages match: " + ", ".join(d.id for d in candidates))
    package = candidates[0]
    if is_url:
        params: dict = {"url": source}
    else:
        dialect = "interchange" if source.endswith(".json") else "delimited"
        params = {"path": source, "dialect": dialect}
    return DaoConfig(package=package.id, parameters=params)


def _select_form(metric_id: str, entry: DataEntry, repo: ComponentRepository, amb: _Ambiguities):
    candidates = [wf for _, wf in sorted(repo.web_forms.items())
                  if wf.managed_data_type == entry.data_type]
    if not candidates:
        raise UnmatchedMetricError(
            metric_id,
            f"no web form manages data type {entry.data_type!r}; "
            f"considered: {', '.join(sorted(repo.web_forms)) or 'none'}")
    if len(candidates) > 1:
        amb.note(metric_id, "multiple web forms match: " + ", ".join(w.id for w in candidates))
    return candidates[0]


def _bind_form_slots(metric_id: str, form, entries: dict[str, DataEntry],
                     repo: ComponentRepository) -> dict[str, str]:
    bindings: dict[str, str] = {}
    for slot in form.input_slots:
        found = ""
        for eid, entry in sorted(entries.items()):
            dtype = repo.data_types.get(entry.data_type)
            if dtype and type_compatible(slot.data_type, dtype):
                found = eid
                break
        if found:
            bindings[slot.name] = found
        elif slot.mandatory:
            raise UnfillableSlotError(
                metric_id,
                f"form {form.id!r} slot {slot.name!r} needs a {slot.data_type!r} entry "
                f"but none was derived for metric {metric_id!r}")
    return bindings


def derive_metric_functions(plan: GqmPlan, repo: ComponentRepository, trace: TraceabilityMap,
                            errors: list[ComposeError] | None = None,
                            amb: _Ambiguities | None = None) -> dict[str, FunctionInstance]:
    """One function instance per complex metric, in derivation order."""
    amb = amb or _Ambiguities()
    instances: dict[str, FunctionInstance] = {}
    for mid in metric_order(plan):
        metric = plan.metrics[mid]
        if metric.kind != "complex" or metric.computation is None:
            continue
        try:
            fdef = _match_function(mid, MatchQuery(metric.measured_object, metric.quality_attribute),
                                   repo, amb)
            producers = []
            for dep in metric.computation.inputs:
                if dep not in trace.metrics:
                    raise TraceabilityError(mid, f"input metric {dep!r} has no producer")
                producers.append(trace.metrics[dep])
            bindings = _fill_slots(mid, fdef, producers, repo)
        except ComposeError as exc:
            if errors is None:
                raise
            errors.append(exc)
            continue
        fi_id = f"fi-{mid}"
        parameters = {k: v for k, v in sorted(metric.computation.parameters.items())}
        instances[fi_id] = FunctionInstance(
            id=fi_id, function=fdef.id, slot_bindings=bindings,
            parameter_bindings=parameters, linked_gqm_element=mid)
        trace.metrics[mid] = Producer(
            ProducerRef(instance=fi_id, output=fdef.primary_output.name),
            fdef.primary_output.data_type)
    return instances


def _fill_slots(subject: str, fdef, producers: list[Producer],
                repo: ComponentRepository) -> dict:
    """Assign producers to slots by type compatibility, first-fit, in order."""
    bindings: dict = {}
    used = [False] * len(producers)
    for slot in fdef.input_slots:
        matched: list[ProducerRef] = []
        for i, producer in enumerate(producers):
            if used[i]:
                continue
            dtype = repo.data_types.get(producer.data_type)
            if dtype and type_compatible(slot.data_type, dtype):
                matched.append(producer.ref)
                used[i] = True
                if slot.multiplicity != "many":
                    break
        if not matched:
            if slot.mandatory:
                raise UnfillableSlotError(
                    subject,
                    f"mandatory slot {slot.name!r} of {fdef.id!r} cannot be filled "
                    f"for {subject!r}: no compatible producer among "
                    + (", ".join(p.data_type for p in producers) or "none"))
            continue
        bindings[slot.name] = matched if slot.multiplicity == "many" else matched[0]
    return bindings


def _interpretation_function(subject: str, rule: str, repo: ComponentRepository,
                             amb: _Ambiguities):
    return _match_function(subject, MatchQuery("*", f"interpretation:{rule}"), repo, amb)


def derive_question_functions(plan: GqmPlan, repo: ComponentRepository, trace: TraceabilityMap,
                              errors: list[ComposeError] | None = None,
                              amb: _Ambiguities | None = None) -> dict[str, FunctionInstance]:
    """One interpretation function per question carrying a model."""
    amb = amb or _Ambiguities()
    instances: dict[str, FunctionInstance] = {}
    for qid, question in sorted(plan.questions.items()):
        trace.questions.setdefault(qid, ElementTrace())
        if not question.interpretation_model:
            continue
        model = plan.interpretation_models.get(question.interpretation_model)
        if model is None:
            exc = TraceabilityError(qid, f"unknown interpretation model {question.interpretation_model!r}")
            if errors is None:
                raise exc
            errors.append(exc)
            continue
        try:
            fdef = _interpretation_function(qid, model.rule, repo, amb)
            refs = []
            for name in model.inputs:
                if name not in trace.metrics:
                    raise TraceabilityError(qid, f"model input {name!r} has no producer")
                refs.append(trace.metrics[name].ref)
        except ComposeError as exc:
            if errors is None:
                raise
            errors.append(exc)
            continue
        fi_id = f"fi-q-{qid}"
        parameters: dict = {"model-id": model.id, "input-names": list(model.inputs)}
        for key in ("weights", "normalize", "yellow-bound", "red-bound"):
            if key in model.parameters:
                parameters[key] = model.parameters[key]
        instances[fi_id] = FunctionInstance(
            id=fi_id, function=fdef.id, slot_bindings={"inputs": refs},
            parameter_bindings=parameters, linked_gqm_element=qid)
        trace.questions[qid].function = fi_id
    return instances


def derive_goal_functions(plan: GqmPlan, repo: ComponentRepository, trace: TraceabilityMap,
                          errors: list[ComposeError] | None = None,
                          amb: _Ambiguities | None = None) -> dict[str, FunctionInstance]:
    """One interpretation function per goal carrying a model, over its questions."""
    amb = amb or _Ambiguities()
    instances: dict[str, FunctionInstance] = {}
    for gid, goal in sorted(plan.goals.items()):
        trace.goals.setdefault(gid, ElementTrace())
        if not goal.interpretation_model:
            continue
        model = plan.interpretation_models.get(goal.interpretation_model)
        if model is None:
            exc = TraceabilityError(gid, f"unknown interpretation model {goal.interpretation_model!r}")
            if errors is None:
                raise exc
            errors.append(exc)
            continue
        try:
            fdef = _interpretation_function(gid, model.rule, repo, amb)
            refs = []
            for name in model.inputs:
                answer = trace.questions.get(name)
                if answer and answer.function:
                    refs.append(ProducerRef(instance=answer.function, output="status"))
                elif name in trace.metrics:
                    refs.append(trace.metrics[name].ref)
                else:
                    raise TraceabilityError(gid, f"model input {name!r} has no answer producer")
        except ComposeError as exc:
            if errors is None:
                raise
            errors.append(exc)
            continue
        fi_id = f"fi-g-{gid}"
        parameters = {"model-id": model.id, "input-names": list(model.inputs)}
        for key in ("weights", "normalize", "yellow-bound", "red-bound"):
            if key in model.parameters:
                parameters[key] = model.parameters[key]
        instances[fi_id] = FunctionInstance(
            id=fi_id, function=fdef.id, slot_bindings={"inputs": refs},
            parameter_bindings=parameters, linked_gqm_element=gid)
        trace.goals[gid].function = fi_id
    return instances


def _terminal_metrics(plan: GqmPlan, qid: str) -> list[GqmMetric]:
    """Metrics of a question not consumed by another of its metrics."""
    metrics = plan.metrics_of(qid)
    consumed: set[str] = set()
    for metric in metrics:
        if metric.computation:
            consumed.update(metric.computation.inputs)
    return [m for m in metrics if m.id not in consumed]


def derive_views(plan: GqmPlan, repo: ComponentRepository, trace: TraceabilityMap,
                 errors: list[ComposeError] | None = None,
                 amb: _Ambiguities | None = None) -> dict[str, ViewInstance]:
    """Question views (hints override payload-kind defaults), then per goal a
    role-tagged composite over its questions' views plus its status light."""
    amb = amb or _Ambiguities()
    views: dict[str, ViewInstance] = {}

    for gid, goal in sorted(plan.goals.items()):
        role = role_tag(goal.viewpoint)
        goal_trace = trace.goals.setdefault(gid, ElementTrace())
        child_ids: list[str] = []

        for question in plan.questions_of(gid):
            qid = question.id
            question_trace = trace.questions.setdefault(qid, ElementTrace())
            try:
                targets = _question_view_targets(plan, question, trace, repo)
            except ComposeError as exc:
                if errors is None:
                    raise
                errors.append(exc)
                continue
            index = 0
            for hint, producer in targets:
                index += 1
                try:
                    vdef = _select_view(qid, hint.render_kind, producer, repo, amb)
                except ComposeError as exc:
                    if errors is None:
                        raise
                    errors.append(exc)
                    continue
                vi_id = f"vi-{qid}-{index}"
                parameters = {"title": question.text or qid}
                parameters.update(hint.parameters)
                bindings = {}
                if vdef.input_slots:
                    bindings[vdef.input_slots[0].name] = producer.ref
                views[vi_id] = ViewInstance(
                    id=vi_id, view=vdef.id, slot_bindings=bindings,
                    role=role, parameter_bindings=parameters)
                question_trace.views.append(vi_id)
                child_ids.append(vi_id)

        if goal_trace.function:
            try:
                vdef = _select_view(gid, "traffic-light",
                                    Producer(ProducerRef(instance=goal_trace.function, output="status"),
                                             "dt-status"),
                                    repo, amb)
                vi_id = f"vi-g-{gid}-status"
                views[vi_id] = ViewInstance(
                    id=vi_id, view=vdef.id,
                    slot_bindings={vdef.input_slots[0].name: ProducerRef(
                        instance=goal_trace.function, output="status")},
                    role=role,
                    parameter_bindings={"title": f"Goal attainment: {goal.purpose}"})
                goal_trace.views.append(vi_id)
                child_ids.append(vi_id)
            except ComposeError as exc:
                if errors is None:
                    raise
                errors.append(exc)

        try:
            composite_def = _select_composite(gid, repo, amb)
        except ComposeError as exc:
            if errors is None:
                raise
            errors.append(exc)
            continue
        composite_id = f"vi-g-{gid}"
        views[composite_id] = ViewInstance(
            id=composite_id, view=composite_def.id, sub_views=child_ids,
            role=role, parameter_bindings={"title": render_goal_sentence(goal)})
        goal_trace.views.append(composite_id)
    return views


def _question_view_targets(plan: GqmPlan, question, trace: TraceabilityMap,
                           repo: ComponentRepository):
    """(hint, producer) pairs for a question, hints resolved to producers."""
    qid = question.id
    question_trace = trace.questions.get(qid) or ElementTrace()
    targets: list[tuple[RenderHint, Producer]] = []
    hints = list(question.render_hints)
    if not hints:
        if question_trace.function:
            producers = [Producer(ProducerRef(instance=question_trace.function, output="status"),
                                  "dt-status")]
        else:
            producers = []
            for metric in _terminal_metrics(plan, qid):
                if metric.id not in trace.metrics:
                    raise TraceabilityError(qid, f"metric {metric.id!r} has no producer to visualize")
                producers.append(trace.metrics[metric.id])
        for producer in producers:
            dtype = repo.data_types.get(producer.data_type)
            kind = _default_render_kind(dtype.kind if dtype else "table")
            targets.append((RenderHint(render_kind=kind), producer))
        return targets
    for hint in hints:
        if hint.source == "status" or (not hint.source and question_trace.function):
            if not question_trace.function:
                raise TraceabilityError(qid, "render hint wants the question status but no "
                                             "interpretation model is defined")
            producer = Producer(ProducerRef(instance=question_trace.function, output="status"),
                                "dt-status")
            targets.append((hint, producer))
        elif hint.source:
            if hint.source not in trace.metrics:
                raise TraceabilityError(qid, f"render hint source {hint.source!r} has no producer")
            targets.append((hint, trace.metrics[hint.source]))
        else:
            terminals = _terminal_metrics(plan, qid)
            if not terminals:
                raise TraceabilityError(qid, "question has no metrics to visualize")
            for metric in terminals:
                if metric.id not in trace.metrics:
                    raise TraceabilityError(qid, f"metric {metric.id!r} has no producer to visualize")
                targets.append((hint, trace.metrics[metric.id]))
    return targets


def _select_view(subject: str, render_kind: str, producer: Producer,
                 repo: ComponentRepository, amb: _Ambiguities):
    candidates = []
    for _, vdef in sorted(repo.views.items()):
        if vdef.render_kind != render_kind or vdef.render_kind == "composite":
            continue
        if vdef.input_slots:
            dtype = repo.data_types.get(producer.data_type)
            if dtype is None or not type_compatible(vdef.input_slots[0].data_type, dtype):
                continue
        candidates.append(vdef)
    if not candidates:
        raise UnrenderableError(
            subject,
            f"no view renders {producer.data_type!r} as {render_kind!r}; "
            f"considered: {', '.join(sorted(repo.views)) or 'none'}")
    if len(candidates) > 1:
        amb.note(subject, "multiple views match: " + ", ".join(v.id for v in candidates))
    return candidates[0]


def _select_composite(subject: str, repo: ComponentRepository, amb: _Ambiguities):
    candidates = [v for _, v in sorted(repo.views.items()) if v.render_kind == "composite"]
    if not candidates:
        raise UnrenderableError(subject, "no composite view available for goal-level aggregation")
    if len(candidates) > 1:
        amb.note(subject, "multiple composite views match: " + ", ".join(v.id for v in candidates))
    return candidates[0]


def compose(plan: GqmPlan, repo: ComponentRepository) -> ComposeResult:
    """Run all derivation steps, assemble the catena, check everything.

    Returns the (possibly partial) catena, the traceability map, and a
    report merging plan validation, derivation errors, catena checks, and
    mapping-coverage checks.  Never raises on semantic failures.
    """
    report = CheckReport()
    plan_report = validate_plan(plan)
    report.merge(plan_report)
    trace = TraceabilityMap()
    vc = VisualizationCatena(provenance=plan.id)
    if not plan_report.passed:
        report.add("compose", CheckKind.CONSISTENCY, False,
                   "plan validation failed; composition not attempted")
        return ComposeResult(vc, trace, report)

    errors: list[ComposeError] = []
    amb = _Ambiguities()
    entries, forms, trace = derive_data_entries(plan, repo, errors, amb)
    vc.data_entries = entries
    vc.web_form_instances = forms
    vc.function_instances.update(derive_metric_functions(plan, repo, trace, errors, amb))
    vc.function_instances.update(derive_question_functions(plan, repo, trace, errors, amb))
    vc.function_instances.update(derive_goal_functions(plan, repo, trace, errors, amb))
    vc.view_instances = derive_views(plan, repo, trace, errors, amb)

    for exc in errors:
        report.add(exc.subject, CheckKind.COMPLETENESS, False, str(exc))
    for subject, message in amb.notes:
        report.add(subject, CheckKind.CONSISTENCY, True, f"warning: {message}")

    report.merge(validate_catena(vc, repo))

    # Mapping coverage: every metric traced, every question and goal visualized.
    failed_subjects = {e.subject for e in errors}
    for mid in sorted(plan.metrics):
        if mid not in failed_subjects:
            traced = mid in trace.metrics
            report.add(f"coverage:{mid}", CheckKind.COMPLETENESS, traced,
                       "" if traced else f"metric {mid!r} is not traced to any producer")
    for qid in sorted(plan.questions):
        if qid not in failed_subjects:
            q_trace = trace.questions.get(qid)
            ok = bool(q_trace and q_trace.views)
            report.add(f"coverage:{qid}", CheckKind.COMPLETENESS, ok,
                       "" if ok else f"question {qid!r} has no view instance")
    for gid in sorted(plan.goals):
        if gid not in failed_subjects:
            g_trace = trace.goals.get(gid)
            ok = bool(g_trace and g_trace.views)
            report.add(f"coverage:{gid}", CheckKind.COMPLETENESS, ok,
                       "" if ok else f"goal {gid!r} has no view instance")

    return ComposeResult(vc, trace, report)

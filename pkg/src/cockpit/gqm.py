"""Goal-question-metric measurement plans.

A plan holds measurement goals, the questions that make statements about
them, simple metrics operationalized by data collection specifications,
complex metrics computed from other metrics, and interpretation models
that aggregate metric values into traffic-light answers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from typing import Any

from cockpit.catena.report import CheckKind, CheckReport
from cockpit.catena.validate import CycleError, topological_order
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
from cockpit.status import Status

GOAL_TEMPLATE = ("Analyze <object> for the purpose of <purpose> "
                 "from the point of view of <viewpoint>")

_GOAL_RE = re.compile(
    r"^\s*Analyze\s+(?P<object>.+?)\s+for the purpose of\s+(?P<purpose>.+?)"
    r"(?:\s+with respect to\s+(?P<focus>.+?))?"
    r"\s+from the point of view of\s+(?P<viewpoint>.+?)\s*\.?\s*$"
)


class TemplateMismatch(ValueError):
    """A goal sentence does not follow the goal template."""

    def __init__(self, sentence: str):
        self.sentence = sentence
        super().__init__(f"sentence does not match the goal template {GOAL_TEMPLATE!r}: {sentence!r}")


class InterpretationError(ValueError):
    """An interpretation model cannot be applied to the given inputs."""


@dataclass
class RenderHint:
    """Optional visualization wish attached to a question or goal."""

    render_kind: str
    parameters: dict[str, Any] = field(default_factory=dict)
    source: str = ""  # "" = default producer, "status", or a metric id

    def to_dict(self) -> dict:
        out: dict = {"render-kind": self.render_kind, "parameters": dict(sorted(self.parameters.items()))}
        if self.source:
            out["source"] = self.source
        return out

    @classmethod
    def from_dict(cls, data: Any, path: str) -> "RenderHint":
        obj = expect_object(data, path)
        return cls(render_kind=get_string(obj, "render-kind", path),
                   parameters=dict(expect_object(obj.get("parameters", {}), f"{path}.parameters")),
                   source=str(obj.get("source", "")))


@dataclass
class GqmGoal:
    id: str
    object: str
    purpose: str
    viewpoint: str
    quality_focus: str = ""
    context: list[str] = field(default_factory=list)
    interpretation_model: str | None = None
    render_hints: list[RenderHint] = field(default_factory=list)

    def __post_init__(self) -> None:
        for name in ("object", "purpose", "viewpoint"):
            if not getattr(self, name).strip():
                raise StructuralError(f"goal {self.id}.{name}", "facet must be non-empty")

    def to_dict(self) -> dict:
        out: dict = {
            "id": self.id,
            "object": self.object,
            "purpose": self.purpose,
            "viewpoint": self.viewpoint,
            "quality-focus": self.quality_focus,
            "context": list(self.context),
        }
        if self.interpretation_model:
            out["interpretation-model"] = self.interpretation_model
        if self.render_hints:
            out["render-hints"] = [h.to_dict() for h in self.render_hints]
        return out

    @classmethod
    def from_dict(cls, data: Any, path: str = "goal") -> "GqmGoal":
        obj = expect_object(data, path)
        return cls(
            id=get_string(obj, "id", path),
            object=get_string(obj, "object", path),
            purpose=get_string(obj, "purpose", path),
            viewpoint=get_string(obj, "viewpoint", path),
            quality_focus=str(obj.get("quality-focus", "")),
            context=[str(c) for c in expect_list(obj.get("context", []), f"{path}.context")],
            interpretation_model=str(obj["interpretation-model"]) if obj.get("interpretation-model") else None,
            render_hints=[RenderHint.from_dict(h, f"{path}.render-hints[{i}]")
                          for i, h in enumerate(expect_list(obj.get("render-hints", []), f"{path}.render-hints"))],
        )


@dataclass
class GqmQuestion:
    id: str
    goal: str
    text: str
    interpretation_model: str | None = None
    render_hints: list[RenderHint] = field(default_factory=list)

    def to_dict(self) -> dict:
        out: dict = {"id": self.id, "goal": self.goal, "text": self.text}
        if self.interpretation_model:
            out["interpretation-model"] = self.interpretation_model
        if self.render_hints:
            out["render-hints"] = [h.to_dict() for h in self.render_hints]
        return out

    @classmethod
    def from_dict(cls, data: Any, path: str = "question") -> "GqmQuestion":
        obj = expect_object(data, path)
        return cls(
            id=get_string(obj, "id", path),
            goal=get_string(obj, "goal", path),
            text=str(obj.get("text", "")),
            interpretation_model=str(obj["interpretation-model"]) if obj.get("interpretation-model") else None,
            render_hints=[RenderHint.from_dict(h, f"{path}.render-hints[{i}]")
                          for i, h in enumerate(expect_list(obj.get("render-hints", []), f"{path}.render-hints"))],
        )


@dataclass
class DataCollectionSpec:
    """Who collects which source, from when to when, at which interval."""

    collector_kind: str  # "tool" | "role"
    collector_name: str
    source: str
    start: datetime
    end: datetime
    interval: timedelta
    manual: bool = False

    def __post_init__(self) -> None:
        if self.collector_kind not in ("tool", "role"):
            raise StructuralError("dcs.collector", f"expected tool|role, got {self.collector_kind!r}")
        if self.start > self.end:
            raise StructuralError("dcs.start", "collection start is after collection end")
        if self.interval.total_seconds() <= 0:
            raise StructuralError("dcs.interval", "collection interval must be positive")

    def to_dict(self) -> dict:
        return {
            "collector": {"kind": self.collector_kind, "name": self.collector_name},
            "source": self.source,
            "start": format_timestamp(self.start),
            "end": format_timestamp(self.end),
            "interval": format_duration(self.interval),
            "manual": self.manual,
        }

    @classmethod
    def from_dict(cls, data: Any, path: str = "dcs") -> "DataCollectionSpec":
        obj = expect_object(data, path)
        collector = expect_object(obj.get("collector", {}), f"{path}.collector")
        return cls(
            collector_kind=str(collector.get("kind", "role")),
            collector_name=str(collector.get("name", "")),
            source=str(obj.get("source", "")),
            start=parse_timestamp(obj.get("start"), f"{path}.start"),
            end=parse_timestamp(obj.get("end"), f"{path}.end"),
            interval=parse_duration(obj.get("interval"), f"{path}.interval"),
            manual=bool(obj.get("manual", False)),
        )


@dataclass
class MetricComputation:
    """Declarative recipe for a complex metric: inputs plus parameters."""

    inputs: list[str]
    parameters: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"inputs": list(self.inputs), "parameters": dict(sorted(self.parameters.items()))}

    @classmethod
    def from_dict(cls, data: Any, path: str) -> "MetricComputation":
        obj = expect_object(data, path)
        return cls(inputs=[str(m) for m in expect_list(obj.get("inputs", []), f"{path}.inputs")],
                   parameters=dict(expect_object(obj.get("parameters", {}), f"{path}.parameters")))


@dataclass
class GqmMetric:
    id: str
    name: str
    kind: str  # "simple" | "complex"
    questions: list[str]
    measured_object: str = ""
    quality_attribute: str = ""
    dcs: DataCollectionSpec | None = None
    computation: MetricComputation | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("simple", "complex"):
            raise StructuralError(f"metric {self.id}.kind", f"expected simple|complex, got {self.kind!r}")

    def to_dict(self) -> dict:
        out: dict = {
            "id": self.id,
            "name": self.name,
            "kind": self.kind,
            "questions": list(self.questions),
            "measured-object": self.measured_object,
            "quality-attribute": self.quality_attribute,
        }
        if self.dcs:
            out["dcs"] = self.dcs.to_dict()
        if self.computation:
            out["computation"] = self.computation.to_dict()
        return out

    @classmethod
    def from_dict(cls, data: Any, path: str = "metric") -> "GqmMetric":
        obj = expect_object(data, path)
        return cls(
            id=get_string(obj, "id", path),
            name=str(obj.get("name", "")),
            kind=get_string(obj, "kind", path),
            questions=[str(q) for q in expect_list(obj.get("questions", []), f"{path}.questions")],
            measured_object=str(obj.get("measured-object", "")),
            quality_attribute=str(obj.get("quality-attribute", "")),
            dcs=DataCollectionSpec.from_dict(obj["dcs"], f"{path}.dcs") if obj.get("dcs") else None,
            computation=MetricComputation.from_dict(obj["computation"], f"{path}.computation")
            if obj.get("computation") else None,
        )


@dataclass
class InterpretationModelSpec:
    """Aggregation rule turning metric values or question answers into a status."""

    id: str
    inputs: list[str]  # metric ids or question ids
    rule: str  # "worst-of" | "weighted-threshold"
    parameters: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.rule not in ("worst-of", "weighted-threshold"):
            raise StructuralError(f"interpretation-model {self.id}.rule",
                                  f"expected worst-of|weighted-threshold, got {self.rule!r}")

    def to_dict(self) -> dict:
        return {"id": self.id, "inputs": list(self.inputs), "rule": self.rule,
                "parameters": dict(sorted(self.parameters.items()))}

    @classmethod
    def from_dict(cls, data: Any, path: str = "interpretation-model") -> "InterpretationModelSpec":
        obj = expect_object(data, path)
        return cls(
            id=get_string(obj, "id", path),
            inputs=[str(m) for m in expect_list(obj.get("inputs", []), f"{path}.inputs")],
            rule=get_string(obj, "rule", path),
            parameters=dict(expect_object(obj.get("parameters", {}), f"{path}.parameters")),
        )


@dataclass
class GqmPlan:
    id: str
    goals: dict[str, GqmGoal] = field(default_factory=dict)
    questions: dict[str, GqmQuestion] = field(default_factory=dict)
    metrics: dict[str, GqmMetric] = field(default_factory=dict)
    interpretation_models: dict[str, InterpretationModelSpec] = field(default_factory=dict)
    annotations: list[str] = field(default_factory=list)  # higher-level goal references, free text

    def questions_of(self, goal_id: str) -> list[GqmQuestion]:
        return [q for _, q in sorted(self.questions.items()) if q.goal == goal_id]

    def metrics_of(self, question_id: str) -> list[GqmMetric]:
        return [m for _, m in sorted(self.metrics.items()) if question_id in m.questions]

    def to_dict(self) -> dict:
        return {
            "format": "gqm-plan/1",
            "id": self.id,
            "goals": [g.to_dict() for _, g in sorted(self.goals.items())],
            "questions": [q.to_dict() for _, q in sorted(self.questions.items())],
            "metrics": [m.to_dict() for _, m in sorted(self.metrics.items())],
            "interpretation-models": [m.to_dict() for _, m in sorted(self.interpretation_models.items())],
            "annotations": list(self.annotations),
        }

    @classmethod
    def from_dict(cls, data: Any, path: str = "plan") -> "GqmPlan":
        obj = expect_object(data, path)
        plan = cls(id=str(obj.get("id", "plan")))
        for i, g in enumerate(expect_list(obj.get("goals", []), f"{path}.goals")):
            goal = GqmGoal.from_dict(g, f"{path}.goals[{i}]")
            plan.goals[goal.id] = goal
        for i, q in enumerate(expect_list(obj.get("questions", []), f"{path}.questions")):
            question = GqmQuestion.from_dict(q, f"{path}.questions[{i}]")
            plan.questions[question.id] = question
        for i, m in enumerate(expect_list(obj.get("metrics", []), f"{path}.metrics")):
            metric = GqmMetric.from_dict(m, f"{path}.metrics[{i}]")
            plan.metrics[metric.id] = metric
        for i, m in enumerate(expect_list(obj.get("interpretation-models", []), f"{path}.interpretation-models")):
            model = InterpretationModelSpec.from_dict(m, f"{path}.interpretation-models[{i}]")
            plan.interpretation_models[model.id] = model
        plan.annotations = [str(a) for a in expect_list(obj.get("annotations", []), f"{path}.annotations")]
        return plan


def parse_goal_sentence(text: str, goal_id: str = "goal") -> GqmGoal:
    """Extract goal facets from a template sentence, verbatim and trimmed.

    The viewpoint keeps its article ("the project manager"), matching how
    goal statements are written out.
    """
    m = _GOAL_RE.match(text)
    if not m:
        raise TemplateMismatch(text)
    return GqmGoal(
        id=goal_id,
        object=m.group("object").strip(),
        purpose=m.group("purpose").strip(),
        quality_focus=(m.group("focus") or "").strip(),
        viewpoint=m.group("viewpoint").strip(),
    )


def render_goal_sentence(goal: GqmGoal) -> str:
    focus = f" with respect to {goal.quality_focus}" if goal.quality_focus else ""
    return (f"Analyze {goal.object} for the purpose of {goal.purpose}{focus} "
            f"from the point of view of {goal.viewpoint}.")


def goals_from_text(text: str, id_prefix: str = "g") -> list[GqmGoal]:
    """Import goal sentences from plain text, one per line.

    Blank lines and ``#`` comments are skipped; ids are assigned in order
    (``g1``, ``g2``, ...).  A non-matching line raises TemplateMismatch.
    """
    goals = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        goals.append(parse_goal_sentence(line, f"{id_prefix}{len(goals) + 1}"))
    return goals


def validate_plan(plan: GqmPlan) -> CheckReport:
    """Referential integrity, simple/complex field rules, acyclic derivation."""
    report = CheckReport()

    for qid, question in sorted(plan.questions.items()):
        if question.goal not in plan.goals:
            report.add(qid, CheckKind.CONSISTENCY, False,
                       f"question references unknown goal {question.goal!r}")
        else:
            report.add(qid, CheckKind.CONSISTENCY, True, "")
        if question.interpretation_model and question.interpretation_model not in plan.interpretation_models:
            report.add(qid, CheckKind.COMPLETENESS, False,
                       f"unknown interpretation model {question.interpretation_model!r}")

    for gid, goal in sorted(plan.goals.items()):
        if goal.interpretation_model and goal.interpretation_model not in plan.interpretation_models:
            report.add(gid, CheckKind.COMPLETENESS, False,
                       f"unknown interpretation model {goal.interpretation_model!r}")

    for mid, metric in sorted(plan.metrics.items()):
        problems = []
        if not metric.questions:
            problems.append("metric belongs to no question")
        for qid in metric.questions:
            if qid not in plan.questions:
                problems.append(f"metric references unknown question {qid!r}")
        if metric.kind == "simple":
            if metric.dcs is None:
                problems.append("simple metric needs a data collection specification")
            if metric.computation is not None:
                problems.append("simple metric must not carry a computation")
        else:
            if metric.computation is None:
                problems.append("complex metric needs a computation")
            if metric.dcs is not None:
                problems.append("complex metric must not carry a data collection specification")
            if metric.computation:
                for dep in metric.computation.inputs:
                    if dep not in plan.metrics:
                        problems.append(f"computation references unknown metric {dep!r}")
        report.add(mid, CheckKind.COMPLETENESS, not problems, "; ".join(problems))

    edges = [(dep, mid) for mid, metric in sorted(plan.metrics.items())
             if metric.computation for dep in metric.computation.inputs if dep in plan.metrics]
    try:
        topological_order(plan.metrics.keys(), edges)
        report.add("metric-derivation", CheckKind.CONSISTENCY, True, "")
    except CycleError as exc:
        report.add("metric-derivation", CheckKind.CONSISTENCY, False,
                   "metric derivation cycle through: " + ", ".join(exc.members))

    declared = set(plan.metrics) | set(plan.questions)
    for mid, model in sorted(plan.interpretation_models.items()):
        problems = []
        unknown = [i for i in model.inputs if i not in declared]
        if unknown:
            problems.append("model references undeclared inputs: " + ", ".join(sorted(unknown)))
        if model.rule == "weighted-threshold":
            weights = model.parameters.get("weights") or {}
            if weights:
                missing = [i for i in model.inputs if i not in weights]
                if missing:
                    problems.append("weights missing for inputs: " + ", ".join(sorted(missing)))
                else:
                    total = sum(float(w) for w in weights.values())
                    if abs(total - 1.0) > 1e-9:
                        problems.append(f"weights must sum to 1, got {total:g}")
            yellow = model.parameters.get("yellow-bound")
            red = model.parameters.get("red-bound")
            if yellow is not None and red is not None and float(yellow) > float(red):
                problems.append("yellow bound must not exceed red bound")
        report.add(mid, CheckKind.CONSISTENCY, not problems, "; ".join(problems))

    return report


def metric_order(plan: GqmPlan) -> list[str]:
    """Metric ids in derivation order (inputs before the metrics using them)."""
    edges = [(dep, mid) for mid, metric in sorted(plan.metrics.items())
             if metric.computation for dep in metric.computation.inputs if dep in plan.metrics]
    return topological_order(plan.metrics.keys(), edges)


def apply_interpretation(model: InterpretationModelSpec,
                         inputs: dict[str, Any]) -> tuple[Status, float]:
    """Aggregate named inputs into a traffic-light status plus score.

    Inputs may be Status values or numbers.  ``worst-of`` returns the
    maximum severity; ``weighted-threshold`` computes a weighted sum of
    normalized values and applies the yellow/red bounds.
    """
    if not model.inputs:
        raise InterpretationError(f"model {model.id!r} declares no inputs")
    for name in model.inputs:
        if name not in inputs or inputs[name] is None:
            raise InterpretationError(f"missing input {name!r} for model {model.id!r}")

    if model.rule == "worst-of":
        statuses = []
        scores = []
        for name in model.inputs:
            value = inputs[name]
            status = _as_status(value, name)
            statuses.append(status)
            scores.append(value[1] if isinstance(value, tuple) else status.fraction)
        worst = Status.worst(statuses)
        return worst, max(scores) if scores else worst.fraction

    weights = model.parameters.get("weights") or {}
    normalize = model.parameters.get("normalize") or {}
    yellow = float(model.parameters.get("yellow-bound", 0.33))
    red = float(model.parameters.get("red-bound", 0.66))
    n = len(model.inputs)
    score = 0.0
    for name in model.inputs:
        weight = float(weights.get(name, 1.0 / n))
        score += weight * _normalized(inputs[name], normalize.get(name), name)
    if score < yellow:
        return Status.GREEN, score
    if score < red:
        return Status.YELLOW, score
    return Status.RED, score


def _as_status(value: Any, name: str) -> Status:
    if isinstance(value, tuple):
        value = value[0]
    if isinstance(value, (Status, str)):
        try:
            return Status.from_value(value)
        except ValueError:
            pass
    raise InterpretationError(f"input {name!r} is not a status: {value!r}")


def _normalized(value: Any, bounds: Any, name: str) -> float:
    if isinstance(value, tuple):
        status = _as_status(value[0], name)
        return status.fraction
    if isinstance(value, (Status, str)):
        return _as_status(value, name).fraction
    try:
        num = float(value)
    except (TypeError, ValueError):
        raise InterpretationError(f"input {name!r} is not numeric: {value!r}") from None
    if bounds:
        lo = float(bounds.get("min", 0.0))
        hi = float(bounds.get("max", 1.0))
        if hi > lo:
            num = (num - lo) / (hi - lo)
    return min(1.0, max(0.0, num))

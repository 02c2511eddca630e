"""The shipped component repository and its executable function bindings.

Every control technique the cockpit ships (effort aggregation, tolerance
range checking, earned value analysis, milestone trend analysis, plan
consistency, tracking regularity, defect-detection efficiency, code
quality assessment, and the two interpretation rules) is declared here
as a function definition and wired to an implementation.
"""

from __future__ import annotations

from datetime import datetime

from cockpit.catena.evaluate import (
    EvaluationError,
    ExecutionContext,
    FunctionRegistry,
    PayloadValue,
    TimedPayload,
)
from cockpit.catena.types import (
    ComponentRepository,
    DaoPackageDef,
    DataTypeDef,
    FieldDef,
    FunctionDef,
    MatchTag,
    OutputDef,
    ParameterDef,
    SlotDef,
    ViewDef,
    WebFormDef,
)
from cockpit.controls.earned_value import earned_value
from cockpit.controls.effort import aggregate_effort, tolerance_range_check
from cockpit.controls.milestone import DEFAULT_SLOPE_THRESHOLD, milestone_trend
from cockpit.controls.plan_checks import plan_consistency
from cockpit.controls.quality import ThresholdConfigError, code_quality_assess
from cockpit.controls.tracking import (
    DEFAULT_REGULARITY_THRESHOLD,
    defect_detection_efficiency,
    effort_tracking_regularity,
)
from cockpit.gqm import InterpretationError, InterpretationModelSpec, apply_interpretation
from cockpit.interchange import format_timestamp, parse_duration, parse_timestamp
from cockpit.status import Status


def _f(name: str, ftype: str, optional: bool = False) -> FieldDef:
    return FieldDef(name=name, type=ftype, optional=optional)


def shipped_data_types() -> list[DataTypeDef]:
    return [
        DataTypeDef(
            id="dt-project-plan", kind="project-plan",
            schema=[
                _f("id", "identifier"),
                _f("name", "text", optional=True),
                _f("parent-id", "identifier", optional=True),
                _f("start", "timestamp", optional=True),
                _f("end", "timestamp", optional=True),
                # typed as a plain number so inconsistent (negative) baselines
                # survive ingestion and get flagged by the consistency check
                _f("effort-baseline-hours", "fraction", optional=True),
                _f("is-milestone", "count", optional=True),
            ],
            tags=[MatchTag("project-plan", "structure"), MatchTag("project-plan", "baseline")],
        ),
        DataTypeDef(
            id="dt-effort-log", kind="effort-log",
            schema=[
                _f("person-id", "identifier"),
                _f("activity-id", "identifier"),
                _f("date", "timestamp"),
                _f("hours", "duration-hours"),
            ],
            tags=[MatchTag("effort", "actual")],
        ),
        DataTypeDef(
            id="dt-defect-log", kind="defect-log",
            schema=[
                _f("defect-id", "identifier"),
                _f("detecting-activity-id", "identifier"),
                _f("severity", "text", optional=True),
                _f("opened", "timestamp"),
                _f("closed", "timestamp", optional=True),
            ],
            tags=[MatchTag("defect-detection", "occurrences")],
        ),
        DataTypeDef(
            id="dt-quality-report", kind="quality-report",
            schema=[
                _f("module-id", "identifier"),
                _f("metric-name", "text"),
                _f("value", "fraction"),
            ],
            tags=[MatchTag("source-code", "measurements")],
        ),
        DataTypeDef(
            id="dt-progress", kind="table",
            schema=[
                _f("activity-id", "identifier"),
                _f("date", "timestamp"),
                _f("fraction-complete", "fraction"),
            ],
            tags=[MatchTag("schedule", "progress")],
            accumulation="log",
        ),
        DataTypeDef(
            id="dt-roster", kind="table",
            schema=[_f("person-id", "identifier"), _f("name", "text", optional=True)],
            tags=[MatchTag("team", "membership")],
        ),
        DataTypeDef(
            id="dt-time-series", kind="time-series",
            schema=[_f("timestamp", "timestamp"), _f("value", "fraction")],
            tags=[MatchTag("*", "time-series")],
        ),
        DataTypeDef(
            id="dt-activity-series", kind="table",
            schema=[
                _f("activity-id", "identifier"),
                _f("timestamp", "timestamp"),
                _f("hours", "duration-hours"),
            ],
        ),
        DataTypeDef(
            id="dt-rejected-effort", kind="table",
            schema=[
                _f("person-id", "text", optional=True),
                _f("activity-id", "text", optional=True),
                _f("date", "timestamp", optional=True),
                _f("hours", "fraction", optional=True),
                _f("reason", "text"),
            ],
        ),
        DataTypeDef(
            id="dt-deviation-series", kind="table",
            schema=[
                _f("activity-id", "identifier"),
                _f("timestamp", "timestamp"),
                _f("baseline", "fraction"),
                _f("actual", "fraction"),
                _f("deviation", "fraction"),
                _f("status", "text"),
            ],
        ),
        DataTypeDef(
            id="dt-eva-series", kind="table",
            schema=[
                _f("timestamp", "timestamp"),
                _f("bcws", "money"),
                _f("bcwp", "money"),
                _f("acwp", "money"),
                _f("cpi", "fraction", optional=True),
                _f("spi", "fraction", optional=True),
                _f("cost-variance", "money"),
                _f("schedule-variance", "money"),
            ],
        ),
        DataTypeDef(
            id="dt-milestone-trend", kind="table",
            schema=[
                _f("milestone-id", "identifier"),
                _f("report-date", "timestamp", optional=True),
                _f("predicted-date", "timestamp", optional=True),
                _f("classification", "text", optional=True),
                _f("slope", "fraction", optional=True),
                _f("low-confidence", "count", optional=True),
                _f("status", "text", optional=True),
            ],
        ),
        DataTypeDef(
            id="dt-status", kind="scalar",
            schema=[
                _f("status", "text"),
                _f("score", "fraction", optional=True),
                _f("label", "text", optional=True),
            ],
        ),
        DataTypeDef(
            id="dt-violation-list", kind="table",
            schema=[
                _f("kind", "text"),
                _f("subject", "identifier"),
                _f("message", "text"),
                _f("status", "text"),
            ],
        ),
        DataTypeDef(
            id="dt-regularity-report", kind="table",
            schema=[
                _f("person-id", "identifier"),
                _f("fraction", "fraction"),
                _f("flagged", "count"),
                _f("status", "text"),
            ],
        ),
        DataTypeDef(
            id="dt-efficiency-report", kind="table",
            schema=[
                _f("activity-id", "identifier"),
                _f("defects", "count"),
                _f("hours", "fraction"),
                _f("efficiency", "fraction", optional=True),
                _f("unmeasurable", "count"),
            ],
        ),
        DataTypeDef(
            id="dt-module-status", kind="table",
            schema=[
                _f("module-id", "identifier"),
                _f("metric-name", "text", optional=True),
                _f("value", "fraction", optional=True),
                _f("status", "text"),
            ],
        ),
    ]


def _source_params() -> list[ParameterDef]:
    return [
        ParameterDef("path", "text", mandatory=True),
        ParameterDef("dialect", "text", default="delimited"),
        ParameterDef("credential-ref", "text", default=""),
    ]


def shipped_dao_packages() -> list[DaoPackageDef]:
    return [
        DaoPackageDef(id="dao-project-plan", supported_data_type="dt-project-plan",
                      parameters=_source_params()),
        DaoPackageDef(id="dao-effort-log", supported_data_type="dt-effort-log",
                      parameters=_source_params()),
        DaoPackageDef(id="dao-defect-log", supported_data_type="dt-defect-log",
                      parameters=_source_params()),
        DaoPackageDef(id="dao-quality-report", supported_data_type="dt-quality-report",
                      parameters=_source_params()),
        DaoPackageDef(id="dao-table-file", supported_data_type="*",
                      parameters=_source_params()),
        DaoPackageDef(id="dao-url", supported_data_type="*",
                      parameters=[
                          ParameterDef("url", "text", mandatory=True),
                          ParameterDef("dialect", "text", default="interchange"),
                          ParameterDef("credential-ref", "text", default=""),
                      ]),
    ]


def shipped_web_forms() -> list[WebFormDef]:
    return [
        WebFormDef(id="wf-project-plan", managed_data_type="dt-project-plan",
                   capabilities=["add", "change"]),
        WebFormDef(id="wf-effort", managed_data_type="dt-effort-log",
                   input_slots=[SlotDef("activities", "dt-project-plan", mandatory=True)],
                   capabilities=["add"]),
        WebFormDef(id="wf-progress", managed_data_type="dt-progress",
                   input_slots=[SlotDef("activities", "dt-project-plan", mandatory=True)],
                   capabilities=["add", "change"]),
        WebFormDef(id="wf-roster", managed_data_type="dt-roster",
                   capabilities=["add", "change", "remove"]),
        WebFormDef(id="wf-defect", managed_data_type="dt-defect-log",
                   input_slots=[SlotDef("activities", "dt-project-plan", mandatory=False)],
                   capabilities=["add", "change"]),
        WebFormDef(id="wf-quality-report", managed_data_type="dt-quality-report",
                   capabilities=["add", "change"]),
    ]


def shipped_functions() -> list[FunctionDef]:
    return [
        FunctionDef(
            id="fn-effort-aggregation",
            input_slots=[
                SlotDef("efforts", "dt-effort-log"),
                SlotDef("plan", "dt-project-plan"),
            ],
            outputs=[
                OutputDef("per-activity", "dt-activity-series"),
                OutputDef("rejected", "dt-rejected-effort"),
            ],
            capability_tags=[MatchTag("effort", "aggregation")],
        ),
        FunctionDef(
            id="fn-tolerance-check",
            input_slots=[
                SlotDef("actual", "dt-activity-series"),
                SlotDef("baseline", "dt-project-plan"),
            ],
            outputs=[OutputDef("deviations", "dt-deviation-series")],
            parameters=[
                ParameterDef("lower", "fraction", default=1.0),
                ParameterDef("upper", "fraction", default=0.0),
            ],
            capability_tags=[MatchTag("effort", "deviation")],
        ),
        FunctionDef(
            id="fn-earned-value",
            input_slots=[
                SlotDef("plan", "dt-project-plan"),
                SlotDef("progress", "dt-progress"),
                SlotDef("actuals", "dt-activity-series"),
            ],
            outputs=[OutputDef("eva", "dt-eva-series")],
            capability_tags=[MatchTag("schedule", "earned-value"), MatchTag("cost", "earned-value")],
        ),
        FunctionDef(
            id="fn-milestone-trend",
            input_slots=[SlotDef("snapshots", "dt-project-plan", multiplicity="many")],
            outputs=[OutputDef("trend", "dt-milestone-trend")],
            parameters=[
                ParameterDef("slope-threshold", "fraction", default=DEFAULT_SLOPE_THRESHOLD),
                ParameterDef("milestones", "list", default=[]),
            ],
            capability_tags=[MatchTag("milestones", "adherence"), MatchTag("schedule", "adherence")],
        ),
        FunctionDef(
            id="fn-plan-consistency",
            input_slots=[SlotDef("plan", "dt-project-plan")],
            outputs=[OutputDef("violations", "dt-violation-list")],
            capability_tags=[MatchTag("project-plan", "consistency")],
        ),
        FunctionDef(
            id="fn-effort-regularity",
            input_slots=[
                SlotDef("efforts", "dt-effort-log"),
                SlotDef("roster", "dt-roster"),
            ],
            outputs=[OutputDef("regularity", "dt-regularity-report")],
            parameters=[
                ParameterDef("interval", "duration", default="P7D"),
                ParameterDef("threshold", "fraction", default=DEFAULT_REGULARITY_THRESHOLD),
                ParameterDef("window-start", "timestamp", default=""),
                ParameterDef("window-end", "timestamp", default=""),
            ],
            capability_tags=[MatchTag("effort", "regularity")],
        ),
        FunctionDef(
            id="fn-defect-efficiency",
            input_slots=[
                SlotDef("defects", "dt-defect-log"),
                SlotDef("qa-effort", "dt-activity-series"),
            ],
            outputs=[OutputDef("efficiency", "dt-efficiency-report")],
            capability_tags=[MatchTag("defect-detection", "efficiency")],
        ),
        FunctionDef(
            id="fn-code-quality",
            input_slots=[SlotDef("report", "dt-quality-report")],
            outputs=[
                OutputDef("modules", "dt-module-status"),
                OutputDef("details", "dt-module-status"),
            ],
            parameters=[
                ParameterDef("thresholds", "map", mandatory=True),
                ParameterDef("default-policy", "map", default=None),
            ],
            capability_tags=[MatchTag("source-code", "quality")],
        ),
        FunctionDef(
            id="fn-interpret-worst-of",
            input_slots=[SlotDef("inputs", "*", multiplicity="many")],
            outputs=[OutputDef("status", "dt-status")],
            parameters=[
                ParameterDef("model-id", "text", default=""),
                ParameterDef("input-names", "list", default=[]),
            ],
            capability_tags=[MatchTag("*", "interpretation:worst-of")],
        ),
        FunctionDef(
            id="fn-interpret-weighted",
            input_slots=[SlotDef("inputs", "*", multiplicity="many")],
            outputs=[OutputDef("status", "dt-status")],
            parameters=[
                ParameterDef("model-id", "text", default=""),
                ParameterDef("input-names", "list", default=[]),
                ParameterDef("weights", "map", default={}),
                ParameterDef("normalize", "map", default={}),
                ParameterDef("yellow-bound", "fraction", default=0.33),
                ParameterDef("red-bound", "fraction", default=0.66),
            ],
            capability_tags=[MatchTag("*", "interpretation:weighted-threshold")],
        ),
    ]


def _display_params() -> list[ParameterDef]:
    return [
        ParameterDef("title", "text", default=""),
        ParameterDef("x-label", "text", default=""),
        ParameterDef("y-label", "text", default=""),
        ParameterDef("x-field", "text", default=None),
        ParameterDef("y-fields", "list", default=None),
        ParameterDef("group-field", "text", default=None),
        ParameterDef("size", "text", default=""),
        ParameterDef("color", "text", default=""),
        ParameterDef("thresholds", "map", default=None),
    ]


def shipped_views() -> list[ViewDef]:
    return [
        ViewDef(id="v-line-chart", render_kind="line-chart",
                input_slots=[SlotDef("data", "*")], parameters=_display_params()),
        ViewDef(id="v-bar-chart", render_kind="bar-chart",
                input_slots=[SlotDef("data", "*")], parameters=_display_params()),
        ViewDef(id="v-table", render_kind="table",
                input_slots=[SlotDef("data", "*")],
                parameters=[ParameterDef("title", "text", default=""),
                            ParameterDef("columns", "list", default=None)]),
        ViewDef(id="v-traffic-light", render_kind="traffic-light",
                input_slots=[SlotDef("status", "dt-status")],
                parameters=[ParameterDef("title", "text", default=""),
                            ParameterDef("label", "text", default="")]),
        ViewDef(id="v-milestone-trend-chart", render_kind="milestone-trend-chart",
                input_slots=[SlotDef("trends", "dt-milestone-trend")],
                parameters=[ParameterDef("title", "text", default="")]),
        ViewDef(id="v-composite", render_kind="composite",
                sub_view_slots=["children"],
                parameters=[ParameterDef("title", "text", default="")]),
    ]


def shipped_repository() -> ComponentRepository:
    repo = ComponentRepository()
    for dt in shipped_data_types():
        repo.data_types[dt.id] = dt
    for dao in shipped_dao_packages():
        repo.dao_packages[dao.id] = dao
    for wf in shipped_web_forms():
        repo.web_forms[wf.id] = wf
    for fn in shipped_functions():
        repo.functions[fn.id] = fn
    for vw in shipped_views():
        repo.views[vw.id] = vw
    return repo


# --- executable bindings -------------------------------------------------


def _impl_effort_aggregation(ctx: ExecutionContext) -> dict[str, list[dict]]:
    aggregate = aggregate_effort(ctx.records("efforts"), ctx.records("plan"))
    rows = []
    for activity in sorted(aggregate.series):
        for ts, hours in aggregate.series[activity]:
            rows.append({"activity-id": activity, "timestamp": ts, "hours": hours})
    return {"per-activity": rows, "rejected": aggregate.rejected}


def _impl_tolerance_check(ctx: ExecutionContext) -> dict[str, list[dict]]:
    lower = float(ctx.param("lower"))
    upper = float(ctx.param("upper"))
    actual_rows = ctx.records("actual")
    plan_rows = ctx.records("baseline")
    actual_by_activity: dict[str, list[tuple[str, float]]] = {}
    for rec in actual_rows:
        actual_by_activity.setdefault(str(rec["activity-id"]), []).append(
            (str(rec["timestamp"]), float(rec["hours"])))
    cut = format_timestamp(ctx.as_of)
    rows = []
    for row in plan_rows:
        if row.get("is-milestone") or row.get("id") is None:
            continue
        activity = str(row["id"])
        baseline_value = row.get("effort-baseline-hours")
        points = actual_by_activity.get(activity) or []
        if baseline_value is None or not points:
            continue
        anchor = min(ts for ts, _ in points)
        series = tolerance_range_check(points, [(anchor, float(baseline_value))],
                                       lower, upper, subject=activity)
        visible = [p for p in series.points if p.timestamp <= cut]
        for p in visible:
            rows.append({
                "activity-id": activity,
                "timestamp": p.timestamp,
                "baseline": p.baseline,
                "actual": p.actual,
                "deviation": p.deviation,
                "status": p.status.value,
            })
        if visible:
            latest = visible[-1]
            if latest.deviation > 0 and latest.status is not Status.GREEN:
                ctx.report(activity, "effort-overrun", latest.status,
                           parse_timestamp(latest.timestamp))
    rows.sort(key=lambda r: (r["activity-id"], r["timestamp"]))
    return {"deviations": rows}


def _impl_earned_value(ctx: ExecutionContext) -> dict[str, list[dict]]:
    snapshots = earned_value(ctx.records("plan"), ctx.records("progress"),
                             ctx.records("actuals"), ctx.as_of)
    return {"eva": [s.to_record() for s in snapshots]}


def _impl_milestone_trend(ctx: ExecutionContext) -> dict[str, list[dict]]:
    raw = ctx.input("snapshots")
    if not raw:
        raise EvaluationError("missing mandatory payload for slot 'snapshots'")
    snapshots: list[tuple[datetime, list[dict]]] = []
    for item in raw:
        if isinstance(item, TimedPayload):
            snapshots.append((item.timestamp or ctx.as_of, item.records))
        elif isinstance(item, PayloadValue):
            snapshots.append((ctx.as_of, item.records))
    wanted = [str(m) for m in (ctx.param("milestones") or [])]
    threshold = float(ctx.param("slope-threshold"))
    trends = milestone_trend(snapshots, wanted or None, threshold)
    rows = []
    for trend in trends:
        for report_date, predicted in trend.reports:
            rows.append({
                "milestone-id": trend.milestone,
                "report-date": format_timestamp(report_date),
                "predicted-date": format_timestamp(predicted),
            })
        status = Status.RED if trend.classification == "delayed" else Status.GREEN
        rows.append({
            "milestone-id": trend.milestone,
            "classification": trend.classification,
            "slope": trend.slope,
            "low-confidence": int(trend.low_confidence),
            "status": status.value,
        })
        if trend.classification == "delayed":
            last_report = trend.reports[-1][0] if trend.reports else ctx.as_of
            ctx.report(trend.milestone, "schedule-slip", Status.RED, last_report)
    return {"trend": rows}


def _impl_plan_consistency(ctx: ExecutionContext) -> dict[str, list[dict]]:
    violations = plan_consistency(ctx.records("plan"))
    for v in violations:
        ctx.report(v.subject, "plan-inconsistency", Status.RED)
    return {"violations": [v.to_record() for v in violations]}


def _impl_effort_regularity(ctx: ExecutionContext) -> dict[str, list[dict]]:
    records = ctx.records("efforts")
    roster = [str(r["person-id"]) for r in ctx.records("roster") if r.get("person-id")]
    interval = parse_duration(ctx.param("interval") or "P7D")
    start_param = ctx.param("window-start")
    end_param = ctx.param("window-end")
    stamps = sorted(str(r.get("date", "")) for r in records if r.get("date"))
    if start_param:
        window_start = parse_timestamp(start_param)
    elif stamps:
        window_start = parse_timestamp(stamps[0])
    else:
        window_start = ctx.as_of
    if end_param:
        window_end = parse_timestamp(end_param)
    elif stamps:
        window_end = parse_timestamp(stamps[-1]) + interval
    else:
        window_end = ctx.as_of
    entries = effort_tracking_regularity(records, roster, interval, window_start,
                                         window_end, float(ctx.param("threshold")))
    for entry in entries:
        if entry.flagged:
            ctx.report(entry.person, "regularity", Status.YELLOW)
    return {"regularity": [e.to_record() for e in entries]}


def _impl_defect_efficiency(ctx: ExecutionContext) -> dict[str, list[dict]]:
    defects = ctx.records("defects")
    qa_hours: dict[str, float] = {}
    for rec in ctx.records("qa-effort"):
        # the cumulative series carries running totals; keep the latest
        qa_hours[str(rec["activity-id"])] = float(rec["hours"])
    entries = defect_detection_efficiency(defects, qa_hours)
    return {"efficiency": [e.to_record() for e in entries]}


def _impl_code_quality(ctx: ExecutionContext) -> dict[str, list[dict]]:
    thresholds = ctx.param("thresholds")
    if not isinstance(thresholds, dict):
        raise EvaluationError("parameter 'thresholds' must map metric names to yellow/red bounds")
    try:
        assessments = code_quality_assess(ctx.records("report"), thresholds,
                                          ctx.param("default-policy"))
    except ThresholdConfigError as exc:
        raise EvaluationError(str(exc)) from exc
    modules = []
    details = []
    for assessment in assessments:
        modules.append(assessment.to_summary_record())
        details.extend(assessment.details)
        if assessment.status is not Status.GREEN:
            ctx.report(assessment.module, "quality-threshold", assessment.status)
    return {"modules": modules, "details": details}


def _reduce_interpretation_input(value, name: str):
    """Collapse a producer payload into a status or a number."""
    if isinstance(value, TimedPayload):
        value = PayloadValue(value.data_type, value.records)
    if not isinstance(value, PayloadValue):
        raise EvaluationError(f"interpretation input {name!r} is unavailable")
    records = value.records
    if not records:
        return Status.GREEN
    statuses = []
    score = None
    for rec in records:
        if "status" in rec:
            statuses.append(Status.from_value(rec["status"]))
            if rec.get("score") is not None:
                score = max(score or 0.0, float(rec["score"]))
    if statuses:
        worst = Status.worst(statuses)
        return (worst, score) if score is not None else worst
    if len(records) == 1 and "value" in records[0]:
        return float(records[0]["value"])
    raise EvaluationError(
        f"interpretation input {name!r} carries neither statuses nor a scalar value")


def _impl_interpretation(rule: str):
    def impl(ctx: ExecutionContext) -> dict[str, list[dict]]:
        raw = ctx.input("inputs") or []
        names = [str(n) for n in (ctx.param("input-names") or [])]
        if len(names) != len(raw):
            names = [f"input-{i}" for i in range(len(raw))]
        inputs = {}
        for name, value in zip(names, raw):
            inputs[name] = _reduce_interpretation_input(value, name)
        model = InterpretationModelSpec(
            id=str(ctx.param("model-id") or "model"),
            inputs=names,
            rule=rule,
            parameters={
                "weights": ctx.param("weights") or {},
                "normalize": ctx.param("normalize") or {},
                "yellow-bound": ctx.param("yellow-bound") if ctx.param("yellow-bound") is not None else 0.33,
                "red-bound": ctx.param("red-bound") if ctx.param("red-bound") is not None else 0.66,
            } if rule == "weighted-threshold" else {},
        )
        try:
            status, score = apply_interpretation(model, inputs)
        except InterpretationError as exc:
            raise EvaluationError(str(exc)) from exc
        return {"status": [{"status": status.value, "score": score,
                            "label": str(ctx.param("model-id") or "")}]}
    return impl


def shipped_registry() -> FunctionRegistry:
    registry = FunctionRegistry()
    registry.register("fn-effort-aggregation", _impl_effort_aggregation)
    registry.register("fn-tolerance-check", _impl_tolerance_check)
    registry.register("fn-earned-value", _impl_earned_value)
    registry.register("fn-milestone-trend", _impl_milestone_trend)
    registry.register("fn-plan-consistency", _impl_plan_consistency)
    registry.register("fn-effort-regularity", _impl_effort_regularity)
    registry.register("fn-defect-efficiency", _impl_defect_efficiency)
    registry.register("fn-code-quality", _impl_code_quality)
    registry.register("fn-interpret-worst-of", _impl_interpretation("worst-of"))
    registry.register("fn-interpret-weighted", _impl_interpretation("weighted-threshold"))
    return registry

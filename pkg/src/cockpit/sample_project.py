"""A self-contained sample project: six measurement goals, 17 team members,
ten activities, and a deterministic stream of project data.

The sample reconstructs a mobile-services development project controlled
through the cockpit: plan consistency, effort deviation, schedule
adherence, tracking regularity, code quality, and defect-detection
efficiency.  The requirements phase overruns its 480 h baseline by 25%,
the requirements-approved milestone slips by two weeks in the updated
plan, and two modules violate code-quality thresholds.

Everything here is pure data; tests, the command-line walkthrough, and
the browser cockpit all feed from it.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta, timezone

from cockpit.catena.retrospective import GroundTruthEvent
from cockpit.gqm import (
    DataCollectionSpec,
    GqmGoal,
    GqmMetric,
    GqmPlan,
    GqmQuestion,
    InterpretationModelSpec,
    MetricComputation,
    RenderHint,
)
from cockpit.interchange import format_timestamp, parse_timestamp

PROJECT_START = datetime(2026, 1, 5, tzinfo=timezone.utc)
PROJECT_END = datetime(2026, 6, 26, tzinfo=timezone.utc)
WEEK = timedelta(days=7)

# The first effort batch that pushes the requirements activity past its
# baseline is logged on this Friday.
OVERRUN_DATE = datetime(2026, 2, 20, tzinfo=timezone.utc)

PERSONS = [f"p{i:02d}" for i in range(1, 18)]

QUALITY_THRESHOLDS = {
    "complexity": {"yellow": 10, "red": 20},
    "duplication": {"yellow": 0.1, "red": 0.2},
    "coverage-gap": {"yellow": 0.3, "red": 0.5},
}


def _day(iso: str) -> str:
    return format_timestamp(parse_timestamp(iso))


def baseline_plan_rows() -> list[dict]:
    """Initial project plan: 10 activities plus 3 milestones."""
    return [
        {"id": "act-project", "name": "Virtual office project", "start": _day("2026-01-05"),
         "end": _day("2026-06-26"), "effort-baseline-hours": 3080.0},
        {"id": "act-requirements", "name": "Requirements", "parent-id": "act-project",
         "start": _day("2026-01-05"), "end": _day("2026-02-13"), "effort-baseline-hours": 480.0},
        {"id": "act-design", "name": "Design", "parent-id": "act-project",
         "start": _day("2026-02-16"), "end": _day("2026-03-20"), "effort-baseline-hours": 560.0},
        {"id": "act-implementation", "name": "Implementation", "parent-id": "act-project",
         "start": _day("2026-03-23"), "end": _day("2026-05-15"), "effort-baseline-hours": 960.0},
        {"id": "act-impl-core", "name": "Core services", "parent-id": "act-implementation",
         "start": _day("2026-03-23"), "end": _day("2026-04-24"), "effort-baseline-hours": 400.0},
        {"id": "act-impl-services", "name": "Mobile services", "parent-id": "act-implementation",
         "start": _day("2026-03-30"), "end": _day("2026-05-08"), "effort-baseline-hours": 360.0},
        {"id": "act-impl-ui", "name": "Client UI", "parent-id": "act-implementation",
         "start": _day("2026-04-06"), "end": _day("2026-05-15"), "effort-baseline-hours": 200.0},
        {"id": "act-testing", "name": "System testing", "parent-id": "act-project",
         "start": _day("2026-05-18"), "end": _day("2026-06-19"), "effort-baseline-hours": 520.0},
        {"id": "act-qa-review", "name": "QA reviews", "parent-id": "act-project",
         "start": _day("2026-02-16"), "end": _day("2026-06-19"), "effort-baseline-hours": 240.0},
        {"id": "act-management", "name": "Project management", "parent-id": "act-project",
         "start": _day("2026-01-05"), "end": _day("2026-06-26"), "effort-baseline-hours": 320.0},
        {"id": "ms-requirements-approved", "name": "Requirements approved", "parent-id": "act-project",
         "start": _day("2026-02-13"), "end": _day("2026-02-13"), "is-milestone": 1},
        {"id": "ms-feature-complete", "name": "Feature complete", "parent-id": "act-project",
         "start": _day("2026-05-15"), "end": _day("2026-05-15"), "is-milestone": 1},
        {"id": "ms-release", "name": "Release", "parent-id": "act-project",
         "start": _day("2026-06-26"), "end": _day("2026-06-26"), "is-milestone": 1},
    ]


def updated_plan_rows() -> list[dict]:
    """Re-planned after the requirements overrun: the phase and its milestone
    move out by two weeks; downstream activities keep their dates."""
    rows = []
    for row in baseline_plan_rows():
        row = dict(row)
        if row["id"] == "act-requirements":
            row["end"] = _day("2026-02-27")
        if row["id"] == "ms-requirements-approved":
            row["start"] = _day("2026-02-27")
            row["end"] = _day("2026-02-27")
        rows.append(row)
    return rows


# (activity, first week, last week inclusive, persons, hours per person per week)
_WORK_PLAN = [
    ("act-requirements", 0, 5, PERSONS[0:10], 8.0),
    ("act-requirements", 6, 7, PERSONS[0:5], 12.0),  # the overrun weeks
    ("act-design", 6, 10, PERSONS[5:12], 16.0),
    ("act-impl-core", 11, 15, PERSONS[0:5], 16.0),
    ("act-impl-services", 12, 17, PERSONS[5:11], 10.0),
    ("act-impl-ui", 13, 17, PERSONS[11:13], 20.0),
    ("act-testing", 19, 23, PERSONS[0:13], 8.0),
    ("act-qa-review", 6, 20, PERSONS[13:15], 8.0),
    ("act-management", 0, 19, PERSONS[15:16], 12.0),
    ("act-management", 0, 19, PERSONS[16:17], 4.0),
]


def week_friday(week: int) -> datetime:
    return PROJECT_START + week * WEEK + timedelta(days=4)


def effort_records() -> list[dict]:
    """Weekly effort bookings, logged on Fridays."""
    records = []
    for activity, first, last, persons, hours in _WORK_PLAN:
        for week in range(first, last + 1):
            date = format_timestamp(week_friday(week))
            for person in persons:
                records.append({"person-id": person, "activity-id": activity,
                                "date": date, "hours": hours})
    records.sort(key=lambda r: (r["date"], r["activity-id"], r["person-id"]))
    return records


def effort_batches() -> list[tuple[datetime, list[dict]]]:
    """Effort records grouped into weekly form submissions (Friday 17:00)."""
    by_date: dict[str, list[dict]] = {}
    for rec in effort_records():
        by_date.setdefault(rec["date"], []).append(rec)
    out = []
    for date in sorted(by_date):
        submitted = parse_timestamp(date) + timedelta(hours=17)
        out.append((submitted, by_date[date]))
    return out


def progress_records() -> list[dict]:
    """Biweekly percent-complete reports per leaf activity.

    Reported progress follows the plan linearly except for requirements,
    which completes over its actual (extended) window.
    """
    windows = {
        "act-requirements": ("2026-01-05", "2026-02-27"),
        "act-design": ("2026-02-16", "2026-03-20"),
        "act-impl-core": ("2026-03-23", "2026-04-24"),
        "act-impl-services": ("2026-03-30", "2026-05-08"),
        "act-impl-ui": ("2026-04-06", "2026-05-15"),
        "act-testing": ("2026-05-18", "2026-06-19"),
        "act-qa-review": ("2026-02-16", "2026-06-19"),
        "act-management": ("2026-01-05", "2026-06-26"),
    }
    records = []
    for week in range(1, 26, 2):
        date = week_friday(week)
        for activity in sorted(windows):
            start_s, end_s = windows[activity]
            start, end = parse_timestamp(start_s), parse_timestamp(end_s)
            if date < start:
                continue
            span = (end - start).total_seconds()
            fraction = 1.0 if date >= end else (date - start).total_seconds() / span
            records.append({"activity-id": activity, "date": format_timestamp(date),
                            "fraction-complete": round(fraction, 4)})
    return records


def progress_batches() -> list[tuple[datetime, list[dict]]]:
    by_date: dict[str, list[dict]] = {}
    for rec in progress_records():
        by_date.setdefault(rec["date"], []).append(rec)
    return [(parse_timestamp(date) + timedelta(hours=18), by_date[date])
            for date in sorted(by_date)]


def roster_records() -> list[dict]:
    return [{"person-id": p, "name": f"Member {p[1:]}"} for p in PERSONS]


def quality_report_rows() -> list[dict]:
    return [
        {"module-id": "mod-api", "metric-name": "complexity", "value": 6},
        {"module-id": "mod-api", "metric-name": "coverage-gap", "value": 0.1},
        {"module-id": "mod-api", "metric-name": "duplication", "value": 0.04},
        {"module-id": "mod-core", "metric-name": "complexity", "value": 8},
        {"module-id": "mod-core", "metric-name": "coverage-gap", "value": 0.2},
        {"module-id": "mod-core", "metric-name": "duplication", "value": 0.05},
        {"module-id": "mod-services", "metric-name": "complexity", "value": 24},
        {"module-id": "mod-services", "metric-name": "coverage-gap", "value": 0.25},
        {"module-id": "mod-services", "metric-name": "duplication", "value": 0.08},
        {"module-id": "mod-ui", "metric-name": "complexity", "value": 9},
        {"module-id": "mod-ui", "metric-name": "coverage-gap", "value": 0.28},
        {"module-id": "mod-ui", "metric-name": "duplication", "value": 0.15},
    ]


def defect_rows() -> list[dict]:
    rows = []
    openings = [
        ("act-qa-review", "2026-02-20", 4), ("act-qa-review", "2026-03-06", 5),
        ("act-qa-review", "2026-03-27", 4), ("act-qa-review", "2026-04-17", 4),
        ("act-qa-review", "2026-05-08", 3), ("act-testing", "2026-05-22", 6),
        ("act-testing", "2026-06-05", 4),
    ]
    index = 0
    for activity, date, count in openings:
        for _ in range(count):
            index += 1
            rows.append({
                "defect-id": f"d{index:03d}",
                "detecting-activity-id": activity,
                "severity": ["minor", "major", "critical"][index % 3],
                "opened": _day(date),
            })
    return rows


def _csv(rows: list[dict], columns: list[str]) -> str:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join("" if row.get(c) is None else str(row.get(c)) for c in columns))
    return "\n".join(lines) + "\n"


def source_files() -> dict[str, str]:
    """Delimited source files served to the data access packages."""
    return {
        "plan.csv": _csv(baseline_plan_rows(),
                         ["id", "name", "parent-id", "start", "end",
                          "effort-baseline-hours", "is-milestone"]),
        "effort.csv": _csv(effort_records(), ["person-id", "activity-id", "date", "hours"]),
        "quality.csv": _csv(quality_report_rows(), ["module-id", "metric-name", "value"]),
        "defects.csv": _csv(defect_rows(),
                            ["defect-id", "detecting-activity-id", "severity", "opened", "closed"]),
    }


def _dcs(source: str, manual: bool, interval: str, collector: tuple[str, str],
         start: datetime = PROJECT_START, end: datetime = PROJECT_END) -> DataCollectionSpec:
    from cockpit.interchange import parse_duration

    return DataCollectionSpec(
        collector_kind=collector[0], collector_name=collector[1], source=source,
        start=start, end=end, interval=parse_duration(interval), manual=manual)


def six_goal_plan() -> GqmPlan:
    """The sample measurement plan: six goals, seven questions, 16 metrics."""
    plan = GqmPlan(id="plan-virtual-office")

    goals = [
        GqmGoal(id="g1", object="the project plan",
                purpose="monitoring the consistency of the plan",
                viewpoint="the project manager"),
        GqmGoal(id="g2", object="the project plan",
                purpose="comparing the actual effort with the planned effort",
                viewpoint="the project manager"),
        GqmGoal(id="g3", object="the project plan",
                purpose="monitoring schedule adherence",
                viewpoint="the project manager"),
        GqmGoal(id="g4", object="the project plan",
                purpose="monitoring effort tracking regularity",
                viewpoint="the project manager"),
        GqmGoal(id="g5", object="the source code",
                purpose="monitoring the quality",
                viewpoint="the quality assurance manager",
                interpretation_model="im-g5"),
        GqmGoal(id="g6", object="the defect detection activities",
                purpose="monitoring their efficiency",
                viewpoint="the quality assurance manager"),
    ]
    for goal in goals:
        plan.goals[goal.id] = goal

    questions = [
        GqmQuestion(id="q1-1", goal="g1", text="Is the project plan internally consistent?",
                    interpretation_model="im-q1",
                    render_hints=[
                        RenderHint("traffic-light", {"title": "Plan consistency"}, source="status"),
                        RenderHint("table", {"title": "Plan violations"}, source="m-plan-violations"),
                    ]),
        GqmQuestion(id="q2-1", goal="g2",
                    text="What is the absolute effort deviation per activity?",
                    render_hints=[RenderHint("line-chart", {
                        "title": "Effort: baseline vs actual",
                        "y-fields": ["baseline", "actual", "deviation"]})]),
        GqmQuestion(id="q3-1", goal="g3",
                    text="How do predicted milestone dates evolve across plan updates?",
                    render_hints=[RenderHint("milestone-trend-chart",
                                             {"title": "Milestone trends"})]),
        GqmQuestion(id="q3-2", goal="g3",
                    text="How do cost and schedule performance indices evolve?",
                    render_hints=[RenderHint("line-chart", {
                        "title": "Performance indices", "y-fields": ["cpi", "spi"]})]),
        GqmQuestion(id="q4-1", goal="g4",
                    text="How regularly does each team member report effort?"),
        GqmQuestion(id="q5-1", goal="g5",
                    text="Which modules violate the code-quality thresholds?",
                    interpretation_model="im-q5",
                    render_hints=[
                        RenderHint("traffic-light", {"title": "Code quality"}, source="status"),
                        RenderHint("table", {"title": "Module quality"}, source="m-code-quality"),
                    ]),
        GqmQuestion(id="q6-1", goal="g6",
                    text="How many defects are found per review hour?"),
    ]
    for question in questions:
        plan.questions[question.id] = question

    metrics = [
        GqmMetric(id="m-plan-doc", name="project plan document", kind="simple",
                  questions=["q1-1", "q3-1", "q3-2"],
                  measured_object="project-plan", quality_attribute="structure",
                  dcs=_dcs("plan.csv", True, "P14D", ("role", "project-manager"))),
        GqmMetric(id="m-effort-baseline", name="per-activity effort baseline", kind="simple",
                  questions=["q2-1"],
                  measured_object="project-plan", quality_attribute="baseline",
                  dcs=_dcs("plan.csv", True, "P180D", ("role", "project-manager"))),
        GqmMetric(id="m-activity-list", name="activity list", kind="simple",
                  questions=["q2-1"],
                  measured_object="project-plan", quality_attribute="structure",
                  dcs=_dcs("plan.csv", True, "P30D", ("role", "project-manager"))),
        GqmMetric(id="m-actual-effort", name="actual effort per person and activity",
                  kind="simple", questions=["q2-1", "q4-1"],
                  measured_object="effort", quality_attribute="actual",
                  dcs=_dcs("team effort reports", True, "P7D", ("role", "team-member"))),
        GqmMetric(id="m-progress", name="activity percent complete", kind="simple",
                  questions=["q3-2"],
                  measured_object="schedule", quality_attribute="progress",
                  dcs=_dcs("activity progress reports", True, "P14D", ("role", "project-manager"))),
        GqmMetric(id="m-roster", name="team roster", kind="simple",
                  questions=["q4-1"],
                  measured_object="team", quality_attribute="membership",
                  dcs=_dcs("team roster", True, "P90D", ("role", "project-manager"))),
        GqmMetric(id="m-quality-report", name="static analysis report", kind="simple",
                  questions=["q5-1"],
                  measured_object="source-code", quality_attribute="measurements",
                  dcs=_dcs("quality.csv", False, "P14D", ("tool", "static-analyzer"),
                           start=parse_timestamp("2026-02-16"))),
        GqmMetric(id="m-defect-log", name="defect log", kind="simple",
                  questions=["q6-1"],
                  measured_object="defect-detection", quality_attribute="occurrences",
                  dcs=_dcs("defects.csv", False, "P7D", ("tool", "defect-tracker"),
                           start=parse_timestamp("2026-02-16"))),
        GqmMetric(id="m-effort-aggregated", name="aggregated effort per activity",
                  kind="complex", questions=["q2-1"],
                  measured_object="effort", quality_attribute="aggregation",
                  computation=MetricComputation(inputs=["m-actual-effort", "m-activity-list"])),
        GqmMetric(id="m-effort-deviation", name="effort plan deviation", kind="complex",
                  questions=["q2-1"],
                  measured_object="effort", quality_attribute="deviation",
                  computation=MetricComputation(
                      inputs=["m-effort-aggregated", "m-effort-baseline"],
                      parameters={"lower": 1.0, "upper": 0.0})),
        GqmMetric(id="m-milestone-trend", name="milestone date trend", kind="complex",
                  questions=["q3-1"],
                  measured_object="milestones", quality_attribute="adherence",
                  computation=MetricComputation(inputs=["m-plan-doc"],
                                                parameters={"slope-threshold": 0.1})),
        GqmMetric(id="m-eva", name="earned value indices", kind="complex",
                  questions=["q3-2"],
                  measured_object="schedule", quality_attribute="earned-value",
                  computation=MetricComputation(
                      inputs=["m-plan-doc", "m-progress", "m-effort-aggregated"])),
        GqmMetric(id="m-plan-violations", name="plan consistency violations", kind="complex",
                  questions=["q1-1"],
                  measured_object="project-plan", quality_attribute="consistency",
                  computation=MetricComputation(inputs=["m-plan-doc"])),
        GqmMetric(id="m-regularity", name="effort tracking regularity", kind="complex",
                  questions=["q4-1"],
                  measured_object="effort", quality_attribute="regularity",
                  computation=MetricComputation(
                      inputs=["m-actual-effort", "m-roster"],
                      parameters={"interval": "P7D", "threshold": 0.8,
                                  "window-start": format_timestamp(PROJECT_START),
                                  "window-end": _day("2026-03-01")})),
        GqmMetric(id="m-code-quality", name="module quality status", kind="complex",
                  questions=["q5-1"],
                  measured_object="source-code", quality_attribute="quality",
                  computation=MetricComputation(
                      inputs=["m-quality-report"],
                      parameters={"thresholds": QUALITY_THRESHOLDS})),
        GqmMetric(id="m-defect-efficiency", name="defects found per review hour",
                  kind="complex", questions=["q6-1"],
                  measured_object="defect-detection", quality_attribute="efficiency",
                  computation=MetricComputation(
                      inputs=["m-defect-log", "m-effort-aggregated"])),
    ]
    for metric in metrics:
        plan.metrics[metric.id] = metric

    models = [
        InterpretationModelSpec(id="im-q1", inputs=["m-plan-violations"], rule="worst-of"),
        InterpretationModelSpec(id="im-q5", inputs=["m-code-quality"], rule="worst-of"),
        InterpretationModelSpec(id="im-g5", inputs=["q5-1"], rule="worst-of"),
    ]
    for model in models:
        plan.interpretation_models[model.id] = model

    plan.annotations = ["supports business goal: predictable delivery of the virtual office programme"]
    return plan


@dataclass
class FormSubmissionFixture:
    form_instance: str
    submitted_at: datetime
    records: list[dict]
    action: str = "add"


REPLAN_AT = parse_timestamp("2026-02-28") + timedelta(hours=8)


def form_submissions() -> list[FormSubmissionFixture]:
    """The project's manual data entry, in chronological order.

    The project manager imports the plan every two weeks (the document
    changes once, after the requirements overrun); team members submit
    effort weekly; progress arrives biweekly; the roster once.
    """
    day_one = PROJECT_START + timedelta(hours=8)
    out = [
        FormSubmissionFixture("wfi-m-effort-baseline", day_one, baseline_plan_rows()),
        FormSubmissionFixture("wfi-m-roster", day_one, roster_records()),
    ]
    for week in range(0, 25, 2):
        imported_at = PROJECT_START + week * WEEK + timedelta(hours=8)
        rows = updated_plan_rows() if imported_at >= REPLAN_AT else baseline_plan_rows()
        action = "add" if week == 0 else "change"
        out.append(FormSubmissionFixture("wfi-m-plan-doc", imported_at, rows, action=action))
    for week in range(0, 25, 4):
        imported_at = PROJECT_START + week * WEEK + timedelta(hours=9)
        rows = updated_plan_rows() if imported_at >= REPLAN_AT else baseline_plan_rows()
        action = "add" if week == 0 else "change"
        out.append(FormSubmissionFixture("wfi-m-activity-list", imported_at, rows, action=action))
    out.append(FormSubmissionFixture("wfi-m-plan-doc", REPLAN_AT, updated_plan_rows(),
                                     action="change"))
    for submitted, records in effort_batches():
        out.append(FormSubmissionFixture("wfi-m-actual-effort", submitted, records))
    for submitted, records in progress_batches():
        out.append(FormSubmissionFixture("wfi-m-progress", submitted, records))
    out.sort(key=lambda s: (s.submitted_at, s.form_instance))
    return out


def ground_truth() -> list[GroundTruthEvent]:
    """What actually went wrong, for the detection retrospective."""
    return [
        GroundTruthEvent(
            event_id="ev-requirements-overrun", subject="act-requirements",
            kind="effort-overrun", occurred_at=OVERRUN_DATE,
            deadline=OVERRUN_DATE + WEEK),
        GroundTruthEvent(
            event_id="ev-milestone-slip", subject="ms-requirements-approved",
            kind="schedule-slip", occurred_at=parse_timestamp("2026-02-28"),
            deadline=parse_timestamp("2026-03-14")),
        GroundTruthEvent(
            event_id="ev-services-quality", subject="mod-services",
            kind="quality-threshold", occurred_at=parse_timestamp("2026-02-16"),
            deadline=parse_timestamp("2026-03-02")),
    ]


def evaluation_dates() -> list[datetime]:
    """Weekly control-board evaluations, Saturdays at noon."""
    out = []
    cursor = PROJECT_START + timedelta(days=5, hours=12)
    while cursor <= PROJECT_END + WEEK:
        out.append(cursor)
        cursor += WEEK
    return out


def seed_store(store, vc, repo) -> None:
    """Apply every form submission fixture to a store, exactly as the
    service's form handler would: validated records, payload stamped with
    the submission time, source labelled with the form instance."""
    from cockpit.catena.types import validate_records

    for sub in form_submissions():
        wfi = vc.web_form_instances[sub.form_instance]
        entry = vc.data_entries[wfi.target_data_entry]
        dtype = repo.data_types[entry.data_type]
        accepted, rejected = validate_records(dtype, sub.records)
        if rejected:
            raise AssertionError(f"sample records must validate: {rejected[0]}")
        store.add(entry.id, sub.submitted_at, accepted, action=sub.action,
                  source=f"form:{sub.form_instance}")

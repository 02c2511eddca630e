"""Goal template parsing, plan validation, interpretation rules."""

import pytest
from hypothesis import given, strategies as st

from cockpit.gqm import (
    DataCollectionSpec,
    GqmGoal,
    GqmMetric,
    GqmPlan,
    GqmQuestion,
    InterpretationError,
    InterpretationModelSpec,
    MetricComputation,
    TemplateMismatch,
    apply_interpretation,
    parse_goal_sentence,
    render_goal_sentence,
    validate_plan,
)
from cockpit.interchange import parse_duration, parse_timestamp
from cockpit.sample_project import six_goal_plan
from cockpit.status import Status

GOAL_SENTENCES = [
    ("Analyze the project plan for the purpose of monitoring the consistency of the plan "
     "from the point of view of the project manager.",
     ("the project plan", "monitoring the consistency of the plan", "the project manager")),
    ("Analyze the project plan for the purpose of monitoring schedule adherence "
     "from the point of view of the project manager.",
     ("the project plan", "monitoring schedule adherence", "the project manager")),
    ("Analyze the source code for the purpose of monitoring the quality "
     "from the point of view of the quality assurance manager.",
     ("the source code", "monitoring the quality", "the quality assurance manager")),
    ("Analyze the defect detection activities for the purpose of monitoring their efficiency "
     "from the point of view of the quality assurance manager.",
     ("the defect detection activities", "monitoring their efficiency",
      "the quality assurance manager")),
]


@pytest.mark.parametrize("sentence,facets", GOAL_SENTENCES)
def test_parse_goal_sentences(sentence, facets):
    goal = parse_goal_sentence(sentence)
    assert (goal.object, goal.purpose, goal.viewpoint) == facets


def test_parse_template_identity():
    goal = parse_goal_sentence("Analyze X for the purpose of Y from the point of view of the Z")
    assert (goal.object, goal.purpose, goal.viewpoint) == ("X", "Y", "the Z")


def test_parse_with_quality_focus():
    goal = parse_goal_sentence(
        "Analyze the build for the purpose of characterization with respect to duration "
        "from the point of view of the release manager.")
    assert goal.quality_focus == "duration"
    assert goal.purpose == "characterization"


def test_parse_mismatch_names_template():
    with pytest.raises(TemplateMismatch) as err:
        parse_goal_sentence("Analyze the plan from the point of view of the manager.")
    assert "for the purpose of" in str(err.value)


@pytest.mark.parametrize("sentence,_", GOAL_SENTENCES)
def test_round_trip_parse_render(sentence, _):
    goal = parse_goal_sentence(sentence)
    again = parse_goal_sentence(render_goal_sentence(goal))
    assert (goal.object, goal.purpose, goal.quality_focus, goal.viewpoint) == \
        (again.object, again.purpose, again.quality_focus, again.viewpoint)


def test_goals_from_text_one_per_line():
    from cockpit.gqm import goals_from_text

    text = "\n".join([
        "# control goals",
        GOAL_SENTENCES[0][0],
        "",
        GOAL_SENTENCES[2][0],
    ])
    goals = goals_from_text(text)
    assert [g.id for g in goals] == ["g1", "g2"]
    assert goals[0].object == "the project plan"
    assert goals[1].viewpoint == "the quality assurance manager"
    with pytest.raises(TemplateMismatch):
        goals_from_text("not a goal sentence at all")


def _dcs():
    return DataCollectionSpec(
        collector_kind="role", collector_name="pm", source="plan.csv",
        start=parse_timestamp("2026-01-01"), end=parse_timestamp("2026-06-01"),
        interval=parse_duration("P7D"), manual=True)


def _tiny_plan() -> GqmPlan:
    plan = GqmPlan(id="p")
    plan.goals["g"] = GqmGoal(id="g", object="o", purpose="p", viewpoint="v")
    plan.questions["q"] = GqmQuestion(id="q", goal="g", text="?")
    plan.metrics["m1"] = GqmMetric(id="m1", name="m1", kind="simple", questions=["q"],
                                   measured_object="o", quality_attribute="a", dcs=_dcs())
    return plan


def test_validate_plan_passes_sample():
    assert validate_plan(six_goal_plan()).passed


def test_validate_plan_empty_passes():
    assert validate_plan(GqmPlan(id="empty")).passed


def test_validate_plan_detects_metric_cycle():
    plan = _tiny_plan()
    plan.metrics["m2"] = GqmMetric(id="m2", name="m2", kind="complex", questions=["q"],
                                   computation=MetricComputation(inputs=["m3"]))
    plan.metrics["m3"] = GqmMetric(id="m3", name="m3", kind="complex", questions=["q"],
                                   computation=MetricComputation(inputs=["m2"]))
    report = validate_plan(plan)
    assert not report.passed
    cycle_items = [i for i in report.failures if i.subject == "metric-derivation"]
    assert cycle_items and "m2" in cycle_items[0].message


def test_validate_plan_detects_orphans_and_field_rules():
    plan = _tiny_plan()
    plan.questions["q-orphan"] = GqmQuestion(id="q-orphan", goal="missing", text="?")
    plan.metrics["m-both"] = GqmMetric(
        id="m-both", name="x", kind="simple", questions=["q"],
        dcs=_dcs(), computation=MetricComputation(inputs=["m1"]))
    plan.metrics["m-none"] = GqmMetric(id="m-none", name="x", kind="complex", questions=["q"])
    report = validate_plan(plan)
    failed = {item.subject for item in report.failures}
    assert {"q-orphan", "m-both", "m-none"} <= failed


def test_validate_plan_checks_model_references_and_weights():
    plan = _tiny_plan()
    plan.interpretation_models["im"] = InterpretationModelSpec(
        id="im", inputs=["m1", "nope"], rule="weighted-threshold",
        parameters={"weights": {"m1": 0.7, "nope": 0.7}, "yellow-bound": 0.5, "red-bound": 0.2})
    report = validate_plan(plan)
    messages = " | ".join(i.message for i in report.failures if i.subject == "im")
    assert "undeclared" in messages
    assert "sum to 1" in messages
    assert "yellow bound" in messages


def _worst_of(n: int) -> InterpretationModelSpec:
    return InterpretationModelSpec(id="im", inputs=[f"i{k}" for k in range(n)], rule="worst-of")


def test_worst_of_lattice_maximum():
    status, _ = apply_interpretation(
        _worst_of(3), {"i0": Status.GREEN, "i1": Status.GREEN, "i2": Status.RED})
    assert status is Status.RED


def test_worst_of_singleton_green():
    status, score = apply_interpretation(_worst_of(1), {"i0": Status.GREEN})
    assert status is Status.GREEN
    assert score == 0.0


def test_missing_input_named():
    with pytest.raises(InterpretationError) as err:
        apply_interpretation(_worst_of(2), {"i0": Status.GREEN})
    assert "i1" in str(err.value)


def test_weighted_threshold_arithmetic():
    # hand oracle: 0.5*0.2 + 0.5*0.4 = 0.3, between yellow 0.25 and red 0.5
    model = InterpretationModelSpec(
        id="im", inputs=["a", "b"], rule="weighted-threshold",
        parameters={"weights": {"a": 0.5, "b": 0.5}, "yellow-bound": 0.25, "red-bound": 0.5})
    status, score = apply_interpretation(model, {"a": 0.2, "b": 0.4})
    assert status is Status.YELLOW
    assert score == pytest.approx(0.3)


def test_weighted_threshold_normalization():
    model = InterpretationModelSpec(
        id="im", inputs=["a"], rule="weighted-threshold",
        parameters={"weights": {"a": 1.0}, "normalize": {"a": {"min": 0, "max": 200}},
                    "yellow-bound": 0.25, "red-bound": 0.5})
    assert apply_interpretation(model, {"a": 40})[1] == pytest.approx(0.2)
    assert apply_interpretation(model, {"a": 400})[1] == 1.0  # clamped


_statuses = st.sampled_from([Status.GREEN, Status.YELLOW, Status.RED])


@given(st.lists(_statuses, min_size=1, max_size=6))
def test_worst_of_is_idempotent_and_commutative(statuses):
    model = _worst_of(len(statuses))
    inputs = {f"i{k}": s for k, s in enumerate(statuses)}
    status, _ = apply_interpretation(model, inputs)
    reversed_inputs = {f"i{k}": s for k, s in enumerate(reversed(statuses))}
    assert apply_interpretation(model, reversed_inputs)[0] is status
    doubled = statuses + statuses
    model2 = _worst_of(len(doubled))
    inputs2 = {f"i{k}": s for k, s in enumerate(doubled)}
    assert apply_interpretation(model2, inputs2)[0] is status


@given(st.lists(_statuses, min_size=1, max_size=5), st.integers(0, 4))
def test_worst_of_monotone_in_each_input(statuses, position):
    position %= len(statuses)
    model = _worst_of(len(statuses))
    base, _ = apply_interpretation(model, {f"i{k}": s for k, s in enumerate(statuses)})
    bumped = list(statuses)
    bumped[position] = Status.RED
    worse, _ = apply_interpretation(model, {f"i{k}": s for k, s in enumerate(bumped)})
    assert worse.severity >= base.severity


@given(st.lists(st.floats(0, 1), min_size=1, max_size=5), st.integers(0, 4),
       st.floats(0.01, 0.99))
def test_weighted_threshold_monotone(values, position, bump):
    position %= len(values)
    n = len(values)
    model = InterpretationModelSpec(
        id="im", inputs=[f"i{k}" for k in range(n)], rule="weighted-threshold",
        parameters={"weights": {f"i{k}": 1.0 / n for k in range(n)},
                    "yellow-bound": 0.33, "red-bound": 0.66})
    before, _ = apply_interpretation(model, {f"i{k}": v for k, v in enumerate(values)})
    raised = list(values)
    raised[position] = min(1.0, raised[position] + bump)
    after, _ = apply_interpretation(model, {f"i{k}": v for k, v in enumerate(raised)})
    assert after.severity >= before.severity

"""Evaluation semantics: ordering, isolation, time cuts, determinism."""

import random
from datetime import timedelta

from cockpit.catena import ProjectDataStore, evaluate
from cockpit.catena.evaluate import FunctionRegistry
from cockpit.catena.instances import (
    DataEntry,
    FunctionInstance,
    ProducerRef,
    Schedule,
    ViewInstance,
    VisualizationCatena,
)
from cockpit.catena.types import (
    ComponentRepository,
    DataTypeDef,
    FieldDef,
    FunctionDef,
    OutputDef,
    SlotDef,
    ViewDef,
)
from cockpit.interchange import content_hash, parse_duration, parse_timestamp

T0 = parse_timestamp("2026-01-05")
AS_OF = parse_timestamp("2026-03-07T12:00:00Z")


def _mini_world():
    """Two chains: a -> b and c -> d, over one numeric entry each."""
    repo = ComponentRepository()
    repo.data_types["dt-num"] = DataTypeDef(
        id="dt-num", kind="table", schema=[FieldDef("value", "fraction")])
    repo.functions["fn-sum"] = FunctionDef(
        id="fn-sum", input_slots=[SlotDef("data", "dt-num")],
        outputs=[OutputDef("total", "dt-num")])
    repo.views["v-table"] = ViewDef(id="v-table", render_kind="table",
                                    input_slots=[SlotDef("data", "*")])
    schedule = Schedule(start=T0, end=T0 + timedelta(days=180), interval=parse_duration("P7D"))
    vc = VisualizationCatena()
    vc.data_entries["e1"] = DataEntry(id="e1", data_type="dt-num", origin="manual",
                                      schedule=schedule)
    vc.data_entries["e2"] = DataEntry(id="e2", data_type="dt-num", origin="manual",
                                      schedule=schedule)
    vc.function_instances["a"] = FunctionInstance(
        id="a", function="fn-sum", slot_bindings={"data": ProducerRef(entry="e1")})
    vc.function_instances["b"] = FunctionInstance(
        id="b", function="fn-sum", slot_bindings={"data": ProducerRef(instance="a", output="total")})
    vc.function_instances["c"] = FunctionInstance(
        id="c", function="fn-sum", slot_bindings={"data": ProducerRef(entry="e2")})
    vc.function_instances["d"] = FunctionInstance(
        id="d", function="fn-sum", slot_bindings={"data": ProducerRef(instance="c", output="total")})
    vc.view_instances["v-b"] = ViewInstance(
        id="v-b", view="v-table", slot_bindings={"data": ProducerRef(instance="b", output="total")})
    vc.view_instances["v-d"] = ViewInstance(
        id="v-d", view="v-table", slot_bindings={"data": ProducerRef(instance="d", output="total")})

    registry = FunctionRegistry()

    def _sum(ctx):
        total = sum(r["value"] for r in ctx.records("data"))
        return {"total": [{"value": total}]}

    registry.register("fn-sum", _sum)
    return vc, repo, registry


def test_missing_mandatory_payload_fails_and_skips_downstream():
    vc, repo, registry = _mini_world()
    store = ProjectDataStore()
    store.add("e2", T0, [{"value": 2.0}])
    result = evaluate(vc, repo, store, AS_OF, registry)
    assert result.functions["a"].status == "failed"
    assert "e1" in result.functions["a"].message or "data" in result.functions["a"].message
    assert result.functions["b"].status == "skipped"
    assert result.views["v-b"].status == "skipped"
    # the unaffected chain keeps running
    assert result.functions["c"].status == "ok"
    assert result.functions["d"].status == "ok"
    assert result.views["v-d"].status == "ok"
    assert not result.checks.passed


def test_failure_isolation_limits_blast_radius_to_downstream_cone():
    vc, repo, registry = _mini_world()

    def _boom(ctx):
        raise_slot = ctx.records("data")
        if raise_slot and raise_slot[0]["value"] < 0:
            from cockpit.catena.evaluate import EvaluationError
            raise EvaluationError("negative input")
        total = sum(r["value"] for r in raise_slot)
        return {"total": [{"value": total}]}

    registry.register("fn-sum", _boom)
    store = ProjectDataStore()
    store.add("e1", T0, [{"value": -1.0}])
    store.add("e2", T0, [{"value": 2.0}])
    result = evaluate(vc, repo, store, AS_OF, registry)
    assert result.functions["a"].status == "failed"
    assert result.functions["b"].status == "skipped"
    assert [result.functions[f].status for f in ("c", "d")] == ["ok", "ok"]


def test_time_cut_excludes_future_payloads():
    vc, repo, registry = _mini_world()
    store = ProjectDataStore()
    store.add("e1", T0, [{"value": 1.0}])
    store.add("e2", T0, [{"value": 2.0}])
    baseline = evaluate(vc, repo, store, AS_OF, registry)
    # inject payloads after the cut; the result must be bit-identical
    store.add("e1", AS_OF + timedelta(seconds=1), [{"value": 100.0}])
    store.add("e2", AS_OF + timedelta(days=30), [{"value": 100.0}])
    cut = evaluate(vc, repo, store, AS_OF, registry)
    assert content_hash(cut.to_dict()) == content_hash(baseline.to_dict())
    later = evaluate(vc, repo, store, AS_OF + timedelta(days=31), registry)
    assert content_hash(later.to_dict()) != content_hash(baseline.to_dict())


def test_unreadable_entry_fails_data_readable_check():
    vc, repo, registry = _mini_world()
    store = ProjectDataStore()
    store.add("e1", T0, [{"value": "not a number"}])
    store.add("e2", T0, [{"value": 2.0}])
    result = evaluate(vc, repo, store, AS_OF, registry)
    readable = {i.subject: i for i in result.checks.items if i.kind.value == "data-readable"}
    assert not readable["e1"].ok
    assert readable["e2"].ok
    assert result.functions["a"].status == "failed"


def test_sample_project_evaluation_shows_effort_overrun(composed, repo, registry, seeded_store):
    """Effort records beyond the baseline surface as a positive deviation
    for the overrunning activity in the effort view."""
    result = evaluate(composed.catena, repo, seeded_store, AS_OF, registry)
    rows = result.functions["fi-m-effort-deviation"].outputs["deviations"].records
    requirement_rows = [r for r in rows if r["activity-id"] == "act-requirements"]
    assert requirement_rows
    final = requirement_rows[-1]
    assert final["deviation"] == 120.0  # 600 actual vs 480 baseline
    assert final["status"] == "red"
    on_plan = [r for r in rows if r["activity-id"] == "act-design"]
    assert all(r["deviation"] == 0.0 for r in on_plan)
    chart = result.views["vi-q2-1-1"].payload
    names = {s["name"] for s in chart["series"]}
    assert "act-requirements:deviation" in names
    dev_series = next(s for s in chart["series"] if s["name"] == "act-requirements:deviation")
    assert dev_series["points"][-1][1] == 120.0


def test_randomized_double_run_is_bit_identical(composed, repo, registry):
    """Same inputs, same bytes: randomized five-activity store evaluated twice."""
    rng = random.Random(20260307)
    store = ProjectDataStore()
    activities = [f"act-{i}" for i in range(5)]
    plan_rows = [{"id": a, "start": "2026-01-05T00:00:00Z", "end": "2026-03-01T00:00:00Z",
                  "effort-baseline-hours": 100.0} for a in activities]
    store.add("de-m-plan-doc", T0, plan_rows)
    store.add("de-m-activity-list", T0, plan_rows)
    store.add("de-m-effort-baseline", T0, plan_rows)
    store.add("de-m-roster", T0, [{"person-id": f"p{i}"} for i in range(4)])
    records = []
    for _ in range(60):
        records.append({
            "person-id": f"p{rng.randrange(4)}",
            "activity-id": rng.choice(activities),
            "date": f"2026-01-{rng.randrange(6, 31):02d}T00:00:00Z",
            "hours": rng.randrange(1, 16) * 0.25,
        })
    store.add("de-m-actual-effort", T0 + timedelta(days=30), records)
    first = evaluate(composed.catena, repo, store, AS_OF, registry)
    second = evaluate(composed.catena, repo, store, AS_OF, registry)
    assert content_hash(first.to_dict()) == content_hash(second.to_dict())

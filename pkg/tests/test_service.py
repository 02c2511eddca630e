"""The HTTP service: lifecycle, submissions, views, checks, retrospective."""

import pytest
from fastapi.testclient import TestClient

from cockpit.controls import shipped_repository
from cockpit.sample_project import (
    baseline_plan_rows,
    form_submissions,
    ground_truth,
    six_goal_plan,
    source_files,
)
from cockpit.service import create_app

AS_OF = "2026-03-07T12:00:00Z"


@pytest.fixture()
def client(tmp_path):
    app = create_app(tmp_path / "workspaces")
    with TestClient(app) as c:
        c.workspace_root = tmp_path / "workspaces"
        yield c


def _bootstrap(client, project="proj-demo", with_data=True) -> str:
    assert client.post("/projects", json={"id": project, "context": ["17 team members"]}
                       ).status_code == 201
    repo_doc = shipped_repository().to_dict()
    assert client.put(f"/projects/{project}/repository", json=repo_doc).status_code == 200
    plan_doc = six_goal_plan().to_dict()
    assert client.put(f"/projects/{project}/plan", json=plan_doc).status_code == 200
    response = client.post(f"/projects/{project}/compose")
    assert response.status_code == 200
    assert response.json()["pass"], response.json()["report"]
    if with_data:
        sources = client.workspace_root / project / "sources"
        for name, text in source_files().items():
            (sources / name).write_text(text, encoding="utf-8")
        for sub in form_submissions():
            body = {
                "submitter-role": "team-member",
                "action": sub.action,
                "records": sub.records,
                "submitted-at": sub.submitted_at.isoformat(),
            }
            response = client.post(
                f"/projects/{project}/forms/{sub.form_instance}/submissions", json=body)
            assert response.status_code == 200, response.text
            assert not response.json()["rejected"]
        assert client.post(f"/projects/{project}/collect",
                           json={"now": AS_OF}).status_code == 200
    return project


def test_full_lifecycle_checks_pass(client):
    project = _bootstrap(client)
    response = client.get(f"/projects/{project}/checks", params={"as_of": AS_OF})
    assert response.status_code == 200
    body = response.json()
    failures = [i for i in body["items"] if i["status"] == "fail"]
    assert body["pass"], failures


def test_create_requires_plain_id(client):
    assert client.post("/projects", json={"id": "../escape"}).status_code == 400
    assert client.post("/projects", json={}).status_code == 400


def test_duplicate_project_conflict(client):
    client.post("/projects", json={"id": "p1"})
    response = client.post("/projects", json={"id": "p1"})
    assert response.status_code == 409
    assert response.json()["error"]["code"] == "already-exists"


def test_unknown_project_not_found(client):
    response = client.get("/projects/ghost/views")
    assert response.status_code == 404
    assert response.json()["error"]["code"] == "not-found"


def test_views_before_compose_not_configured(client):
    client.post("/projects", json={"id": "p1"})
    response = client.get("/projects/p1/views")
    assert response.status_code == 409
    assert response.json()["error"]["code"] == "not-configured"


def test_invalid_plan_rejected_workspace_unchanged(client):
    client.post("/projects", json={"id": "p1"})
    plan_doc = six_goal_plan().to_dict()
    plan_doc["metrics"][0]["questions"] = ["q-ghost"]
    response = client.put("/projects/p1/plan", json=plan_doc)
    assert response.status_code == 422
    assert not response.json()["accepted"]
    assert client.get("/projects/p1").json()["plan-version"] == 0


def test_compose_without_plan_conflict(client):
    client.post("/projects", json={"id": "p1"})
    client.put("/projects/p1/repository", json=shipped_repository().to_dict())
    response = client.post("/projects/p1/compose")
    assert response.status_code == 409


def test_role_filtered_views(client):
    project = _bootstrap(client)
    pm = client.get(f"/projects/{project}/views",
                    params={"role": "project-manager", "as_of": AS_OF}).json()
    qa = client.get(f"/projects/{project}/views",
                    params={"role": "quality-assurance-manager", "as_of": AS_OF}).json()
    every = client.get(f"/projects/{project}/views", params={"as_of": AS_OF}).json()
    pm_ids = {v["view-instance"] for v in pm["views"]}
    qa_ids = {v["view-instance"] for v in qa["views"]}
    all_ids = {v["view-instance"] for v in every["views"]}
    assert pm_ids == {"vi-g-g1", "vi-g-g2", "vi-g-g3", "vi-g-g4"}
    assert qa_ids == {"vi-g-g5", "vi-g-g6"}
    assert pm_ids | qa_ids == all_ids
    assert pm_ids.isdisjoint(qa_ids)
    # an unknown role sees nothing rather than erroring
    none = client.get(f"/projects/{project}/views",
                      params={"role": "nobody", "as_of": AS_OF}).json()
    assert none["views"] == []


def test_effort_view_among_project_manager_views(client):
    project = _bootstrap(client)
    pm = client.get(f"/projects/{project}/views",
                    params={"role": "project-manager", "as_of": AS_OF}).json()
    effort_goal = next(v for v in pm["views"] if v["view-instance"] == "vi-g-g2")
    assert effort_goal["status"] == "ok"
    children = {c["view-instance"]: c for c in effort_goal["payload"]["children"]}
    chart = children["vi-q2-1-1"]["payload"]
    assert chart["render-kind"] == "line-chart"
    assert any(s["name"] == "act-requirements:deviation" for s in chart["series"])


def test_form_submission_validates_rows(client):
    project = _bootstrap(client, with_data=False)
    body = {
        "submitter-role": "team-member",
        "records": [
            {"person-id": "p1", "activity-id": "a1", "date": "2026-01-09", "hours": 3},
            {"person-id": "p2", "activity-id": "a1", "date": "2026-01-09", "hours": -1},
        ],
        "submitted-at": "2026-01-09T17:00:00Z",
    }
    response = client.post(f"/projects/{project}/forms/wfi-m-actual-effort/submissions",
                           json=body)
    assert response.status_code == 200
    result = response.json()
    assert result["accepted"] == 1
    assert len(result["rejected"]) == 1
    assert result["rejected"][0]["index"] == 1
    assert "hours" in result["rejected"][0]["reason"]


def test_form_submission_empty_is_accepted_noop(client):
    project = _bootstrap(client, with_data=False)
    response = client.post(f"/projects/{project}/forms/wfi-m-actual-effort/submissions",
                           json={"records": []})
    assert response.status_code == 200
    assert response.json()["accepted"] == 0


def test_unknown_form_not_found(client):
    project = _bootstrap(client, with_data=False)
    response = client.post(f"/projects/{project}/forms/wfi-ghost/submissions",
                           json={"records": []})
    assert response.status_code == 404


def test_capability_violation_rejected(client):
    project = _bootstrap(client, with_data=False)
    response = client.post(
        f"/projects/{project}/forms/wfi-m-actual-effort/submissions",
        json={"action": "remove", "records": [{"person-id": "p1"}]})
    assert response.status_code == 409
    assert response.json()["error"]["code"] == "capability-error"


def test_submission_grows_entry_history(client):
    project = _bootstrap(client, with_data=False)
    record = {"person-id": "p1", "activity-id": "act-management",
              "date": "2026-01-09", "hours": 3}
    for day in ("2026-01-09", "2026-01-10"):
        client.post(f"/projects/{project}/forms/wfi-m-actual-effort/submissions",
                    json={"records": [record], "submitted-at": f"{day}T17:00:00Z"})
    from cockpit.service.workspace import Workspace

    ws = Workspace.open(client.workspace_root, project)
    assert len(ws.store().payloads_for("de-m-actual-effort")) == 2


def test_staleness_new_data_changes_views(client):
    project = _bootstrap(client)
    before = client.get(f"/projects/{project}/views",
                        params={"role": "project-manager", "as_of": "2026-06-30T00:00:00Z"}).json()
    extra = {"person-id": "p01", "activity-id": "act-management",
             "date": "2026-06-22", "hours": 12}
    client.post(f"/projects/{project}/forms/wfi-m-actual-effort/submissions",
                json={"records": [extra], "submitted-at": "2026-06-22T17:00:00Z"})
    after = client.get(f"/projects/{project}/views",
                       params={"role": "project-manager", "as_of": "2026-06-30T00:00:00Z"}).json()
    assert before != after


def test_deviation_log_and_retrospective(client):
    project = _bootstrap(client)
    # weekly evaluations, as the control board would run them
    for day in ("2026-02-14", "2026-02-21", "2026-02-28", "2026-03-07"):
        client.get(f"/projects/{project}/views", params={"as_of": f"{day}T12:00:00Z"})
    log = client.get(f"/projects/{project}/deviations").json()["deviations"]
    assert any(d["kind"] == "effort-overrun" and d["subject"] == "act-requirements"
               for d in log)
    events = {"events": [e.to_dict() for e in ground_truth()]}
    report = client.post(f"/projects/{project}/retrospective", json=events).json()
    by_event = {item["event"]["event-id"]: item for item in report["items"]}
    assert by_event["ev-requirements-overrun"]["classification"] == "in-time"
    assert by_event["ev-milestone-slip"]["classification"] == "in-time"


def test_trace_and_catena_export(client):
    project = _bootstrap(client, with_data=False)
    trace = client.get(f"/projects/{project}/trace").json()
    assert trace["metrics"]["m-eva"]["producer"]["instance"] == "fi-m-eva"
    catena = client.get(f"/projects/{project}/catena").json()
    assert catena["format"] == "visualization-catena/1"
    assert "repository" in catena


def test_form_descriptors_carry_schema_and_slot_data(client):
    project = _bootstrap(client)
    forms = client.get(f"/projects/{project}/forms").json()["forms"]
    effort = next(f for f in forms if f["instance"] == "wfi-m-actual-effort")
    field_names = [f["name"] for f in effort["schema"]["schema"]]
    assert field_names == ["person-id", "activity-id", "date", "hours"]
    activities = effort["slot-data"]["activities"]["records"]
    assert any(r["id"] == "act-requirements" for r in activities)


def test_plan_replacement_keeps_old_evaluations(client):
    project = _bootstrap(client)
    client.get(f"/projects/{project}/views", params={"as_of": AS_OF})
    evaluations = client.get(f"/projects/{project}/evaluations").json()["evaluations"]
    assert evaluations
    old_fingerprint = evaluations[0]["fingerprint"]
    plan2 = six_goal_plan()
    plan2.questions["q2-1"].text = "How far is actual effort above the baseline?"
    assert client.put(f"/projects/{project}/plan", json=plan2.to_dict()).json()["version"] == 2
    assert client.post(f"/projects/{project}/compose").json()["pass"]
    assert client.get(f"/projects/{project}").json()["catena-version"] == 2
    # prior evaluation documents remain addressable
    response = client.get(f"/projects/{project}/evaluations/{old_fingerprint}")
    assert response.status_code == 200
    assert response.json()["as-of"] == AS_OF


def test_token_auth_when_configured(tmp_path):
    app = create_app(tmp_path / "ws", token="secret")
    with TestClient(app) as client:
        assert client.get("/projects").status_code == 401
        ok = client.get("/projects", headers={"Authorization": "Bearer secret"})
        assert ok.status_code == 200


def test_structural_error_body_names_path(client):
    client.post("/projects", json={"id": "p1"})
    bad = {"data-types": [{"id": "x", "kind": "nonsense", "schema": []}]}
    response = client.put("/projects/p1/repository", json=bad)
    assert response.status_code == 400
    assert response.json()["error"]["code"] == "structural-error"

"""HTTP JSON API over project workspaces.

All documents cross the wire exactly as they live on disk; error bodies
carry machine-readable codes: ``{"error": {"code": ..., "message": ...}}``.
"""

from __future__ import annotations

from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from fastapi import Body, FastAPI, Query, Request
from fastapi.responses import JSONResponse

from cockpit.catena.retrospective import GroundTruthEvent, ground_truth_from_dict
from cockpit.interchange import StructuralError, parse_timestamp
from cockpit.service.workspace import Workspace, WorkspaceError


def create_app(root: Path | str, token: str | None = None) -> FastAPI:
    """Build the service around a workspace root directory.

    ``token``, when set, must arrive as ``Authorization: Bearer <token>``
    on every request; the default is open for desk use.
    """
    root = Path(root)
    app = FastAPI(title="project cockpit", version="0.1.0")

    @app.middleware("http")
    async def _auth(request: Request, call_next):
        if token:
            header = request.headers.get("authorization", "")
            if header != f"Bearer {token}":
                return JSONResponse(status_code=401, content={
                    "error": {"code": "unauthorized", "message": "missing or invalid token"}})
        return await call_next(request)

    @app.exception_handler(WorkspaceError)
    async def _workspace_error(_request: Request, exc: WorkspaceError):
        return JSONResponse(status_code=exc.status,
                            content={"error": {"code": exc.code, "message": exc.message}})

    @app.exception_handler(StructuralError)
    async def _structural_error(_request: Request, exc: StructuralError):
        return JSONResponse(status_code=400, content={
            "error": {"code": "structural-error", "message": str(exc), "path": exc.path}})

    def _as_of(value: str | None) -> datetime:
        if value:
            return parse_timestamp(value, "as_of")
        return datetime.now(timezone.utc)

    @app.get("/projects")
    def list_projects():
        return {"projects": Workspace.list_projects(root)}

    @app.post("/projects", status_code=201)
    def create_project(body: dict = Body(...)):
        project_id = str(body.get("id", "")).strip()
        if not project_id or "/" in project_id or project_id.startswith("."):
            raise WorkspaceError("structural-error", "project id must be a plain name", 400)
        ws = Workspace.create(root, project_id, [str(c) for c in body.get("context", [])])
        return ws.meta

    @app.get("/projects/{project_id}")
    def project_meta(project_id: str):
        return Workspace.open(root, project_id).meta

    @app.put("/projects/{project_id}/repository")
    def put_repository(project_id: str, body: dict = Body(...)):
        result = Workspace.open(root, project_id).put_repository(body)
        if not result["accepted"]:
            return JSONResponse(status_code=422, content=result)
        return result

    @app.put("/projects/{project_id}/plan")
    def put_plan(project_id: str, body: dict = Body(...)):
        result = Workspace.open(root, project_id).put_plan(body)
        if not result["accepted"]:
            return JSONResponse(status_code=422, content=result)
        return result

    @app.post("/projects/{project_id}/compose")
    def compose_project(project_id: str):
        ws = Workspace.open(root, project_id)
        result = ws.compose_catena()
        body: dict[str, Any] = {"pass": result.passed, "report": result.report.to_dict()}
        if result.passed:
            body["catena-version"] = ws.meta["catena-version"]
            body["trace"] = result.trace.to_dict()
        return body

    @app.get("/projects/{project_id}/checks")
    def get_checks(project_id: str, as_of: str | None = Query(default=None)):
        return Workspace.open(root, project_id).checks(_as_of(as_of)).to_dict()

    @app.get("/projects/{project_id}/views")
    def get_views(project_id: str, role: str | None = Query(default=None),
                  as_of: str | None = Query(default=None)):
        return Workspace.open(root, project_id).views(role, _as_of(as_of))

    @app.post("/projects/{project_id}/forms/{form_instance_id}/submissions")
    def submit_form(project_id: str, form_instance_id: str, body: dict = Body(...)):
        ws = Workspace.open(root, project_id)
        submitted_at = None
        if body.get("submitted-at"):
            submitted_at = parse_timestamp(body["submitted-at"], "submitted-at")
        records = body.get("records", [])
        if not isinstance(records, list):
            raise WorkspaceError("structural-error", "records must be an array", 400)
        return ws.submit_form(
            form_instance_id,
            submitter_role=str(body.get("submitter-role", "")),
            records=records,
            action=str(body.get("action", "add")),
            submitted_at=submitted_at,
        )

    @app.post("/projects/{project_id}/collect")
    def collect(project_id: str, body: dict = Body(default={})):
        now = _as_of(body.get("now"))
        return {"events": Workspace.open(root, project_id).collect(now)}

    @app.get("/projects/{project_id}/deviations")
    def deviations(project_id: str):
        ws = Workspace.open(root, project_id)
        return {"format": "deviation-log/1",
                "deviations": [d.to_dict() for d in ws.deviation_log()]}

    @app.post("/projects/{project_id}/retrospective")
    def run_retrospective(project_id: str, body: dict = Body(...)):
        ws = Workspace.open(root, project_id)
        events: list[GroundTruthEvent] = ground_truth_from_dict(body)
        return ws.run_retrospective(events).to_dict()

    @app.get("/projects/{project_id}/trace")
    def get_trace(project_id: str):
        return Workspace.open(root, project_id).trace_document()

    @app.get("/projects/{project_id}/catena")
    def get_catena(project_id: str):
        return Workspace.open(root, project_id).catena_document()

    @app.get("/projects/{project_id}/forms")
    def get_forms(project_id: str):
        return {"forms": Workspace.open(root, project_id).form_descriptors()}

    @app.get("/projects/{project_id}/evaluations")
    def list_evaluations(project_id: str):
        return {"evaluations": Workspace.open(root, project_id).evaluations_index()}

    @app.get("/projects/{project_id}/evaluations/{fingerprint}")
    def get_evaluation(project_id: str, fingerprint: str):
        return Workspace.open(root, project_id).evaluation_document(fingerprint)

    return app

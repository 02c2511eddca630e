"""Batch driver for the full pipeline, runnable without the service.

Exit codes are the machine contract: 0 when all checks pass, 1 when any
check fails, 2 on structural errors (unparseable documents, missing
files).
"""

from __future__ import annotations

import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import click

from cockpit.catena.evaluate import evaluate as run_evaluate
from cockpit.catena.instances import VisualizationCatena
from cockpit.catena.report import CheckReport
from cockpit.catena.retrospective import deviations_from_dict, ground_truth_from_dict, retrospective
from cockpit.catena.store import Payload, ProjectDataStore
from cockpit.catena.types import ComponentRepository, validate_repository
from cockpit.catena.validate import validate_catena
from cockpit.composer import compose as run_compose
from cockpit.controls import shipped_registry, shipped_repository
from cockpit.gqm import GqmPlan, validate_plan
from cockpit.ingestion import run_collection_sweep
from cockpit.interchange import StructuralError, document_json, parse_timestamp
from cockpit.render import render_payload_svg, render_result_html, render_result_text

EXIT_OK = 0
EXIT_CHECK_FAILURES = 1
EXIT_STRUCTURAL = 2


class CliError(click.ClickException):
    exit_code = EXIT_STRUCTURAL


def _load_json(path: str) -> dict:
    p = Path(path)
    if not p.exists():
        raise CliError(f"file not found: {p}")
    try:
        return json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CliError(f"{p}: not a valid interchange document: {exc}") from exc


def _print_report(report: CheckReport) -> None:
    for item in report.items:
        if not item.ok:
            click.echo(f"FAIL [{item.kind.value}] {item.subject}: {item.message}")
    failed = len(report.failures)
    total = len(report.items)
    click.echo(f"{total - failed}/{total} checks passed")


def _exit_for(report: CheckReport) -> int:
    return EXIT_OK if report.passed else EXIT_CHECK_FAILURES


def _parse_ts(value: str | None, flag: str) -> datetime:
    if value is None:
        return datetime.now(timezone.utc)
    try:
        return parse_timestamp(value, flag)
    except StructuralError as exc:
        raise CliError(str(exc)) from exc


def _load_plan(path: str) -> GqmPlan:
    try:
        return GqmPlan.from_dict(_load_json(path))
    except StructuralError as exc:
        raise CliError(f"{path}: {exc}") from exc


def _load_repo(path: str) -> ComponentRepository:
    try:
        return ComponentRepository.from_dict(_load_json(path))
    except StructuralError as exc:
        raise CliError(f"{path}: {exc}") from exc


def _load_catena(path: str, repo_path: str | None = None) -> tuple[VisualizationCatena, ComponentRepository]:
    doc = _load_json(path)
    try:
        vc = VisualizationCatena.from_dict(doc)
    except StructuralError as exc:
        raise CliError(f"{path}: {exc}") from exc
    if repo_path:
        return vc, _load_repo(repo_path)
    if "repository" in doc:
        try:
            return vc, ComponentRepository.from_dict(doc["repository"])
        except StructuralError as exc:
            raise CliError(f"{path}: embedded repository: {exc}") from exc
    raise CliError(f"{path}: no repository embedded; pass one explicitly")


def _store_path(data_dir: str) -> Path:
    directory = Path(data_dir)
    if not directory.is_dir():
        raise CliError(f"data directory not found: {directory}")
    return directory / "store.json"


def _load_store(data_dir: str) -> ProjectDataStore:
    path = _store_path(data_dir)
    if not path.exists():
        return ProjectDataStore()
    try:
        return ProjectDataStore.from_dict(json.loads(path.read_text(encoding="utf-8")))
    except (json.JSONDecodeError, StructuralError) as exc:
        raise CliError(f"{path}: {exc}") from exc


@click.group()
def main() -> None:
    """Goal-oriented project control: validate, compose, collect, evaluate."""


@main.command("validate-plan")
@click.argument("plan_file")
def cmd_validate_plan(plan_file: str) -> None:
    """Check a measurement plan document."""
    report = validate_plan(_load_plan(plan_file))
    _print_report(report)
    sys.exit(_exit_for(report))


@main.command("validate-catena")
@click.argument("catena_file")
@click.argument("repo_file")
def cmd_validate_catena(catena_file: str, repo_file: str) -> None:
    """Check a catena document against a component repository."""
    vc, repo = _load_catena(catena_file, repo_file)
    report = validate_repository(repo)
    report.merge(validate_catena(vc, repo))
    _print_report(report)
    sys.exit(_exit_for(report))


@main.command("compose")
@click.argument("plan_file")
@click.argument("repo_file")
@click.option("-o", "--output", required=True, help="catena document to write")
def cmd_compose(plan_file: str, repo_file: str, output: str) -> None:
    """Derive a catena from a plan and a repository."""
    plan = _load_plan(plan_file)
    repo = _load_repo(repo_file)
    result = run_compose(plan, repo)
    Path(output).write_text(
        document_json(result.catena.to_dict(repository=repo.to_dict())), encoding="utf-8")
    trace_path = Path(output).with_suffix(".trace.json")
    trace_path.write_text(document_json(result.trace.to_dict()), encoding="utf-8")
    _print_report(result.report)
    click.echo(f"catena written to {output}; traceability to {trace_path}")
    sys.exit(_exit_for(result.report))


@main.command("collect")
@click.argument("catena_file")
@click.option("--data-dir", required=True, help="directory with sources and store.json")
@click.option("--now", default=None, help="collection sweep time (ISO-8601; defaults to wall clock)")
@click.option("--repo", "repo_file", default=None, help="repository document (default: embedded)")
def cmd_collect(catena_file: str, data_dir: str, now: str | None, repo_file: str | None) -> None:
    """Run a collection sweep over every external data entry."""
    vc, repo = _load_catena(catena_file, repo_file)
    store = _load_store(data_dir)
    sweep_time = _parse_ts(now, "--now")
    events = run_collection_sweep(vc, repo, store, sweep_time, data_dir)
    _store_path(data_dir).write_text(document_json(store.to_dict()), encoding="utf-8")
    errors = 0
    for event in events:
        line = f"{event.entry}: due {event.to_dict()['due']} -> {event.outcome}"
        if event.message:
            line += f" ({event.message})"
        click.echo(line)
        errors += 1 if event.outcome == "error" else 0
    click.echo(f"{len(events)} collection event(s), {errors} error(s)")
    sys.exit(EXIT_OK if errors == 0 else EXIT_CHECK_FAILURES)


@main.command("evaluate")
@click.argument("catena_file")
@click.option("--data-dir", required=True, help="directory with store.json")
@click.option("--as-of", default=None, help="evaluation cut time (ISO-8601; defaults to wall clock)")
@click.option("-o", "--output", required=True, help="evaluation result document to write")
@click.option("--repo", "repo_file", default=None, help="repository document (default: embedded)")
def cmd_evaluate(catena_file: str, data_dir: str, as_of: str | None, output: str,
                 repo_file: str | None) -> None:
    """Evaluate a catena over collected data at a cut time."""
    vc, repo = _load_catena(catena_file, repo_file)
    validation = validate_catena(vc, repo)
    if not validation.passed:
        _print_report(validation)
        sys.exit(EXIT_CHECK_FAILURES)
    store = _load_store(data_dir)
    cut = _parse_ts(as_of, "--as-of")
    result = run_evaluate(vc, repo, store, cut, shipped_registry())
    Path(output).write_text(document_json(result.to_dict()), encoding="utf-8")
    _print_report(result.checks)
    click.echo(f"{len(result.deviations)} deviation(s); result written to {output}")
    sys.exit(_exit_for(result.checks))


@main.command("report")
@click.argument("results_file")
@click.option("--format", "fmt", type=click.Choice(["table", "html", "svg"]), default="table")
@click.option("-o", "--output", default=None,
              help="output file (html) or directory (svg); default stdout / ./report-svg")
def cmd_report(results_file: str, fmt: str, output: str | None) -> None:
    """Render an evaluation result for humans."""
    doc = _load_json(results_file)
    if fmt == "table":
        click.echo(render_result_text(doc), nl=False)
    elif fmt == "html":
        page = render_result_html(doc)
        if output:
            Path(output).write_text(page, encoding="utf-8")
            click.echo(f"report written to {output}")
        else:
            click.echo(page)
    else:
        out_dir = Path(output or "report-svg")
        out_dir.mkdir(parents=True, exist_ok=True)
        count = 0
        for vid, view in sorted(doc.get("views", {}).items()):
            if view.get("status") != "ok" or not view.get("payload"):
                continue
            if view["payload"].get("render-kind") == "composite":
                continue
            (out_dir / f"{vid}.svg").write_text(render_payload_svg(view["payload"]),
                                                encoding="utf-8")
            count += 1
        click.echo(f"{count} chart(s) written to {out_dir}")
    sys.exit(EXIT_OK)


@main.command("retrospective")
@click.argument("deviations_file")
@click.argument("ground_truth_file")
def cmd_retrospective(deviations_file: str, ground_truth_file: str) -> None:
    """Classify ground-truth events as in-time, too-late, or not-detected."""
    try:
        deviations = deviations_from_dict(_load_json(deviations_file))
        events = ground_truth_from_dict(_load_json(ground_truth_file))
    except StructuralError as exc:
        raise CliError(str(exc)) from exc
    report = retrospective(deviations, events)
    for item in report.items:
        line = f"{item.event.event_id}: {item.classification}"
        if item.matched:
            line += f" (matched {item.matched.id}, latency {item.to_dict()['latency']})"
        click.echo(line)
    counts = report.counts()
    click.echo(f"in-time {counts['in-time']}, too-late {counts['too-late']}, "
               f"not-detected {counts['not-detected']}")
    sys.exit(EXIT_OK)


@main.command("serve")
@click.option("--root", required=True, help="workspace root directory")
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8000, type=int)
@click.option("--token", default=None, help="require 'Authorization: Bearer <token>'")
def cmd_serve(root: str, host: str, port: int, token: str | None) -> None:
    """Run the cockpit service."""
    import uvicorn

    from cockpit.service import create_app

    Path(root).mkdir(parents=True, exist_ok=True)
    uvicorn.run(create_app(root, token=token), host=host, port=port)


@main.command("sample")
@click.argument("target_dir")
def cmd_sample(target_dir: str) -> None:
    """Materialize the bundled sample project (plan, repository, sources,
    and a store pre-seeded with the team's manual form submissions)."""
    from cockpit.sample_project import seed_store, six_goal_plan, source_files

    target = Path(target_dir)
    (target / "data").mkdir(parents=True, exist_ok=True)
    plan = six_goal_plan()
    repo = shipped_repository()
    (target / "plan.json").write_text(document_json(plan.to_dict()), encoding="utf-8")
    (target / "repository.json").write_text(document_json(repo.to_dict()), encoding="utf-8")
    for name, text in source_files().items():
        (target / "data" / name).write_text(text, encoding="utf-8")
    store = ProjectDataStore()
    seed_store(store, run_compose(plan, repo).catena, repo)
    (target / "data" / "store.json").write_text(document_json(store.to_dict()), encoding="utf-8")
    click.echo(f"sample project written to {target}")
    sys.exit(EXIT_OK)


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Regenerate the fixtures shared between the server and browser suites.

Two files are produced under frontend/fixtures/:

* form-parity.json: the effort-log schema plus a corpus of submission
  records with the server's accept/reject verdicts; the browser's form
  validator must agree on every case.
* dashboard-payloads.json: rendered view payloads from the sample
  project (the effort-deviation chart and its goal composite), used for
  structural-stability snapshots.

Both files are deterministic; a test asserts the committed copies match.
"""

from __future__ import annotations

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from cockpit.catena import ProjectDataStore, evaluate  # noqa: E402
from cockpit.catena.types import validate_record  # noqa: E402
from cockpit.composer import compose  # noqa: E402
from cockpit.controls import shipped_registry, shipped_repository  # noqa: E402
from cockpit.ingestion import run_collection_sweep  # noqa: E402
from cockpit.interchange import StructuralError, document_json, parse_timestamp  # noqa: E402
from cockpit.sample_project import seed_store, six_goal_plan, source_files  # noqa: E402

AS_OF = "2026-03-07T12:00:00Z"

PARITY_RECORDS = [
    # well-formed records
    {"person-id": "p01", "activity-id": "act-requirements", "date": "2026-01-09", "hours": 8},
    {"person-id": "p02", "activity-id": "act-design", "date": "2026-02-20T09:30:00Z", "hours": "7.5"},
    {"person-id": "p03", "activity-id": "act-testing", "date": "2026-05-22T09:30:00+02:00", "hours": 0},
    {"person-id": "p04", "activity-id": "act-qa-review", "date": "2026-02-29", "hours": 1},  # not a leap year
    {"person-id": "p05", "activity-id": "act-management", "date": "2026-06-30", "hours": " 4 "},
    {"person-id": "p06", "activity-id": "act-design", "date": "2026-03-15", "hours": "1e1"},
    # schema violations
    {"person-id": "p07", "activity-id": "act-design", "date": "2026-03-15", "hours": -2},
    {"person-id": "p08", "activity-id": "act-design", "date": "2026-03-15", "hours": "three"},
    {"person-id": "p09", "activity-id": "act-design", "date": "2026-03-15", "hours": "nan"},
    {"person-id": "p10", "activity-id": "act-design", "date": "2026-03-15", "hours": ""},
    {"person-id": "p11", "activity-id": "act-design", "date": "15.03.2026", "hours": 2},
    {"person-id": "p12", "activity-id": "act-design", "date": "2026-13-01", "hours": 2},
    {"person-id": "p13", "activity-id": "act-design", "date": "", "hours": 2},
    {"person-id": "", "activity-id": "act-design", "date": "2026-03-15", "hours": 2},
    {"person-id": "p15", "activity-id": "", "date": "2026-03-15", "hours": 2},
    {"activity-id": "act-design", "date": "2026-03-15", "hours": 2},
    {"person-id": "p17", "date": "2026-03-15", "hours": 2},
    {"person-id": "p18", "activity-id": "act-design", "hours": 2},
    {"person-id": "p19", "activity-id": "act-design", "date": "2026-03-15"},
    # extra fields pass through; whitespace identifiers are trimmed
    {"person-id": " p20 ", "activity-id": "act-design", "date": "2026-03-15", "hours": 2,
     "note": "late booking"},
    {"person-id": "p21", "activity-id": "act-design", "date": "2026-03-15 08:00:00", "hours": 2},
    {"person-id": "p22", "activity-id": "act-design", "date": "2026-03-15", "hours": "0x10"},
]


def build_parity_fixture() -> dict:
    repo = shipped_repository()
    dtype = repo.data_types["dt-effort-log"]
    cases = []
    for record in PARITY_RECORDS:
        try:
            coerced = validate_record(dtype, record)
            cases.append({"record": record, "server-accepts": True, "coerced": coerced})
        except StructuralError as exc:
            cases.append({"record": record, "server-accepts": False, "reason": str(exc)})
    return {"format": "form-parity/1", "schema": dtype.to_dict(), "cases": cases}


def build_dashboard_fixture() -> dict:
    repo = shipped_repository()
    result = compose(six_goal_plan(), repo)
    assert result.passed
    store = ProjectDataStore()
    seed_store(store, result.catena, repo)
    import tempfile

    with tempfile.TemporaryDirectory() as tmp:
        for name, text in source_files().items():
            (Path(tmp) / name).write_text(text, encoding="utf-8")
        run_collection_sweep(result.catena, repo, store, parse_timestamp(AS_OF), tmp)
    evaluation = evaluate(result.catena, repo, store, parse_timestamp(AS_OF), shipped_registry())
    views = {vid: res.to_dict() for vid, res in evaluation.views.items()
             if vid in ("vi-q2-1-1", "vi-g-g2", "vi-q1-1-1", "vi-q3-1-1", "vi-q4-1-1")}
    return {"format": "dashboard-payloads/1", "as-of": AS_OF, "views": views}


def main() -> None:
    out_dir = ROOT / "frontend" / "fixtures"
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "form-parity.json").write_text(
        document_json(build_parity_fixture()), encoding="utf-8")
    (out_dir / "dashboard-payloads.json").write_text(
        document_json(build_dashboard_fixture()), encoding="utf-8")
    print(f"fixtures written to {out_dir}")


if __name__ == "__main__":
    main()

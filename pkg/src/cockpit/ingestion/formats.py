"""Parsers for the published project-data formats.

Every data type is available as delimited text (UTF-8, header row,
ISO-8601 dates) and as a structured interchange document (JSON, either a
bare array of records or ``{"records": [...]}``).
"""

from __future__ import annotations

import csv
import io
import json

from cockpit.catena.types import DataTypeDef, validate_record
from cockpit.interchange import StructuralError


class SourceFormatError(ValueError):
    """The source cannot be parsed as the requested dialect at all."""


def parse_delimited(text: str, data_type: DataTypeDef,
                    delimiter: str = ",") -> tuple[list[dict], list[str]]:
    """Parse delimited text; returns (accepted records, per-row rejections)."""
    reader = csv.DictReader(io.StringIO(text), delimiter=delimiter)
    if reader.fieldnames is None:
        return [], []
    accepted: list[dict] = []
    rejected: list[str] = []
    for line_no, row in enumerate(reader, start=2):
        cleaned = {k: v for k, v in row.items() if k is not None and v not in (None, "")}
        try:
            accepted.append(validate_record(data_type, cleaned, f"line {line_no}"))
        except StructuralError as exc:
            rejected.append(str(exc))
    return accepted, rejected


def parse_interchange(text: str, data_type: DataTypeDef) -> tuple[list[dict], list[str]]:
    """Parse a JSON document of records; returns (accepted, rejections)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SourceFormatError(f"not a valid interchange document: {exc}") from exc
    if isinstance(doc, dict):
        rows = doc.get("records", [])
    elif isinstance(doc, list):
        rows = doc
    else:
        raise SourceFormatError("interchange document must be an array or an object with records")
    accepted: list[dict] = []
    rejected: list[str] = []
    for i, row in enumerate(rows):
        try:
            accepted.append(validate_record(data_type, row, f"records[{i}]"))
        except StructuralError as exc:
            rejected.append(str(exc))
    return accepted, rejected


def render_delimited(records: list[dict], data_type: DataTypeDef) -> str:
    columns = [f.name for f in data_type.schema]
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=columns, extrasaction="ignore")
    writer.writeheader()
    for rec in records:
        writer.writerow({k: rec.get(k, "") for k in columns})
    return out.getvalue()


# Record field carrying each log-like data type's time axis, used for
# collection-window filtering; snapshot types are fetched whole.
TIME_FIELD_BY_KIND = {
    "effort-log": "date",
    "defect-log": "opened",
    "time-series": "timestamp",
}


def time_field(data_type: DataTypeDef) -> str | None:
    if data_type.accumulation != "log":
        return None
    name = TIME_FIELD_BY_KIND.get(data_type.kind)
    if name and data_type.field_def(name):
        return name
    for f in data_type.schema:
        if f.type == "timestamp":
            return f.name
    return None

"""Data-access-object execution: fetch external payloads from bound sources.

A fetch never raises on unreachable or malformed sources; every outcome
is reported through a collection event so one broken source cannot halt
a collection sweep.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

from cockpit.catena.instances import DaoConfig, DataEntry
from cockpit.catena.types import ComponentRepository, DataTypeDef
from cockpit.ingestion.formats import SourceFormatError, parse_delimited, parse_interchange, time_field
from cockpit.interchange import format_timestamp


@dataclass
class DaoBinding:
    """A package bound to concrete parameters for one data entry."""

    package: str
    parameters: dict
    entry: str
    data_type: str
    mode: str = "read"

    @classmethod
    def from_entry(cls, entry: DataEntry, repo: ComponentRepository) -> "DaoBinding":
        if entry.active_dao is None:
            raise ValueError(f"entry {entry.id!r} has no active data access object")
        config: DaoConfig = entry.active_dao
        package = repo.dao_packages.get(config.package)
        params = dict(config.parameters)
        if package is not None:
            for pdef in package.parameters:
                if not pdef.mandatory and pdef.name not in params:
                    params[pdef.name] = pdef.default
                if pdef.mandatory and pdef.name not in params:
                    raise ValueError(
                        f"entry {entry.id!r}: mandatory access parameter {pdef.name!r} is unbound")
        return cls(package=config.package, parameters=params,
                   entry=entry.id, data_type=entry.data_type)


@dataclass
class CollectionEvent:
    entry: str
    due: datetime
    executed_at: datetime
    outcome: str  # "ok" | "empty" | "error"
    message: str = ""
    payload_timestamp: datetime | None = None
    rejected: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "entry": self.entry,
            "due": format_timestamp(self.due),
            "executed-at": format_timestamp(self.executed_at),
            "outcome": self.outcome,
            "message": self.message,
            "payload-timestamp": format_timestamp(self.payload_timestamp)
            if self.payload_timestamp else None,
            "rejected": list(self.rejected),
        }


@dataclass
class FetchResult:
    records: list[dict]
    outcome: str
    message: str = ""
    rejected: list[str] = field(default_factory=list)


def fetch(binding: DaoBinding, window: tuple[datetime | None, datetime | None],
          data_type: DataTypeDef, base_dir: Path | str = ".") -> FetchResult:
    """Read one source; schema-validate rows; never raise on bad sources.

    ``window`` bounds the records of log-like types by their time field
    (half-open: from exclusive, to inclusive); snapshot types are read
    whole.  Malformed rows are rejected individually; a source that
    yields no valid row at all is an error.
    """
    try:
        text = _read_source(binding, Path(base_dir))
    except Exception as exc:
        return FetchResult([], "error", f"source unreachable: {exc}")

    dialect = str(binding.parameters.get("dialect", "delimited"))
    try:
        if dialect == "interchange":
            records, rejected = parse_interchange(text, data_type)
        else:
            records, rejected = parse_delimited(text, data_type)
    except SourceFormatError as exc:
        return FetchResult([], "error", str(exc))

    field_name = time_field(data_type)
    if field_name:
        low, high = window
        if low is not None:
            low_s = format_timestamp(low)
            records = [r for r in records if str(r.get(field_name, "")) > low_s]
        if high is not None:
            high_s = format_timestamp(high)
            records = [r for r in records if str(r.get(field_name, "")) <= high_s]

    if rejected and not records:
        return FetchResult([], "error", rejected[0], rejected)
    if not records:
        return FetchResult([], "empty", "no records in window", rejected)
    message = "" if not rejected else f"{len(rejected)} row(s) rejected; first: {rejected[0]}"
    return FetchResult(records, "ok", message, rejected)


def _read_source(binding: DaoBinding, base_dir: Path) -> str:
    url = binding.parameters.get("url")
    if url:
        import httpx

        response = httpx.get(str(url), timeout=10.0)
        response.raise_for_status()
        return response.text
    path = binding.parameters.get("path")
    if not path:
        raise ValueError("binding has neither a path nor a url parameter")
    source = Path(str(path))
    if not source.is_absolute():
        source = base_dir / source
    return source.read_text(encoding="utf-8")

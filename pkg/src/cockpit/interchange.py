"""Interchange primitives shared by every document format.

All documents are JSON with string ids, ISO-8601 UTC timestamps, and
ISO-8601 durations.  Timestamps are normalized to second precision in
``YYYY-MM-DDTHH:MM:SSZ`` form so that normalized strings compare in the
same order as the instants they denote.
"""

from __future__ import annotations

import hashlib
import json
import re
from datetime import datetime, timedelta, timezone
from typing import Any


class StructuralError(ValueError):
    """A document does not match its schema.  Carries the offending path."""

    def __init__(self, path: str, message: str):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}")


_DURATION_RE = re.compile(
    r"^(?P<sign>-)?P(?:(?P<weeks>\d+)W)?(?:(?P<days>\d+)D)?"
    r"(?:T(?:(?P<hours>\d+)H)?(?:(?P<minutes>\d+)M)?(?:(?P<seconds>\d+(?:\.\d+)?)S)?)?$"
)


def parse_timestamp(value: Any, path: str = "timestamp") -> datetime:
    """Parse an ISO-8601 timestamp into an aware UTC datetime.

    Date-only values are taken as midnight UTC.  Naive datetimes are
    assumed to be UTC already.
    """
    if isinstance(value, datetime):
        dt = value
    elif isinstance(value, str):
        text = value.strip()
        if text.endswith("Z"):
            text = text[:-1] + "+00:00"
        try:
            dt = datetime.fromisoformat(text)
        except ValueError:
            raise StructuralError(path, f"expected ISO-8601 timestamp, got {value!r}") from None
    else:
        raise StructuralError(path, f"expected ISO-8601 timestamp, got {type(value).__name__}")
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def format_timestamp(dt: datetime) -> str:
    """Normalized ``YYYY-MM-DDTHH:MM:SSZ`` form (second precision)."""
    dt = dt.astimezone(timezone.utc).replace(microsecond=0)
    return dt.strftime("%Y-%m-%dT%H:%M:%SZ")


def normalize_timestamp(value: Any, path: str = "timestamp") -> str:
    return format_timestamp(parse_timestamp(value, path))


def parse_duration(value: Any, path: str = "duration") -> timedelta:
    """Parse an ISO-8601 duration (weeks/days/time designators only)."""
    if isinstance(value, timedelta):
        return value
    if not isinstance(value, str):
        raise StructuralError(path, f"expected ISO-8601 duration, got {type(value).__name__}")
    m = _DURATION_RE.match(value.strip())
    if not m or value.strip() in ("P", "-P", "PT"):
        raise StructuralError(path, f"expected ISO-8601 duration, got {value!r}")
    parts = m.groupdict()
    td = timedelta(
        weeks=int(parts["weeks"] or 0),
        days=int(parts["days"] or 0),
        hours=int(parts["hours"] or 0),
        minutes=int(parts["minutes"] or 0),
        seconds=float(parts["seconds"] or 0),
    )
    return -td if parts["sign"] else td


def format_duration(td: timedelta) -> str:
    """Canonical ISO-8601 rendering (days + time components)."""
    sign = "-" if td.total_seconds() < 0 else ""
    td = abs(td)
    days = td.days
    secs = td.seconds
    hours, secs = divmod(secs, 3600)
    minutes, secs = divmod(secs, 60)
    secs = secs + td.microseconds / 1e6
    out = f"{sign}P"
    if days:
        out += f"{days}D"
    time_part = ""
    if hours:
        time_part += f"{hours}H"
    if minutes:
        time_part += f"{minutes}M"
    if secs:
        time_part += f"{secs:g}S"
    if time_part:
        out += "T" + time_part
    if out in ("P", "-P"):
        out += "0D"
    return out


def canonical_json(value: Any) -> str:
    """Deterministic compact rendering used for hashing and equality."""
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def document_json(value: Any) -> str:
    """Deterministic human-readable rendering used for files on disk."""
    return json.dumps(value, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def content_hash(value: Any) -> str:
    return hashlib.sha256(canonical_json(value).encode("utf-8")).hexdigest()


def expect_object(value: Any, path: str) -> dict:
    if not isinstance(value, dict):
        raise StructuralError(path, f"expected object, got {type(value).__name__}")
    return value


def expect_list(value: Any, path: str) -> list:
    if not isinstance(value, list):
        raise StructuralError(path, f"expected array, got {type(value).__name__}")
    return value


def expect_string(value: Any, path: str, allow_empty: bool = False) -> str:
    if not isinstance(value, str):
        raise StructuralError(path, f"expected string, got {type(value).__name__}")
    if not allow_empty and not value:
        raise StructuralError(path, "expected non-empty string")
    return value


def get_string(obj: dict, key: str, path: str, default: str | None = None,
               allow_empty: bool = False) -> str:
    if key not in obj:
        if default is not None:
            return default
        raise StructuralError(f"{path}.{key}", "missing required field")
    return expect_string(obj[key], f"{path}.{key}", allow_empty=allow_empty)

"""External data access: format parsers, DAO fetch, collection sweeps."""

from cockpit.ingestion.dao import CollectionEvent, DaoBinding, FetchResult, fetch
from cockpit.ingestion.formats import (
    SourceFormatError,
    parse_delimited,
    parse_interchange,
    render_delimited,
    time_field,
)
from cockpit.ingestion.sweep import run_collection_sweep

__all__ = [
    "CollectionEvent",
    "DaoBinding",
    "FetchResult",
    "SourceFormatError",
    "fetch",
    "parse_delimited",
    "parse_interchange",
    "render_delimited",
    "run_collection_sweep",
    "time_field",
]

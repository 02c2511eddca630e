"""Goal-oriented software project control center.

The package turns explicitly declared measurement goals into an executable,
checked pipeline of data collection, processing, and visualization
components (a *visualization catena*), evaluates it over ingested project
data, and serves role-oriented control views plus manual data-entry forms.
"""

from cockpit.status import Status
from cockpit.interchange import StructuralError, parse_timestamp, parse_duration

__version__ = "0.1.0"

__all__ = [
    "Status",
    "StructuralError",
    "parse_timestamp",
    "parse_duration",
    "__version__",
]

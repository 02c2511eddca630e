"""Traffic-light status lattice used by interpretation and check results."""

from __future__ import annotations

from enum import Enum


class Status(str, Enum):
    GREEN = "green"
    YELLOW = "yellow"
    RED = "red"

    @property
    def severity(self) -> int:
        return _SEVERITY[self]

    @property
    def fraction(self) -> float:
        """Canonical position on the [0, 1] deviation scale."""
        return _FRACTION[self]

    @classmethod
    def worst(cls, statuses: "list[Status]") -> "Status":
        if not statuses:
            return cls.GREEN
        return max(statuses, key=lambda s: s.severity)

    @classmethod
    def from_value(cls, value: object) -> "Status":
        if isinstance(value, Status):
            return value
        if isinstance(value, str):
            try:
                return cls(value.lower())
            except ValueError:
                pass
        raise ValueError(f"not a status: {value!r}")


_SEVERITY = {Status.GREEN: 0, Status.YELLOW: 1, Status.RED: 2}
_FRACTION = {Status.GREEN: 0.0, Status.YELLOW: 0.5, Status.RED: 1.0}

"""Check reports: the uniform result of completeness/consistency checking."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class CheckKind(str, Enum):
    COMPLETENESS = "completeness"
    CONSISTENCY = "consistency"
    DATA_READABLE = "data-readable"
    COMPUTABLE = "computable"
    RENDERABLE = "renderable"


@dataclass
class CheckItem:
    subject: str
    kind: CheckKind
    ok: bool
    message: str = ""

    def to_dict(self) -> dict:
        return {
            "subject": self.subject,
            "check": self.kind.value,
            "status": "pass" if self.ok else "fail",
            "message": self.message,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CheckItem":
        return cls(
            subject=data["subject"],
            kind=CheckKind(data["check"]),
            ok=data["status"] == "pass",
            message=data.get("message", ""),
        )


@dataclass
class CheckReport:
    """One item per (subject, applicable check kind); passes iff all items pass."""

    items: list[CheckItem] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(item.ok for item in self.items)

    @property
    def failures(self) -> list[CheckItem]:
        return [item for item in self.items if not item.ok]

    def add(self, subject: str, kind: CheckKind, ok: bool, message: str = "") -> None:
        self.items.append(CheckItem(subject, kind, ok, message))

    def merge(self, other: "CheckReport") -> None:
        self.items.extend(other.items)

    def for_subject(self, subject: str) -> list[CheckItem]:
        return [item for item in self.items if item.subject == subject]

    def to_dict(self) -> dict:
        return {
            "format": "check-report/1",
            "pass": self.passed,
            "items": [item.to_dict() for item in self.items],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CheckReport":
        return cls(items=[CheckItem.from_dict(item) for item in data.get("items", [])])

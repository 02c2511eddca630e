"""Structural consistency checking of baselined project plans."""

from __future__ import annotations

from dataclasses import dataclass

VIOLATION_KINDS = ("end-before-start", "child-outside-parent", "negative-baseline",
                   "parent-cycle", "milestone-missing-date")


@dataclass
class PlanViolation:
    kind: str
    subject: str
    message: str

    def to_record(self) -> dict:
        return {"kind": self.kind, "subject": self.subject,
                "message": self.message, "status": "red"}


def plan_consistency(plan: list[dict]) -> list[PlanViolation]:
    """Enumerate plan violations: inverted windows, children escaping their
    parent's window, negative baselines, parent cycles, undated milestones.

    Rows caught in a parent cycle are excluded from window checks; unknown
    parent references are ignored here (they are a schema concern).
    """
    rows = {str(r["id"]): r for r in plan if r.get("id") is not None}
    violations: list[PlanViolation] = []

    cycle_members: set[str] = set()
    visited: dict[str, int] = {}
    cycles: list[list[str]] = []
    for start_id in sorted(rows):
        if visited.get(start_id):
            continue
        path: list[str] = []
        node = start_id
        while node in rows and visited.get(node) is None:
            visited[node] = 1
            path.append(node)
            parent = rows[node].get("parent-id")
            node = str(parent) if parent else ""
        if node in path:
            cycle = path[path.index(node):]
            cycles.append(cycle)
            cycle_members.update(cycle)
        for seen in path:
            visited[seen] = 2
    for cycle in cycles:
        anchor = min(cycle)
        violations.append(PlanViolation(
            "parent-cycle", anchor,
            "cyclic parent references through: " + ", ".join(sorted(cycle))))

    for aid in sorted(rows):
        row = rows[aid]
        start = row.get("start")
        end = row.get("end")
        if start and end and end < start:
            violations.append(PlanViolation(
                "end-before-start", aid, f"activity ends {end} before it starts {start}"))
        baseline = row.get("effort-baseline-hours")
        if baseline is not None and float(baseline) < 0:
            violations.append(PlanViolation(
                "negative-baseline", aid, f"effort baseline is negative: {baseline}"))
        if row.get("is-milestone") and not end and not start:
            violations.append(PlanViolation(
                "milestone-missing-date", aid, "milestone lacks a date"))
        parent_id = str(row["parent-id"]) if row.get("parent-id") else ""
        if parent_id and parent_id in rows and aid not in cycle_members and parent_id not in cycle_members:
            parent = rows[parent_id]
            pstart, pend = parent.get("start"), parent.get("end")
            outside = []
            if start and pstart and start < pstart:
                outside.append(f"starts {start} before parent start {pstart}")
            if end and pend and end > pend:
                outside.append(f"ends {end} after parent end {pend}")
            if outside:
                violations.append(PlanViolation(
                    "child-outside-parent", aid,
                    f"window escapes parent {parent_id!r}: " + "; ".join(outside)))

    violations.sort(key=lambda v: (v.subject, v.kind))
    return violations

"""Traffic-light assessment of static code-quality reports."""

from __future__ import annotations

from dataclasses import dataclass

from cockpit.status import Status


class ThresholdConfigError(ValueError):
    """A report metric has neither its own thresholds nor a default policy."""

    def __init__(self, metric: str):
        self.metric = metric
        super().__init__(f"no thresholds configured for metric {metric!r} and no default policy set")


@dataclass
class ModuleAssessment:
    module: str
    status: Status
    details: list[dict]  # per metric: name, value, status

    def to_summary_record(self) -> dict:
        return {"module-id": self.module, "status": self.status.value}


def code_quality_assess(report: list[dict], thresholds: dict[str, dict],
                        default_policy: dict | None = None) -> list[ModuleAssessment]:
    """Rate every module's metrics against yellow/red bounds (higher is worse).

    A value below the yellow bound is green, below the red bound yellow,
    otherwise red; the module status is the worst of its metrics.
    """
    per_module: dict[str, list[dict]] = {}
    for rec in report:
        module = str(rec.get("module-id", ""))
        metric = str(rec.get("metric-name", ""))
        value = float(rec.get("value", 0.0))
        bounds = thresholds.get(metric, default_policy)
        if bounds is None:
            raise ThresholdConfigError(metric)
        yellow = float(bounds["yellow"])
        red = float(bounds["red"])
        if value < yellow:
            status = Status.GREEN
        elif value < red:
            status = Status.YELLOW
        else:
            status = Status.RED
        per_module.setdefault(module, []).append({
            "module-id": module,
            "metric-name": metric,
            "value": value,
            "status": status.value,
        })
    out = []
    for module in sorted(per_module):
        details = sorted(per_module[module], key=lambda d: d["metric-name"])
        worst = Status.worst([Status(d["status"]) for d in details])
        out.append(ModuleAssessment(module, worst, details))
    return out

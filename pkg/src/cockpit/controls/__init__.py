"""Shipped control components: techniques, data types, forms, and views."""

from cockpit.controls.earned_value import EvaSnapshot, earned_value, leaf_activities, planned_fraction
from cockpit.controls.effort import (
    DeviationPoint,
    DeviationSeries,
    EffortAggregate,
    aggregate_effort,
    tolerance_range_check,
)
from cockpit.controls.milestone import MilestoneTrend, milestone_trend
from cockpit.controls.plan_checks import VIOLATION_KINDS, PlanViolation, plan_consistency
from cockpit.controls.quality import ModuleAssessment, ThresholdConfigError, code_quality_assess
from cockpit.controls.registry import shipped_registry, shipped_repository
from cockpit.controls.tracking import (
    EfficiencyEntry,
    RegularityEntry,
    defect_detection_efficiency,
    effort_tracking_regularity,
)

__all__ = [
    "DeviationPoint",
    "DeviationSeries",
    "EffortAggregate",
    "EfficiencyEntry",
    "EvaSnapshot",
    "MilestoneTrend",
    "ModuleAssessment",
    "PlanViolation",
    "RegularityEntry",
    "ThresholdConfigError",
    "VIOLATION_KINDS",
    "aggregate_effort",
    "code_quality_assess",
    "defect_detection_efficiency",
    "earned_value",
    "effort_tracking_regularity",
    "leaf_activities",
    "milestone_trend",
    "plan_consistency",
    "planned_fraction",
    "shipped_registry",
    "shipped_repository",
    "tolerance_range_check",
]

"""Visualization catena model: component types, instances, checks, evaluation."""

from cockpit.catena.report import CheckItem, CheckKind, CheckReport
from cockpit.catena.types import (
    ComponentRepository,
    DaoPackageDef,
    DataTypeDef,
    FieldDef,
    FunctionDef,
    ParameterDef,
    SlotDef,
    ViewDef,
    WebFormDef,
    validate_repository,
)
from cockpit.catena.instances import (
    DataEntry,
    FunctionInstance,
    ProducerRef,
    Schedule,
    ViewInstance,
    VisualizationCatena,
    WebFormInstance,
)
from cockpit.catena.store import Payload, ProjectDataStore
from cockpit.catena.validate import CycleError, evaluation_order, topological_order, validate_catena
from cockpit.catena.evaluate import EvaluationResult, FunctionRegistry, evaluate
from cockpit.catena.schedule import CollectionStatus, collection_status
from cockpit.catena.retrospective import (
    DeviationRecord,
    GroundTruthEvent,
    RetrospectiveReport,
    retrospective,
)

__all__ = [
    "CheckItem",
    "CheckKind",
    "CheckReport",
    "CollectionStatus",
    "ComponentRepository",
    "CycleError",
    "DaoPackageDef",
    "DataEntry",
    "DataTypeDef",
    "DeviationRecord",
    "EvaluationResult",
    "FieldDef",
    "FunctionDef",
    "FunctionInstance",
    "FunctionRegistry",
    "GroundTruthEvent",
    "ParameterDef",
    "Payload",
    "ProducerRef",
    "ProjectDataStore",
    "RetrospectiveReport",
    "Schedule",
    "SlotDef",
    "ViewDef",
    "ViewInstance",
    "VisualizationCatena",
    "WebFormDef",
    "WebFormInstance",
    "collection_status",
    "evaluate",
    "evaluation_order",
    "retrospective",
    "topological_order",
    "validate_catena",
    "validate_repository",
]

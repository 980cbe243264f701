"""chorda: annotated business-process requirements to BPMN collaboration models."""

from .classify import ClassificationIssue, suggest_class, validate_classification
from .jsonio import SchemaError, from_json, to_json
from .layout import InvalidModelError, LayoutedDiagram, Rect, layout
from .markup import ParseDiagnostic, Severity, SourceSpan, parse_document, serialize_document
from .model import (
    BpmnModel,
    DataObject,
    DictionaryEntry,
    EndEvent,
    MessageFlow,
    Participant,
    Pool,
    RequirementsDocument,
    SequenceFlow,
    StartEvent,
    Statement,
    StatementClass,
    Store,
    SubProcess,
    Task,
    TaskKind,
    TraceLink,
    Violation,
    canonicalize,
    validate_model,
)
from .orchestrate import BindingError, ExpansionError, GroupBinding, bind_by_name, bind_group, expand
from .skeleton import ClassificationError, generate_skeleton
from .svg import to_svg
from .trace import CoverageReport, check_completeness
from .xpdl import to_xpdl

__version__ = "0.1.0"

__all__ = [
    "BindingError",
    "BpmnModel",
    "ClassificationError",
    "ClassificationIssue",
    "CoverageReport",
    "DataObject",
    "DictionaryEntry",
    "EndEvent",
    "ExpansionError",
    "GroupBinding",
    "InvalidModelError",
    "LayoutedDiagram",
    "MessageFlow",
    "ParseDiagnostic",
    "Participant",
    "Pool",
    "Rect",
    "RequirementsDocument",
    "SchemaError",
    "SequenceFlow",
    "Severity",
    "SourceSpan",
    "StartEvent",
    "Statement",
    "StatementClass",
    "Store",
    "SubProcess",
    "Task",
    "TaskKind",
    "TraceLink",
    "Violation",
    "bind_by_name",
    "bind_group",
    "canonicalize",
    "check_completeness",
    "expand",
    "from_json",
    "generate_skeleton",
    "layout",
    "parse_document",
    "serialize_document",
    "suggest_class",
    "to_json",
    "to_svg",
    "to_xpdl",
    "validate_classification",
    "validate_model",
]

"""Regulatory knowledge base: nomenclature, legal notes, exemption lists."""

from tariffcheck.kb.conditions import (
    AllOf,
    AnyOf,
    AnySide,
    Compare,
    ConditionSyntaxError,
    EvalResult,
    HasCategory,
    Not,
    NoteCondition,
    eval_condition,
    parse_condition,
    render_condition,
)
from tariffcheck.kb.hscode import HsCode, HsCodeError
from tariffcheck.kb.loader import KbFormatError, parse_kb
from tariffcheck.kb.model import (
    ExemptionEntry,
    ExemptionList,
    ExemptionStatus,
    Heading,
    KbQueryError,
    KnowledgeBase,
    LegalNote,
    Subheading,
    exemption_status,
    kb_fingerprint,
    notes_for,
)

__all__ = [
    "AllOf",
    "AnyOf",
    "AnySide",
    "Compare",
    "ConditionSyntaxError",
    "EvalResult",
    "ExemptionEntry",
    "ExemptionList",
    "ExemptionStatus",
    "HasCategory",
    "Heading",
    "HsCode",
    "HsCodeError",
    "KbFormatError",
    "KbQueryError",
    "KnowledgeBase",
    "LegalNote",
    "Not",
    "NoteCondition",
    "Subheading",
    "eval_condition",
    "exemption_status",
    "kb_fingerprint",
    "notes_for",
    "parse_condition",
    "parse_kb",
    "render_condition",
]

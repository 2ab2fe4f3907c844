"""Verification assistant: cross-reference claimed codes, explain findings."""

from tariffcheck.gpva.adapters import AdapterRanking, SemanticAdapter, SynonymAdapter
from tariffcheck.gpva.explain import explain, render_report_text
from tariffcheck.gpva.model import Citation, Finding, FindingStatus, VerificationReport
from tariffcheck.gpva.serialize import report_from_dict, report_to_dict, serialize_report
from tariffcheck.gpva.verify import (
    TieredRanking,
    VerifierConfig,
    tiered_rank,
    verify_application,
    verify_item,
)

__all__ = [
    "AdapterRanking",
    "Citation",
    "Finding",
    "FindingStatus",
    "SemanticAdapter",
    "SynonymAdapter",
    "TieredRanking",
    "VerificationReport",
    "VerifierConfig",
    "explain",
    "render_report_text",
    "report_from_dict",
    "report_to_dict",
    "serialize_report",
    "tiered_rank",
    "verify_application",
    "verify_item",
]

"""Application intake: line items, document parsing, extraction adapters."""

from tariffcheck.intake.adapter import ExtractionAdapter, ExtractionResult, PassThroughExtractor
from tariffcheck.intake.model import Application, LineItem
from tariffcheck.intake.parse import (
    ApplicationParseError,
    ItemProblem,
    ValidationFinding,
    app_from_dict,
    app_to_dict,
    normalize_hs,
    parse_application,
    parse_item_block,
    render_application,
    validate_items,
)

__all__ = [
    "Application",
    "ApplicationParseError",
    "ExtractionAdapter",
    "ExtractionResult",
    "ItemProblem",
    "LineItem",
    "PassThroughExtractor",
    "ValidationFinding",
    "app_from_dict",
    "app_to_dict",
    "normalize_hs",
    "parse_application",
    "parse_item_block",
    "render_application",
    "validate_items",
]

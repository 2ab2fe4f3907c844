"""Extraction adapter contract.

A real OCR/document-understanding engine plugs in behind this seam; the
bundled pass-through provider reads documents already in the canonical
text format. Adapter output must satisfy the line-item invariants or the
document is rejected with the field-level report.

Per-field extraction confidence is carried through to findings downstream
but never thresholded anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Protocol, runtime_checkable

from tariffcheck.intake.model import Application
from tariffcheck.intake.parse import parse_application


@dataclass(frozen=True)
class ExtractionResult:
    application: Application
    # item index -> field name -> confidence in [0, 1]
    field_confidence: Mapping[int, Mapping[str, float]] = field(default_factory=dict)


@runtime_checkable
class ExtractionAdapter(Protocol):
    """Named provider mapping raw document bytes to structured line items."""

    name: str

    def extract(self, document: bytes) -> ExtractionResult:
        ...


class PassThroughExtractor:
    """Reads the canonical structured text format; confidence 1.0 per field."""

    name = "pass-through"

    def extract(self, document: bytes) -> ExtractionResult:
        app = parse_application(document)
        confidence = {
            item.index: {
                key: 1.0
                for key in (
                    "description",
                    "claimed_code",
                    "quantity",
                    "value",
                    *(f"attr.{k}" for k in item.attributes),
                )
            }
            for item in app.items
        }
        return ExtractionResult(application=app, field_confidence=confidence)

"""Finding and report types."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping

from tariffcheck.gir.model import ClassificationResult
from tariffcheck.kb.hscode import HsCode


class FindingStatus(str, Enum):
    VERIFIED = "Verified"
    DISCREPANCY = "Discrepancy"
    INELIGIBLE = "Ineligible"
    NEEDS_REVIEW = "NeedsReview"


@dataclass(frozen=True)
class Citation:
    """Pointer to the regulation behind a decision."""

    note_id: str
    excerpt: str
    citation_uri: str


@dataclass(frozen=True)
class Finding:
    """Per-line verdict with the full explainable context.

    ``tags`` carries secondary markers such as ``subheading_mismatch``
    (claimed and suggested agree at heading level but diverge below it).
    Extraction confidences from the intake adapter ride along untouched.
    """

    item_index: int
    status: FindingStatus
    claimed_code: HsCode | None
    suggested: ClassificationResult | None
    explanation: str
    citations: tuple[Citation, ...]
    confidence: float
    exemption: str | None = None
    tags: tuple[str, ...] = ()
    extraction_confidence: tuple[tuple[str, float], ...] | None = None


@dataclass(frozen=True)
class VerificationReport:
    """Consolidated per-application result; one finding per item."""

    app_id: str
    revision: int
    kb_version: str
    findings: tuple[Finding, ...]

    @property
    def summary(self) -> Mapping[str, int]:
        counts = {status.value: 0 for status in FindingStatus}
        for finding in self.findings:
            counts[finding.status.value] += 1
        return counts

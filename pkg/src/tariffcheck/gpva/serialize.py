"""Report serialization: one canonical byte form per report.

The CLI and the HTTP API both emit exactly these bytes, which is what
makes report determinism and CLI/API parity byte-checkable.
"""

from __future__ import annotations

from tariffcheck import canon
from tariffcheck.gir.model import ClassificationResult, GirRule, GirStep
from tariffcheck.gpva.model import Citation, Finding, FindingStatus, VerificationReport
from tariffcheck.kb.hscode import HsCode


def step_to_dict(step: GirStep) -> dict:
    return {
        "rule": step.rule.value,
        "justification": step.justification,
        "cited_notes": list(step.cited_notes),
        "candidates_before": list(step.candidates_before),
        "candidates_after": list(step.candidates_after),
        "needs_review": step.needs_review,
    }


def step_from_dict(data: dict) -> GirStep:
    return GirStep(
        rule=GirRule(data["rule"]),
        justification=data["justification"],
        cited_notes=tuple(data.get("cited_notes", [])),
        candidates_before=tuple(data.get("candidates_before", [])),
        candidates_after=tuple(data.get("candidates_after", [])),
        needs_review=bool(data.get("needs_review", False)),
    )


def classification_to_dict(result: ClassificationResult) -> dict:
    return {
        "code": result.code.digits if result.code else None,
        "confidence": result.confidence,
        "evidence_incomplete": result.evidence_incomplete,
        "decided_by": result.decided_by.value if result.decided_by else None,
        "missing_attrs": list(result.missing_attrs),
        "trace": [step_to_dict(s) for s in result.trace],
    }


def classification_from_dict(data: dict) -> ClassificationResult:
    return ClassificationResult(
        code=HsCode(data["code"]) if data.get("code") else None,
        trace=tuple(step_from_dict(s) for s in data.get("trace", [])),
        confidence=float(data["confidence"]),
        evidence_incomplete=bool(data["evidence_incomplete"]),
        decided_by=GirRule(data["decided_by"]) if data.get("decided_by") else None,
        missing_attrs=tuple(data.get("missing_attrs", [])),
    )


def finding_to_dict(finding: Finding) -> dict:
    return {
        "item_index": finding.item_index,
        "status": finding.status.value,
        "claimed_code": finding.claimed_code.digits if finding.claimed_code else None,
        "suggested": classification_to_dict(finding.suggested) if finding.suggested else None,
        "explanation": finding.explanation,
        "citations": [
            {"note_id": c.note_id, "excerpt": c.excerpt, "citation_uri": c.citation_uri}
            for c in finding.citations
        ],
        "confidence": finding.confidence,
        "exemption": finding.exemption,
        "tags": list(finding.tags),
        "extraction_confidence": (
            {k: v for k, v in finding.extraction_confidence}
            if finding.extraction_confidence is not None
            else None
        ),
    }


def finding_from_dict(data: dict) -> Finding:
    return Finding(
        item_index=int(data["item_index"]),
        status=FindingStatus(data["status"]),
        claimed_code=HsCode(data["claimed_code"]) if data.get("claimed_code") else None,
        suggested=classification_from_dict(data["suggested"]) if data.get("suggested") else None,
        explanation=data["explanation"],
        citations=tuple(
            Citation(c["note_id"], c["excerpt"], c["citation_uri"]) for c in data.get("citations", [])
        ),
        confidence=float(data["confidence"]),
        exemption=data.get("exemption"),
        tags=tuple(data.get("tags", [])),
        extraction_confidence=(
            tuple(sorted(data["extraction_confidence"].items()))
            if data.get("extraction_confidence") is not None
            else None
        ),
    )


def report_to_dict(report: VerificationReport) -> dict:
    return {
        "app_id": report.app_id,
        "revision": report.revision,
        "kb_version": report.kb_version,
        "summary": dict(report.summary),
        "findings": [finding_to_dict(f) for f in report.findings],
    }


def report_from_dict(data: dict) -> VerificationReport:
    return VerificationReport(
        app_id=data["app_id"],
        revision=int(data["revision"]),
        kb_version=data["kb_version"],
        findings=tuple(finding_from_dict(f) for f in data.get("findings", [])),
    )


def serialize_report(report: VerificationReport) -> bytes:
    """Canonical JSON bytes; byte-identical for equal reports."""
    return canon.canonical_bytes(report_to_dict(report))

"""Deterministic explanation rendering.

Explanations are template-rendered from the finding itself, mirroring the
Issue / Relevant Rule/Note / Suggested Classification / Reasoning block
structure an officer reads, with the GIR trace spelled out underneath.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

from tariffcheck.gir.model import RULE_DISPLAY
from tariffcheck.kb.hscode import HsCode

if TYPE_CHECKING:
    from tariffcheck.gpva.model import Finding, VerificationReport


def explain(finding: "Finding") -> str:
    """Render the finding's explanation text (pure function of the finding)."""
    from tariffcheck.gpva.model import FindingStatus

    lines: list[str] = []
    lines.append(f"Status: {finding.status.value} (confidence {finding.confidence:.2f}).")
    lines.append(f"Issue: {_issue_sentence(finding)}")

    claimed = finding.claimed_code.display() if finding.claimed_code else "none"
    suggested_code = finding.suggested.code if finding.suggested else None
    suggested = suggested_code.display() if suggested_code else "undetermined"
    lines.append(f"Claimed code: {claimed}. Suggested code: {suggested}.")

    for citation in finding.citations:
        lines.append(
            f"Relevant Rule/Note: [{citation.note_id}] {citation.excerpt} ({citation.citation_uri})"
        )

    if suggested_code is not None and finding.suggested is not None:
        rule = finding.suggested.decided_by
        applied = f" Application of {RULE_DISPLAY[rule]}." if rule else ""
        lines.append(
            f"Suggested Classification: Heading {_heading_display(suggested_code)}.{applied}"
        )
    else:
        lines.append("Suggested Classification: undetermined.")

    if finding.suggested is not None and finding.suggested.trace:
        lines.append("Trace:")
        for i, step in enumerate(finding.suggested.trace, start=1):
            cited = f" [notes: {', '.join(step.cited_notes)}]" if step.cited_notes else ""
            lines.append(f"  {i}. {RULE_DISPLAY[step.rule]}: {step.justification}{cited}")

    lines.append(f"Reasoning: {_reasoning(finding)}")

    if finding.status == FindingStatus.NEEDS_REVIEW:
        reasons = _review_reasons(finding)
        if reasons:
            lines.append("Review required: " + "; ".join(reasons) + ".")
    return "\n".join(lines)


def _issue_sentence(finding: "Finding") -> str:
    from tariffcheck.gpva.model import FindingStatus

    status = finding.status
    if status == FindingStatus.DISCREPANCY:
        if finding.claimed_code is None:
            return "No HS code claimed; a classification is suggested below."
        heading = finding.claimed_code.heading
        return (
            f"Potential misclassification if claimed under heading "
            f"{heading[:2]}.{heading[2:]} (Chapter {heading[:2]})."
        )
    if status == FindingStatus.VERIFIED:
        return "None. Claimed code agrees with the suggested classification and is exemption-eligible."
    if status == FindingStatus.INELIGIBLE:
        return "Classification agrees but the code is not on an applicable exemption list."
    return "Automatic verification could not be completed; officer review required."


def _reasoning(finding: "Finding") -> str:
    from tariffcheck.gpva.model import FindingStatus

    rule = finding.suggested.decided_by if finding.suggested else None
    applied = f" Application of {RULE_DISPLAY[rule]}." if rule else ""
    note_texts = [c.excerpt for c in finding.citations if not c.excerpt.startswith("Exemption list")]
    if finding.status == FindingStatus.VERIFIED:
        exemption_ids = [
            c.note_id for c in finding.citations if c.excerpt.startswith("Exemption list")
        ]
        listed = f" Eligible under exemption list {exemption_ids[0]}." if exemption_ids else ""
        claimed = finding.claimed_code.display() if finding.claimed_code else "none"
        return f"Claimed code {claimed} verified at heading level.{listed}{applied}"
    if note_texts:
        return " ".join(note_texts) + applied
    if finding.suggested is not None and finding.suggested.code is not None:
        return f"Classification follows from the heading terms.{applied}"
    return "No heading in the knowledge base covers the goods as described."


def _review_reasons(finding: "Finding") -> list[str]:
    reasons: list[str] = []
    suggested = finding.suggested
    if suggested is not None:
        if suggested.code is None:
            reasons.append("classification undetermined")
        if suggested.missing_attrs:
            reasons.append("missing attributes: " + ", ".join(suggested.missing_attrs))
        elif suggested.evidence_incomplete:
            reasons.append("evidence incomplete")
        for step in suggested.trace:
            if step.needs_review:
                reasons.append(step.justification.rstrip(".").lower())
    if "adapter_degraded" in finding.tags:
        reasons.append("semantic adapter unavailable, lexical fallback used")
    if "exemption_evidence_incomplete" in finding.tags:
        reasons.append("exemption condition could not be evaluated from the given attributes")
    return reasons


def _heading_display(code: HsCode) -> str:
    heading = code.heading
    return f"{heading[:2]}.{heading[2:]}"


def render_report_text(report: "VerificationReport") -> str:
    """Human-readable consolidated report for terminals and correction letters."""
    lines = [
        f"Verification report for {report.app_id} (revision {report.revision}, "
        f"KB {report.kb_version})",
        "Summary: "
        + ", ".join(f"{status}={count}" for status, count in sorted(report.summary.items())),
        "",
    ]
    for finding in report.findings:
        lines.append(f"--- Item {finding.item_index} ---")
        lines.append(finding.explanation)
        lines.append("")
    return "\n".join(lines)

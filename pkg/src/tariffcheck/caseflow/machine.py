"""Case state machine.

    Submitted -> UnderVerification -> FindingsIssued -> Approved -> Closed
                                        |        \\-> Rejected -> Closed
                                        v
                              CorrectionRequested -> Resubmitted
                                        ^                |
                                        \\- (loop) <------/ -> UnderVerification

Every transition appends exactly one matching audit entry; the entry and
the state change are produced together in one new record. The
resubmission loop has no revision limit (policy, not mechanism).
"""

from __future__ import annotations

from dataclasses import replace
from datetime import datetime, timezone

from tariffcheck.caseflow.model import (
    AuditEntry,
    CaseEvent,
    CaseRecord,
    CaseState,
    OfficerDecision,
    Revision,
    decision_to_dict,
)
from tariffcheck.gpva.model import FindingStatus, VerificationReport
from tariffcheck.gpva.serialize import report_to_dict
from tariffcheck.intake.model import Application
from tariffcheck.intake.parse import app_to_dict


class IllegalTransition(ValueError):
    def __init__(self, state: CaseState, event: CaseEvent) -> None:
        super().__init__(f"event {event.value!r} is not legal from state {state.value!r}")
        self.state = state
        self.event = event


class DecisionError(ValueError):
    pass


class UndecidedFindingsError(ValueError):
    def __init__(self, indices: list[int]) -> None:
        super().__init__(f"undecided findings for items {indices}")
        self.indices = indices


_ALLOWED: dict[CaseEvent, tuple[frozenset[CaseState], CaseState]] = {
    CaseEvent.VERIFICATION_STARTED: (
        frozenset({CaseState.SUBMITTED, CaseState.RESUBMITTED}),
        CaseState.UNDER_VERIFICATION,
    ),
    CaseEvent.FINDINGS_ISSUED: (
        frozenset({CaseState.UNDER_VERIFICATION}),
        CaseState.FINDINGS_ISSUED,
    ),
    CaseEvent.CORRECTION_REQUESTED: (
        frozenset({CaseState.FINDINGS_ISSUED}),
        CaseState.CORRECTION_REQUESTED,
    ),
    CaseEvent.RESUBMITTED: (
        frozenset({CaseState.CORRECTION_REQUESTED}),
        CaseState.RESUBMITTED,
    ),
    CaseEvent.APPROVED: (frozenset({CaseState.FINDINGS_ISSUED}), CaseState.APPROVED),
    CaseEvent.REJECTED: (frozenset({CaseState.FINDINGS_ISSUED}), CaseState.REJECTED),
    CaseEvent.CLOSED: (
        frozenset({CaseState.APPROVED, CaseState.REJECTED}),
        CaseState.CLOSED,
    ),
}


def now_utc() -> str:
    return datetime.now(timezone.utc).isoformat()


def _append(case: CaseRecord, event: CaseEvent, actor: str, payload: dict, at: str | None) -> tuple:
    entry = AuditEntry.make(case.next_seq, at or now_utc(), actor, event, payload)
    return case.audit + (entry,)


def _check(case: CaseRecord, event: CaseEvent) -> CaseState:
    if event not in _ALLOWED:
        raise IllegalTransition(case.state, event)
    allowed_from, to_state = _ALLOWED[event]
    if case.state not in allowed_from:
        raise IllegalTransition(case.state, event)
    return to_state


def new_case(app: Application, actor: str = "applicant", at: str | None = None) -> CaseRecord:
    """Create a case in Submitted with its first audit entry."""
    if app.revision != 1:
        raise ValueError(f"new cases start at revision 1, got {app.revision}")
    entry = AuditEntry.make(
        1, at or now_utc(), actor, CaseEvent.SUBMITTED, {"application": app_to_dict(app)}
    )
    return CaseRecord(
        app_id=app.app_id,
        state=CaseState.SUBMITTED,
        revisions=(Revision(revision=1, application=app),),
        decisions=(),
        audit=(entry,),
    )


def start_verification(case: CaseRecord, actor: str = "system", at: str | None = None) -> CaseRecord:
    to_state = _check(case, CaseEvent.VERIFICATION_STARTED)
    audit = _append(case, CaseEvent.VERIFICATION_STARTED, actor, {"revision": case.revision}, at)
    return replace(case, state=to_state, audit=audit)


def attach_report(
    case: CaseRecord,
    report: VerificationReport,
    actor: str = "system",
    at: str | None = None,
) -> CaseRecord:
    """Record the KB version used, store the report on the current revision
    and issue findings."""
    to_state = _check(case, CaseEvent.FINDINGS_ISSUED)
    if report.app_id != case.app_id or report.revision != case.revision:
        raise ValueError(
            f"report for {report.app_id!r} rev {report.revision} does not match case "
            f"{case.app_id!r} rev {case.revision}"
        )
    stamp = at or now_utc()
    kb_entry = AuditEntry.make(
        case.next_seq, stamp, actor, CaseEvent.KB_VERSION_USED,
        {"kb_version": report.kb_version, "revision": case.revision},
    )
    findings_entry = AuditEntry.make(
        case.next_seq + 1, stamp, actor, CaseEvent.FINDINGS_ISSUED, {"report": report_to_dict(report)}
    )
    revisions = case.revisions[:-1] + (replace(case.current, report=report),)
    return replace(
        case, state=to_state, revisions=revisions, audit=case.audit + (kb_entry, findings_entry)
    )


def effective_decisions(case: CaseRecord, revision: int | None = None) -> dict[int, OfficerDecision]:
    """Latest decision per item for a revision (supersedes are explicit)."""
    rev = revision if revision is not None else case.revision
    current: dict[int, OfficerDecision] = {}
    for decision in case.decisions:
        if decision.revision == rev:
            current[decision.item_index] = decision
    return current


def record_decision(case: CaseRecord, decision: OfficerDecision, at: str | None = None) -> CaseRecord:
    """Append an officer decision with its audit entry.

    Duplicates for the same item and revision are rejected unless the new
    decision is an explicit supersede, so a change of mind stays visible in
    the trail.
    """
    if case.state != CaseState.FINDINGS_ISSUED:
        raise IllegalTransition(case.state, CaseEvent.DECISION_RECORDED)
    revision = case.current
    if decision.revision != revision.revision:
        raise DecisionError(
            f"decision targets revision {decision.revision}, case is at {revision.revision}"
        )
    indices = {item.index for item in revision.application.items}
    if decision.item_index not in indices:
        raise DecisionError(f"unknown item index {decision.item_index}")
    if decision.item_index in effective_decisions(case) and not decision.supersedes:
        raise DecisionError(
            f"item {decision.item_index} already has a decision for revision "
            f"{decision.revision}; record an explicit supersede"
        )
    if decision.action not in ("accept_ai", "override"):
        raise DecisionError(f"unknown action {decision.action!r}")

    finding = None
    if revision.report is not None:
        for f in revision.report.findings:
            if f.item_index == decision.item_index:
                finding = f
                break
    suggested = finding.suggested.code if finding and finding.suggested else None

    if decision.action == "override":
        if not decision.justification.strip():
            raise DecisionError("override requires a non-empty justification")
        if suggested is not None and decision.final_code.digits == suggested.digits:
            raise DecisionError("override must change the code; use accept_ai instead")
    else:
        expected = None
        if finding is not None:
            if finding.status == FindingStatus.VERIFIED and finding.claimed_code is not None:
                expected = finding.claimed_code
            elif suggested is not None:
                expected = suggested
        if expected is not None and decision.final_code.digits != expected.digits:
            raise DecisionError(
                f"accept_ai must take the assistant's code {expected.digits}, "
                f"got {decision.final_code.digits}"
            )

    audit = _append(
        case, CaseEvent.DECISION_RECORDED, decision.officer_id,
        {"decision": decision_to_dict(decision)}, at,
    )
    return replace(case, decisions=case.decisions + (decision,), audit=audit)


def request_correction(
    case: CaseRecord,
    guidance: dict[int, str] | None = None,
    actor: str = "system",
    at: str | None = None,
) -> CaseRecord:
    to_state = _check(case, CaseEvent.CORRECTION_REQUESTED)
    payload = {"revision": case.revision}
    if guidance:
        payload["guidance"] = {str(k): v for k, v in sorted(guidance.items())}
    audit = _append(case, CaseEvent.CORRECTION_REQUESTED, actor, payload, at)
    return replace(case, state=to_state, audit=audit)


def resubmit(
    case: CaseRecord, app: Application, actor: str = "applicant", at: str | None = None
) -> CaseRecord:
    """Re-enter the verification loop with the next revision."""
    to_state = _check(case, CaseEvent.RESUBMITTED)
    if app.app_id != case.app_id:
        raise ValueError(f"resubmission app_id {app.app_id!r} does not match case {case.app_id!r}")
    if app.revision != case.revision + 1:
        raise ValueError(
            f"resubmission must carry revision {case.revision + 1}, got {app.revision}"
        )
    audit = _append(case, CaseEvent.RESUBMITTED, actor, {"application": app_to_dict(app)}, at)
    return replace(
        case,
        state=to_state,
        revisions=case.revisions + (Revision(revision=app.revision, application=app),),
        audit=audit,
    )


def approve(case: CaseRecord, actor: str, at: str | None = None) -> CaseRecord:
    """Approve; every non-Verified finding needs a decision first."""
    to_state = _check(case, CaseEvent.APPROVED)
    undecided = _undecided_items(case)
    if undecided:
        raise UndecidedFindingsError(undecided)
    audit = _append(case, CaseEvent.APPROVED, actor, {"revision": case.revision}, at)
    return replace(case, state=to_state, audit=audit)


def reject(case: CaseRecord, actor: str, at: str | None = None) -> CaseRecord:
    to_state = _check(case, CaseEvent.REJECTED)
    undecided = _undecided_items(case)
    if undecided:
        raise UndecidedFindingsError(undecided)
    audit = _append(case, CaseEvent.REJECTED, actor, {"revision": case.revision}, at)
    return replace(case, state=to_state, audit=audit)


def close(case: CaseRecord, actor: str = "system", at: str | None = None) -> CaseRecord:
    to_state = _check(case, CaseEvent.CLOSED)
    audit = _append(case, CaseEvent.CLOSED, actor, {"final_state": case.state.value}, at)
    return replace(case, state=to_state, audit=audit)


def _undecided_items(case: CaseRecord) -> list[int]:
    report = case.current.report
    if report is None:
        return []
    decided = set(effective_decisions(case))
    return sorted(
        f.item_index
        for f in report.findings
        if f.status != FindingStatus.VERIFIED and f.item_index not in decided
    )


def transition(case: CaseRecord, event: CaseEvent, **kwargs) -> CaseRecord:
    """Generic dispatcher over the named transition helpers."""
    handlers = {
        CaseEvent.VERIFICATION_STARTED: start_verification,
        CaseEvent.FINDINGS_ISSUED: attach_report,
        CaseEvent.CORRECTION_REQUESTED: request_correction,
        CaseEvent.RESUBMITTED: resubmit,
        CaseEvent.APPROVED: approve,
        CaseEvent.REJECTED: reject,
        CaseEvent.CLOSED: close,
    }
    if event not in handlers:
        raise IllegalTransition(case.state, event)
    return handlers[event](case, **kwargs)

"""Case records, officer decisions and audit entries.

Everything is an immutable value; state changes produce a new
``CaseRecord`` with exactly one audit entry appended per transition. There
is deliberately no operation anywhere that mutates or removes an
``AuditEntry``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from tariffcheck import canon
from tariffcheck.gpva.model import VerificationReport
from tariffcheck.intake.model import Application
from tariffcheck.kb.hscode import HsCode


class CaseState(str, Enum):
    SUBMITTED = "Submitted"
    UNDER_VERIFICATION = "UnderVerification"
    FINDINGS_ISSUED = "FindingsIssued"
    CORRECTION_REQUESTED = "CorrectionRequested"
    RESUBMITTED = "Resubmitted"
    APPROVED = "Approved"
    REJECTED = "Rejected"
    CLOSED = "Closed"


class CaseEvent(str, Enum):
    SUBMITTED = "submitted"
    VERIFICATION_STARTED = "verification_started"
    FINDINGS_ISSUED = "findings_issued"
    DECISION_RECORDED = "decision_recorded"
    CORRECTION_REQUESTED = "correction_requested"
    RESUBMITTED = "resubmitted"
    APPROVED = "approved"
    REJECTED = "rejected"
    CLOSED = "closed"
    KB_VERSION_USED = "kb_version_used"


# Events that move the state machine (exactly one audit entry each).
TRANSITION_EVENTS = frozenset(
    {
        CaseEvent.SUBMITTED,
        CaseEvent.VERIFICATION_STARTED,
        CaseEvent.FINDINGS_ISSUED,
        CaseEvent.CORRECTION_REQUESTED,
        CaseEvent.RESUBMITTED,
        CaseEvent.APPROVED,
        CaseEvent.REJECTED,
        CaseEvent.CLOSED,
    }
)


@dataclass(frozen=True)
class OfficerDecision:
    """Final call on one item; overrides must be justified."""

    item_index: int
    action: str  # accept_ai | override
    final_code: HsCode
    justification: str
    officer_id: str
    decided_at: str
    revision: int
    supersedes: bool = False
    rating: int | None = None  # optional usefulness rating, audit-only


@dataclass(frozen=True)
class AuditEntry:
    """Append-only log record; ``seq`` is gapless per case, starting at 1."""

    seq: int
    at: str
    actor: str
    event: CaseEvent
    payload: dict
    digest: str

    @staticmethod
    def make(seq: int, at: str, actor: str, event: CaseEvent, payload: dict) -> "AuditEntry":
        return AuditEntry(
            seq=seq, at=at, actor=actor, event=event, payload=payload, digest=canon.digest(payload)
        )


@dataclass(frozen=True)
class Revision:
    revision: int
    application: Application
    report: VerificationReport | None = None


@dataclass(frozen=True)
class CaseRecord:
    app_id: str
    state: CaseState
    revisions: tuple[Revision, ...]
    decisions: tuple[OfficerDecision, ...]
    audit: tuple[AuditEntry, ...]

    @property
    def revision(self) -> int:
        return self.revisions[-1].revision

    @property
    def current(self) -> Revision:
        return self.revisions[-1]

    @property
    def next_seq(self) -> int:
        return len(self.audit) + 1


def decision_to_dict(decision: OfficerDecision) -> dict:
    return {
        "item_index": decision.item_index,
        "action": decision.action,
        "final_code": decision.final_code.digits,
        "justification": decision.justification,
        "officer_id": decision.officer_id,
        "decided_at": decision.decided_at,
        "revision": decision.revision,
        "supersedes": decision.supersedes,
        "rating": decision.rating,
    }


def decision_from_dict(data: dict) -> OfficerDecision:
    return OfficerDecision(
        item_index=int(data["item_index"]),
        action=data["action"],
        final_code=HsCode(data["final_code"]),
        justification=data["justification"],
        officer_id=data["officer_id"],
        decided_at=data["decided_at"],
        revision=int(data["revision"]),
        supersedes=bool(data.get("supersedes", False)),
        rating=data.get("rating"),
    )


def entry_to_dict(entry: AuditEntry) -> dict:
    return {
        "seq": entry.seq,
        "at": entry.at,
        "actor": entry.actor,
        "event": entry.event.value,
        "payload": entry.payload,
        "digest": entry.digest,
    }


def entry_from_dict(data: dict) -> AuditEntry:
    return AuditEntry(
        seq=int(data["seq"]),
        at=data["at"],
        actor=data["actor"],
        event=CaseEvent(data["event"]),
        payload=data["payload"],
        digest=data["digest"],
    )

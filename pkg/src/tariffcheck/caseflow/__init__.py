"""Case lifecycle, officer adjudication and the append-only audit trail."""

from tariffcheck.caseflow.machine import (
    DecisionError,
    IllegalTransition,
    UndecidedFindingsError,
    approve,
    attach_report,
    close,
    effective_decisions,
    new_case,
    record_decision,
    reject,
    request_correction,
    resubmit,
    start_verification,
    transition,
)
from tariffcheck.caseflow.model import (
    AuditEntry,
    CaseEvent,
    CaseRecord,
    CaseState,
    OfficerDecision,
    Revision,
)
from tariffcheck.caseflow.store import (
    CaseStore,
    ConflictError,
    IntegrityError,
    NotFoundError,
    replay,
)

__all__ = [
    "AuditEntry",
    "CaseEvent",
    "CaseRecord",
    "CaseState",
    "CaseStore",
    "ConflictError",
    "DecisionError",
    "IllegalTransition",
    "IntegrityError",
    "NotFoundError",
    "OfficerDecision",
    "Revision",
    "UndecidedFindingsError",
    "approve",
    "attach_report",
    "close",
    "effective_decisions",
    "new_case",
    "record_decision",
    "reject",
    "request_correction",
    "resubmit",
    "start_verification",
    "transition",
    "replay",
]

"""Embedded case storage: append-only event log per case plus snapshots.

The event log is the source of truth; ``load`` replays it. A snapshot of
the folded record is written alongside every few appends for quick listing
but is never trusted over the log. Writers are serialized per case with
optimistic version checks (the version is the committed entry count), so a
stale second writer conflicts instead of clobbering.
"""

from __future__ import annotations

import json
import os
import re
import threading
from dataclasses import replace
from pathlib import Path

from tariffcheck import canon
from tariffcheck.caseflow.model import (
    AuditEntry,
    CaseEvent,
    CaseRecord,
    CaseState,
    Revision,
    decision_from_dict,
    decision_to_dict,
    entry_from_dict,
    entry_to_dict,
)
from tariffcheck.gpva.serialize import report_from_dict, report_to_dict
from tariffcheck.intake.parse import app_from_dict, app_to_dict

_SAFE_ID = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]*$")
_SNAPSHOT_EVERY = 8


class IntegrityError(ValueError):
    """Audit log is gapped or an entry fails its digest check."""


class ConflictError(RuntimeError):
    """Another writer advanced the case since it was loaded."""


class NotFoundError(KeyError):
    pass


# --- Replay ------------------------------------------------------------------


def replay(entries: list[AuditEntry] | tuple[AuditEntry, ...]) -> CaseRecord:
    """Fold an audit log back into the case record it produced.

    Verifies gapless sequence numbers and per-entry payload digests before
    applying anything; the first bad sequence number is reported.
    """
    if not entries:
        raise IntegrityError("empty audit log")
    for i, entry in enumerate(entries):
        expected_seq = i + 1
        if entry.seq != expected_seq:
            raise IntegrityError(f"audit log gap: expected seq {expected_seq}, found seq {entry.seq}")
        if canon.digest(entry.payload) != entry.digest:
            raise IntegrityError(f"payload digest mismatch at seq {entry.seq}")

    first = entries[0]
    if first.event != CaseEvent.SUBMITTED:
        raise IntegrityError(f"audit log must start with 'submitted', found {first.event.value!r}")
    app = app_from_dict(first.payload["application"])
    case = CaseRecord(
        app_id=app.app_id,
        state=CaseState.SUBMITTED,
        revisions=(Revision(revision=app.revision, application=app),),
        decisions=(),
        audit=(first,),
    )
    for entry in entries[1:]:
        case = _apply(case, entry)
    return case


def _apply(case: CaseRecord, entry: AuditEntry) -> CaseRecord:
    event = entry.event
    audit = case.audit + (entry,)
    if event == CaseEvent.VERIFICATION_STARTED:
        return replace(case, state=CaseState.UNDER_VERIFICATION, audit=audit)
    if event == CaseEvent.KB_VERSION_USED:
        return replace(case, audit=audit)
    if event == CaseEvent.FINDINGS_ISSUED:
        report = report_from_dict(entry.payload["report"])
        revisions = case.revisions[:-1] + (replace(case.current, report=report),)
        return replace(case, state=CaseState.FINDINGS_ISSUED, revisions=revisions, audit=audit)
    if event == CaseEvent.DECISION_RECORDED:
        decision = decision_from_dict(entry.payload["decision"])
        return replace(case, decisions=case.decisions + (decision,), audit=audit)
    if event == CaseEvent.CORRECTION_REQUESTED:
        return replace(case, state=CaseState.CORRECTION_REQUESTED, audit=audit)
    if event == CaseEvent.RESUBMITTED:
        app = app_from_dict(entry.payload["application"])
        revisions = case.revisions + (Revision(revision=app.revision, application=app),)
        return replace(case, state=CaseState.RESUBMITTED, revisions=revisions, audit=audit)
    if event == CaseEvent.APPROVED:
        return replace(case, state=CaseState.APPROVED, audit=audit)
    if event == CaseEvent.REJECTED:
        return replace(case, state=CaseState.REJECTED, audit=audit)
    if event == CaseEvent.CLOSED:
        return replace(case, state=CaseState.CLOSED, audit=audit)
    raise IntegrityError(f"unexpected event {event.value!r} at seq {entry.seq}")


# --- Store -------------------------------------------------------------------


class CaseStore:
    """One directory per case: ``events.log`` (JSONL) and ``snapshot.json``."""

    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _lock(self, app_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(app_id, threading.Lock())

    def _case_dir(self, app_id: str) -> Path:
        if not _SAFE_ID.match(app_id):
            raise NotFoundError(f"invalid app_id {app_id!r}")
        return self.root / "cases" / app_id

    def exists(self, app_id: str) -> bool:
        return (self._case_dir(app_id) / "events.log").exists()

    def save(self, case: CaseRecord, base_version: int) -> int:
        """Append the case's new audit entries.

        ``base_version`` is the committed entry count the caller loaded;
        a mismatch with the log on disk means a concurrent writer won.
        Returns the new committed version.
        """
        with self._lock(case.app_id):
            case_dir = self._case_dir(case.app_id)
            log = case_dir / "events.log"
            committed = self._committed_count(log)
            if committed != base_version:
                raise ConflictError(
                    f"case {case.app_id!r} advanced from version {base_version} to {committed}"
                )
            if len(case.audit) < committed:
                raise ConflictError(
                    f"case {case.app_id!r} has fewer entries ({len(case.audit)}) than the log ({committed})"
                )
            new_entries = case.audit[committed:]
            if new_entries:
                case_dir.mkdir(parents=True, exist_ok=True)
                with open(log, "a", encoding="utf-8") as fh:
                    for entry in new_entries:
                        fh.write(canon.canonical_dumps(entry_to_dict(entry)) + "\n")
                    fh.flush()
                    os.fsync(fh.fileno())
            version = len(case.audit)
            if version // _SNAPSHOT_EVERY != committed // _SNAPSHOT_EVERY or case.state == CaseState.CLOSED:
                self._write_snapshot(case_dir, case)
            return version

    def load(self, app_id: str) -> tuple[CaseRecord, int]:
        """Replay the event log; returns the record and its version."""
        log = self._case_dir(app_id) / "events.log"
        if not log.exists():
            raise NotFoundError(f"no case {app_id!r}")
        entries = self.read_log(app_id)
        case = replay(entries)
        return case, len(entries)

    def read_log(self, app_id: str) -> list[AuditEntry]:
        log = self._case_dir(app_id) / "events.log"
        if not log.exists():
            raise NotFoundError(f"no case {app_id!r}")
        entries: list[AuditEntry] = []
        with open(log, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    entries.append(entry_from_dict(json.loads(line)))
        return entries

    def list_cases(self) -> list[dict]:
        """Lightweight summaries for queue screens, sorted by app_id."""
        cases_dir = self.root / "cases"
        if not cases_dir.exists():
            return []
        summaries = []
        for case_dir in sorted(cases_dir.iterdir()):
            if not (case_dir / "events.log").exists():
                continue
            case, _ = self.load(case_dir.name)
            summaries.append(case_summary(case))
        return summaries

    def _committed_count(self, log: Path) -> int:
        if not log.exists():
            return 0
        with open(log, encoding="utf-8") as fh:
            return sum(1 for line in fh if line.strip())

    def _write_snapshot(self, case_dir: Path, case: CaseRecord) -> None:
        snapshot = {
            "app_id": case.app_id,
            "state": case.state.value,
            "version": len(case.audit),
            "revisions": [
                {
                    "revision": rev.revision,
                    "application": app_to_dict(rev.application),
                    "report": report_to_dict(rev.report) if rev.report else None,
                }
                for rev in case.revisions
            ],
            "decisions": [decision_to_dict(d) for d in case.decisions],
        }
        tmp = case_dir / "snapshot.json.tmp"
        tmp.write_text(canon.canonical_dumps(snapshot), encoding="utf-8")
        tmp.replace(case_dir / "snapshot.json")


def case_summary(case: CaseRecord) -> dict:
    report = case.current.report
    return {
        "app_id": case.app_id,
        "applicant": case.current.application.applicant,
        "state": case.state.value,
        "revision": case.revision,
        "submitted_at": case.current.application.submitted_at,
        "items": len(case.current.application.items),
        "summary": dict(report.summary) if report else None,
    }

"""HTTP API over intake, verification, adjudication and KB management.

Single-process service with embedded storage. The KB snapshot is swapped
atomically on reload: requests capture the current snapshot once, so an
in-flight verification finishes entirely on the snapshot it started with
and every report cites exactly one KB version.
"""

from __future__ import annotations

import threading
import time

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from tariffcheck.caseflow import machine
from tariffcheck.caseflow.model import CaseRecord, CaseState, OfficerDecision
from tariffcheck.caseflow.store import CaseStore, ConflictError, NotFoundError, case_summary
from tariffcheck.gpva.explain import render_report_text
from tariffcheck.gpva.model import FindingStatus
from tariffcheck.gpva.serialize import classification_to_dict, report_to_dict, serialize_report
from tariffcheck.gpva.verify import verify_application
from tariffcheck.gir.engine import classify
from tariffcheck.intake.model import LineItem
from tariffcheck.intake.parse import ApplicationParseError, app_to_dict, parse_application
from tariffcheck.kb.hscode import HsCode, HsCodeError
from tariffcheck.kb.loader import KbFormatError, parse_kb
from tariffcheck.kb.model import KnowledgeBase
from tariffcheck.caseflow.model import entry_to_dict
from tariffcheck.service.config import ServiceConfig
from tariffcheck.service.metrics import MetricsRecorder

from pathlib import Path


class KbHolder:
    """Atomic snapshot holder; readers never see a half-swapped KB."""

    def __init__(self, kb: KnowledgeBase) -> None:
        self._kb = kb
        self._lock = threading.Lock()

    @property
    def current(self) -> KnowledgeBase:
        return self._kb

    def swap(self, new_kb: KnowledgeBase) -> KnowledgeBase:
        with self._lock:
            if new_kb.version <= self._kb.version:
                raise ValueError(
                    f"KB version must strictly increase: {new_kb.version!r} <= {self._kb.version!r}"
                )
            self._kb = new_kb
            return new_kb


class ServiceState:
    def __init__(self, config: ServiceConfig, kb: KnowledgeBase) -> None:
        self.config = config
        self.kb_holder = KbHolder(kb)
        self.store = CaseStore(config.storage_path)
        self.metrics = MetricsRecorder(manual_seconds_per_item=config.manual_seconds_per_item)
        self.adapter = None  # default synonym adapter unless a provider is injected


class DecisionBody(BaseModel):
    item_index: int
    action: str
    officer_id: str
    final_code: str | None = None
    justification: str = ""
    supersedes: bool = False
    rating: int | None = None


class OfficerBody(BaseModel):
    officer_id: str = "officer"


class ClassifyBody(BaseModel):
    description: str
    attributes: dict = {}


def _error(status_code: int, message: str, **extra) -> JSONResponse:
    return JSONResponse(status_code=status_code, content={"error": message, **extra})


def create_app(config: ServiceConfig, kb: KnowledgeBase | None = None) -> FastAPI:
    if kb is None:
        kb = parse_kb(Path(config.kb_path).read_bytes())
    state = ServiceState(config, kb)
    app = FastAPI(title="tariffcheck", version="1.0")
    app.state.runtime = state

    # --- intake ---------------------------------------------------------

    @app.post("/v1/applications", status_code=201)
    async def submit_application(request: Request):
        body = await request.body()
        try:
            application = parse_application(body)
        except ApplicationParseError as exc:
            return _error(400, str(exc), **exc.report())
        if state.store.exists(application.app_id):
            case, version = state.store.load(application.app_id)
            if case.state != CaseState.CORRECTION_REQUESTED:
                return _error(
                    409,
                    f"case {application.app_id!r} exists and is in state {case.state.value!r}; "
                    "resubmission is only possible after a correction request",
                )
            try:
                case = machine.resubmit(case, application)
            except ValueError as exc:
                return _error(409, str(exc))
            state.store.save(case, version)
            return JSONResponse(
                status_code=201,
                content={"app_id": case.app_id, "revision": case.revision, "state": case.state.value},
            )
        if application.revision != 1:
            return _error(400, f"new applications must carry revision 1, got {application.revision}")
        case = machine.new_case(application)
        state.store.save(case, 0)
        return {"app_id": case.app_id, "revision": case.revision, "state": case.state.value}

    # --- verification ----------------------------------------------------

    @app.post("/v1/applications/{app_id}/verify")
    def run_verification(app_id: str):
        try:
            case, version = state.store.load(app_id)
        except NotFoundError as exc:
            return _error(404, str(exc))
        snapshot = state.kb_holder.current  # captured once; reloads do not affect this run
        try:
            case = machine.start_verification(case)
        except machine.IllegalTransition as exc:
            return _error(409, str(exc))
        started = time.perf_counter()
        report = verify_application(
            snapshot, case.current.application, state.config.verifier(), state.adapter
        )
        wall = time.perf_counter() - started
        case = machine.attach_report(case, report)
        try:
            state.store.save(case, version)
        except ConflictError as exc:
            return _error(409, str(exc))
        state.metrics.record(report, wall)
        return Response(content=serialize_report(report), media_type="application/json")

    # --- cases ------------------------------------------------------------

    @app.get("/v1/cases")
    def list_cases(case_state: str | None = None):
        rows = state.store.list_cases()
        if case_state:
            rows = [row for row in rows if row["state"] == case_state]
        return {"cases": rows}

    @app.get("/v1/cases/{app_id}")
    def case_detail(app_id: str):
        try:
            case, _ = state.store.load(app_id)
        except NotFoundError as exc:
            return _error(404, str(exc))
        return _case_detail(case)

    @app.get("/v1/cases/{app_id}/report")
    def case_report(app_id: str, revision: int | None = None):
        try:
            case, _ = state.store.load(app_id)
        except NotFoundError as exc:
            return _error(404, str(exc))
        target = revision if revision is not None else case.revision
        for rev in case.revisions:
            if rev.revision == target:
                if rev.report is None:
                    return _error(409, f"revision {target} has no verification report yet")
                return Response(content=serialize_report(rev.report), media_type="application/json")
        return _error(404, f"no revision {target} for case {app_id!r}")

    @app.get("/v1/cases/{app_id}/audit")
    def case_audit(app_id: str):
        try:
            entries = state.store.read_log(app_id)
        except NotFoundError as exc:
            return _error(404, str(exc))
        return {"entries": [entry_to_dict(e) for e in entries]}

    # --- adjudication ----------------------------------------------------

    @app.post("/v1/cases/{app_id}/decisions")
    def adjudicate(app_id: str, body: DecisionBody):
        try:
            case, version = state.store.load(app_id)
        except NotFoundError as exc:
            return _error(404, str(exc))
        final_code, problem = _resolve_final_code(case, body)
        if problem is not None:
            return problem
        decision = OfficerDecision(
            item_index=body.item_index,
            action=body.action,
            final_code=final_code,
            justification=body.justification,
            officer_id=body.officer_id,
            decided_at=machine.now_utc(),
            revision=case.revision,
            supersedes=body.supersedes,
            rating=body.rating,
        )
        try:
            case = machine.record_decision(case, decision)
        except machine.IllegalTransition as exc:
            return _error(409, str(exc))
        except machine.DecisionError as exc:
            message = str(exc)
            if "unknown item" in message:
                return _error(404, message)
            if "already has a decision" in message:
                return _error(409, message)
            return _error(422, message)
        try:
            state.store.save(case, version)
        except ConflictError as exc:
            return _error(409, str(exc))
        return {"app_id": case.app_id, "state": case.state.value, "decisions": len(case.decisions)}

    @app.post("/v1/cases/{app_id}/request-correction")
    def request_correction(app_id: str):
        try:
            case, version = state.store.load(app_id)
        except NotFoundError as exc:
            return _error(404, str(exc))
        report = case.current.report
        if case.state != CaseState.FINDINGS_ISSUED or report is None:
            return _error(409, f"case {app_id!r} is in state {case.state.value!r}; no findings to correct")
        guidance = {f.item_index: f.explanation for f in report.findings}
        try:
            case = machine.request_correction(case, guidance)
        except machine.IllegalTransition as exc:
            return _error(409, str(exc))
        try:
            state.store.save(case, version)
        except ConflictError as exc:
            return _error(409, str(exc))
        return {
            "app_id": case.app_id,
            "state": case.state.value,
            "guidance": {str(k): v for k, v in sorted(guidance.items())},
            "letter": render_report_text(report),
        }

    @app.post("/v1/cases/{app_id}/approve")
    def approve_case(app_id: str, body: OfficerBody):
        return _finalize(app_id, body.officer_id, machine.approve)

    @app.post("/v1/cases/{app_id}/reject")
    def reject_case(app_id: str, body: OfficerBody):
        return _finalize(app_id, body.officer_id, machine.reject)

    @app.post("/v1/cases/{app_id}/close")
    def close_case(app_id: str):
        try:
            case, version = state.store.load(app_id)
        except NotFoundError as exc:
            return _error(404, str(exc))
        try:
            case = machine.close(case)
        except machine.IllegalTransition as exc:
            return _error(409, str(exc))
        try:
            state.store.save(case, version)
        except ConflictError as exc:
            return _error(409, str(exc))
        return {"app_id": case.app_id, "state": case.state.value}

    def _finalize(app_id: str, officer_id: str, action):
        try:
            case, version = state.store.load(app_id)
        except NotFoundError as exc:
            return _error(404, str(exc))
        try:
            case = action(case, officer_id)
        except machine.UndecidedFindingsError as exc:
            return _error(409, str(exc), undecided=exc.indices)
        except machine.IllegalTransition as exc:
            return _error(409, str(exc))
        try:
            state.store.save(case, version)
        except ConflictError as exc:
            return _error(409, str(exc))
        return {"app_id": case.app_id, "state": case.state.value}

    # --- knowledge base ----------------------------------------------------

    @app.get("/v1/kb")
    def kb_info():
        snapshot = state.kb_holder.current
        return {
            "version": snapshot.version,
            "headings": len(snapshot.headings),
            "notes": len(snapshot.notes),
            "exemption_lists": len(snapshot.exemptions),
        }

    @app.post("/v1/kb/reload")
    async def reload_kb(request: Request):
        content_type = request.headers.get("content-type", "")
        try:
            if "json" in content_type:
                body = await request.json()
                path = body.get("path")
                if not path:
                    return _error(400, "JSON body must carry a 'path' to a KB document")
                document = Path(path).read_bytes()
            else:
                document = await request.body()
            new_kb = parse_kb(document)
        except (KbFormatError, OSError) as exc:
            return _error(400, f"KB rejected, previous snapshot stays active: {exc}")
        try:
            state.kb_holder.swap(new_kb)
        except ValueError as exc:
            return _error(409, str(exc))
        return {"version": new_kb.version}

    # --- metrics and sandbox ------------------------------------------------

    @app.get("/v1/metrics")
    def metrics():
        return state.metrics.snapshot().to_dict()

    @app.post("/v1/classify")
    def classify_sandbox(body: ClassifyBody):
        """What-if classification; never persisted, never audited."""
        if not body.description.strip():
            return _error(400, "description must be non-empty")
        item = LineItem(index=1, description=body.description, attributes=body.attributes)
        snapshot = state.kb_holder.current
        result = classify(snapshot, item, state.config.engine())
        return {
            "kb_version": snapshot.version,
            "classification": classification_to_dict(result),
        }

    @app.get("/v1/health")
    def health():
        return {"status": "ok"}

    return app


def _resolve_final_code(case: CaseRecord, body: DecisionBody):
    """Infer accept_ai's final code from the finding when not supplied."""
    if body.final_code:
        try:
            return HsCode.parse(body.final_code), None
        except HsCodeError as exc:
            return None, _error(422, str(exc))
    report = case.current.report
    if body.action == "accept_ai" and report is not None:
        for finding in report.findings:
            if finding.item_index == body.item_index:
                if finding.status == FindingStatus.VERIFIED and finding.claimed_code is not None:
                    return finding.claimed_code, None
                if finding.suggested is not None and finding.suggested.code is not None:
                    return finding.suggested.code, None
    return None, _error(422, "final_code is required for this decision")


def _case_detail(case: CaseRecord) -> dict:
    return {
        **case_summary(case),
        "revisions": [
            {
                "revision": rev.revision,
                "application": app_to_dict(rev.application),
                "report": report_to_dict(rev.report) if rev.report else None,
            }
            for rev in case.revisions
        ],
        "decisions": [
            {
                "item_index": d.item_index,
                "action": d.action,
                "final_code": d.final_code.digits,
                "justification": d.justification,
                "officer_id": d.officer_id,
                "decided_at": d.decided_at,
                "revision": d.revision,
                "supersedes": d.supersedes,
                "rating": d.rating,
            }
            for d in case.decisions
        ],
        "audit_entries": len(case.audit),
    }

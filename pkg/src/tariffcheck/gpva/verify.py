"""Line-item verification against the knowledge base.

Each item is classified by the GIR engine and the result is cross-checked
against the claimed code and the exemption lists. Semantic analysis is
tiered: the cheap lexical matcher answers outright when its top score is
confident enough, otherwise the configured adapter re-ranks and the two
score sets merge by max-per-heading. Adapter faults degrade to the lexical
scores and never abort verification or leak into other items.
"""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

from tariffcheck.gir.engine import candidate_headings, classify
from tariffcheck.gir.model import CandidateScore, ClassificationResult, EngineConfig
from tariffcheck.gpva.adapters import SemanticAdapter, SynonymAdapter
from tariffcheck.gpva.explain import explain
from tariffcheck.gpva.model import Citation, Finding, FindingStatus, VerificationReport
from tariffcheck.intake.model import Application, LineItem
from tariffcheck.kb.model import KnowledgeBase, exemption_status


@dataclass(frozen=True)
class VerifierConfig:
    engine: EngineConfig = field(default_factory=EngineConfig)
    tau_tier: float = 0.6
    max_workers: int = 1
    adapter_concurrency: int = 4

    def __post_init__(self) -> None:
        if not 0 < self.tau_tier <= 1:
            raise ValueError(f"tau_tier must be in (0, 1], got {self.tau_tier}")
        if self.max_workers < 1 or self.adapter_concurrency < 1:
            raise ValueError("max_workers and adapter_concurrency must be >= 1")


_DEFAULT_ADAPTER = SynonymAdapter()


@dataclass(frozen=True)
class TieredRanking:
    """Which tier produced the candidate scores.

    Tier 0 is the lexical matcher alone; tier 1 merged in the semantic
    adapter. ``degraded`` records an adapter fault with lexical fallback.
    """

    scores: tuple[CandidateScore, ...]
    tier: int
    rationale: str | None = None
    degraded: bool = False


def tiered_rank(
    kb: KnowledgeBase,
    item: LineItem,
    lexical_scores: Sequence[CandidateScore],
    config: VerifierConfig | None = None,
    adapter: SemanticAdapter | None = None,
    adapter_gate: threading.Semaphore | None = None,
) -> TieredRanking:
    """Short-circuit on a confident lexical score, else merge the adapter."""
    cfg = config or VerifierConfig()
    chosen = adapter if adapter is not None else _DEFAULT_ADAPTER
    lexical = tuple(sorted(lexical_scores, key=lambda c: (-c.score, c.heading)))
    top = lexical[0].score if lexical else 0.0
    if top >= cfg.tau_tier:
        return TieredRanking(scores=lexical, tier=0)
    pool = [kb.headings[code] for code in sorted(kb.headings)]
    try:
        if adapter_gate is not None:
            with adapter_gate:
                ranking = chosen.rank(item.description, pool)
        else:
            ranking = chosen.rank(item.description, pool)
        _check_adapter_contract(ranking.scores, {h.code.digits for h in pool})
    except Exception:
        return TieredRanking(scores=lexical, tier=1, degraded=True)
    merged: dict[str, CandidateScore] = {c.heading: c for c in lexical}
    for cand in ranking.scores:
        existing = merged.get(cand.heading)
        if existing is None or cand.score > existing.score:
            merged[cand.heading] = cand
    ordered = tuple(sorted(merged.values(), key=lambda c: (-c.score, c.heading)))
    return TieredRanking(scores=ordered, tier=1, rationale=ranking.rationale)


def _check_adapter_contract(scores: Sequence[CandidateScore], allowed: set[str]) -> None:
    for cand in scores:
        if cand.heading not in allowed:
            raise ValueError(f"adapter returned heading {cand.heading!r} outside the candidate pool")
        if not 0.0 <= cand.score <= 1.0:
            raise ValueError(f"adapter score out of range: {cand.score}")


def verify_item(
    kb: KnowledgeBase,
    item: LineItem,
    config: VerifierConfig | None = None,
    adapter: SemanticAdapter | None = None,
    extraction_confidence: Mapping[str, float] | None = None,
    adapter_gate: threading.Semaphore | None = None,
) -> Finding:
    """Classify one item and judge the claimed code against the result."""
    cfg = config or VerifierConfig()
    lexical = candidate_headings(kb, item)
    tiered = tiered_rank(kb, item, lexical, cfg, adapter, adapter_gate)
    result = classify(kb, item, cfg.engine, candidate_scores=tiered.scores)

    tags: list[str] = []
    if tiered.tier == 1:
        tags.append("tier1")
    if tiered.degraded:
        tags.append("adapter_degraded")

    citations = _note_citations(kb, result)
    status, exemption_verdict = _decide_status(kb, item, result, tiered)
    if exemption_verdict is not None and exemption_verdict.list_id is not None:
        citations = citations + (
            Citation(
                note_id=exemption_verdict.list_id,
                excerpt=f"Exemption list entry for prefix {exemption_verdict.prefix}",
                citation_uri=kb.exemptions[exemption_verdict.list_id].source,
            ),
        )
        if exemption_verdict.verdict == "conditional":
            tags.append("exemption_evidence_incomplete")

    if (
        item.claimed_code is not None
        and result.code is not None
        and item.claimed_code.heading == result.code.heading
        and not _codes_compatible(item.claimed_code.digits, result.code.digits)
    ):
        tags.append("subheading_mismatch")

    finding = Finding(
        item_index=item.index,
        status=status,
        claimed_code=item.claimed_code,
        suggested=result,
        explanation="",
        citations=citations,
        confidence=result.confidence,
        exemption=exemption_verdict.verdict if exemption_verdict else None,
        tags=tuple(tags),
        extraction_confidence=(
            tuple(sorted(extraction_confidence.items())) if extraction_confidence else None
        ),
    )
    return replace(finding, explanation=explain(finding))


def _decide_status(kb, item, result: ClassificationResult, tiered: TieredRanking):
    if result.code is None:
        return FindingStatus.NEEDS_REVIEW, None
    if result.evidence_incomplete or result.needs_review or tiered.degraded:
        return FindingStatus.NEEDS_REVIEW, None
    if item.claimed_code is None:
        return FindingStatus.DISCREPANCY, None
    if item.claimed_code.heading != result.code.heading:
        return FindingStatus.DISCREPANCY, None
    verdict = exemption_status(kb, item.claimed_code, item.attributes)
    if verdict.verdict == "eligible":
        return FindingStatus.VERIFIED, verdict
    if verdict.verdict == "conditional":
        return FindingStatus.NEEDS_REVIEW, verdict
    return FindingStatus.INELIGIBLE, verdict


def _codes_compatible(claimed: str, suggested: str) -> bool:
    return claimed.startswith(suggested) or suggested.startswith(claimed)


def _note_citations(kb: KnowledgeBase, result: ClassificationResult) -> tuple[Citation, ...]:
    note_ids: list[str] = []
    for step in result.trace:
        note_ids.extend(step.cited_notes)
    notes = {note.id: note for note in kb.notes}
    citations = []
    for note_id in dict.fromkeys(note_ids):
        note = notes.get(note_id)
        if note is None:
            continue
        citations.append(
            Citation(note_id=note.id, excerpt=_excerpt(note.source_text), citation_uri=note.citation_uri)
        )
    return tuple(citations)


def _excerpt(text: str, limit: int = 240) -> str:
    return text if len(text) <= limit else text[: limit - 1].rstrip() + "…"


def verify_application(
    kb: KnowledgeBase,
    app: Application,
    config: VerifierConfig | None = None,
    adapter: SemanticAdapter | None = None,
    extraction: Mapping[int, Mapping[str, float]] | None = None,
) -> VerificationReport:
    """One finding per item, in index order; deterministic for a given
    (kb version, application) with the default adapter."""
    cfg = config or VerifierConfig()
    extraction = extraction or {}
    gate = threading.Semaphore(cfg.adapter_concurrency)

    def one(item: LineItem) -> Finding:
        return verify_item(kb, item, cfg, adapter, extraction.get(item.index), adapter_gate=gate)

    if cfg.max_workers > 1 and len(app.items) > 1:
        with ThreadPoolExecutor(max_workers=cfg.max_workers) as pool:
            findings = list(pool.map(one, app.items))
    else:
        findings = [one(item) for item in app.items]
    findings.sort(key=lambda f: f.item_index)
    return VerificationReport(
        app_id=app.app_id,
        revision=app.revision,
        kb_version=kb.version,
        findings=tuple(findings),
    )

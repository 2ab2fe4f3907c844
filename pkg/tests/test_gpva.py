"""Verification assistant: decision table, tiering, explanations."""

from __future__ import annotations

import pytest

from tariffcheck.gir.engine import candidate_headings
from tariffcheck.gpva.adapters import AdapterRanking, SynonymAdapter
from tariffcheck.gpva.model import FindingStatus
from tariffcheck.gpva.serialize import report_from_dict, report_to_dict, serialize_report
from tariffcheck.gpva.verify import VerifierConfig, tiered_rank, verify_application, verify_item
from tariffcheck.intake.model import Application, LineItem
from tariffcheck.intake.parse import parse_application
from tariffcheck.kb.hscode import HsCode
from tariffcheck.kb.loader import parse_kb


def line_item(description, attrs=None, claimed=None, index=1):
    return LineItem(
        index=index,
        description=description,
        attributes=attrs or {},
        claimed_code=HsCode.parse(claimed) if claimed else None,
    )


TOY = line_item(
    "Doraemon plastic figure (toy)",
    {"category": "toy", "material": "plastic"},
    claimed="3926.90.0000",
)
HANKY_65 = line_item(
    "Woven cotton handkerchief, size 65cm x 65cm",
    {"category": "handkerchief", "material": "cotton", "width_cm": 65, "height_cm": 65},
    claimed="6213.00.0000",
    index=2,
)


# --- verify_item decision table ---------------------------------------------------


def test_toy_discrepancy_with_citation(golden_kb):
    finding = verify_item(golden_kb, TOY)
    assert finding.status == FindingStatus.DISCREPANCY
    assert finding.suggested.code.heading == "9503"
    assert [c.note_id for c in finding.citations] == ["CH39-N2y"]
    assert "GIR 1" in finding.explanation
    assert "Note 2(y) to Chapter 39" in finding.explanation


def test_handkerchief_discrepancy(golden_kb):
    finding = verify_item(golden_kb, HANKY_65)
    assert finding.status == FindingStatus.DISCREPANCY
    assert finding.suggested.code.heading == "6214"
    assert [c.note_id for c in finding.citations] == ["CH62-N8"]


def test_agreement_plus_exemption_is_verified(golden_kb):
    item = line_item(
        "Doraemon plastic figure (toy)", {"category": "toy"}, claimed="9503.00.0000"
    )
    finding = verify_item(golden_kb, item)
    assert finding.status == FindingStatus.VERIFIED
    assert finding.exemption == "eligible"
    assert "MIDA-EL-2025" in finding.explanation


def test_agreement_without_exemption_is_ineligible(golden_kb):
    item = line_item(
        "Woven cotton handkerchief, size 60cm x 60cm",
        {"width_cm": 60, "height_cm": 60},
        claimed="6213.00.0000",
    )
    finding = verify_item(golden_kb, item)
    assert finding.status == FindingStatus.INELIGIBLE
    assert finding.exemption == "ineligible"


def test_missing_claimed_code_is_discrepancy(golden_kb):
    item = line_item("Doraemon plastic figure (toy)", {"category": "toy"})
    finding = verify_item(golden_kb, item)
    assert finding.status == FindingStatus.DISCREPANCY
    assert finding.claimed_code is None
    assert finding.suggested.code is not None
    assert "No HS code claimed" in finding.explanation


def test_undetermined_is_needs_review(golden_kb):
    finding = verify_item(golden_kb, line_item("zzqq xxyy"))
    assert finding.status == FindingStatus.NEEDS_REVIEW
    assert finding.confidence == 0.0


def test_missing_evidence_is_needs_review_and_lists_attrs(golden_kb):
    item = line_item(
        "Woven cotton handkerchief, oversized", {"material": "cotton"}, claimed="6213.00.0000"
    )
    finding = verify_item(golden_kb, item)
    assert finding.status == FindingStatus.NEEDS_REVIEW
    assert "any_side_cm" in finding.explanation


def test_gir5_review_marker_routes_to_needs_review(golden_kb):
    item = line_item(
        "Doraemon plastic figure (toy)",
        {"category": "toy", "packaging.kind": "steel drum", "packaging.reusable": "true"},
        claimed="9503.00.0000",
    )
    finding = verify_item(golden_kb, item)
    assert finding.status == FindingStatus.NEEDS_REVIEW


def test_subheading_mismatch_tagged_but_verified(golden_kb):
    item = line_item(
        "Doraemon plastic figure (toy)", {"category": "toy"}, claimed="9503.99.1111"
    )
    finding = verify_item(golden_kb, item)
    assert finding.status == FindingStatus.VERIFIED
    assert "subheading_mismatch" in finding.tags


def test_citation_completeness(golden_kb):
    finding = verify_item(golden_kb, TOY)
    cited_in_trace = {nid for step in finding.suggested.trace for nid in step.cited_notes}
    cited_in_finding = {c.note_id for c in finding.citations}
    assert cited_in_trace <= cited_in_finding


def test_conditional_exemption_needs_review():
    kb = parse_kb(
        """
version: "1"
headings:
  - code: "9503"
    terms: [toys]
exemptions:
  - id: "L1"
    source: "kb://l1"
    entries:
      - prefix: "9503"
        condition: "material = 'plastic'"
"""
    )
    item = line_item("toys", {"category": "toy"}, claimed="9503.00.0000")
    finding = verify_item(kb, item)
    assert finding.status == FindingStatus.NEEDS_REVIEW
    assert finding.exemption == "conditional"


# --- tiered ranking -----------------------------------------------------------------


class ExplodingAdapter:
    name = "exploding"
    deterministic = True

    def rank(self, description, candidates):
        raise RuntimeError("adapter down")


class OutOfContractAdapter:
    name = "rogue"
    deterministic = True

    def rank(self, description, candidates):
        from tariffcheck.gir.model import CandidateScore

        return AdapterRanking(scores=(CandidateScore("0101", 2.0, ()),), rationale="bad")


def test_tier0_short_circuit(golden_kb):
    item = line_item("woven cotton handkerchiefs")  # high lexical overlap with 6213
    lexical = candidate_headings(golden_kb, item)
    assert lexical[0].score >= 0.6
    ranking = tiered_rank(golden_kb, item, lexical)
    assert ranking.tier == 0
    assert ranking.scores == tuple(lexical)


def test_tier1_synonym_rescore(golden_kb):
    item = line_item("oversized hanky")
    lexical = candidate_headings(golden_kb, item)
    assert not lexical  # "hanky" matches no heading terms lexically
    ranking = tiered_rank(golden_kb, item, lexical)
    assert ranking.tier == 1
    assert not ranking.degraded
    # synonym table maps hanky -> handkerchief: 6213 gains a score of 1/2
    by_heading = {c.heading: c.score for c in ranking.scores}
    assert by_heading["6213"] == pytest.approx(0.5)
    assert "hanky->handkerchief" in ranking.rationale


def test_adapter_failure_falls_back(golden_kb):
    item = line_item("oversized hanky")
    ranking = tiered_rank(golden_kb, item, [], adapter=ExplodingAdapter())
    assert ranking.degraded
    assert ranking.scores == ()


def test_adapter_contract_violation_treated_as_failure(golden_kb):
    ranking = tiered_rank(golden_kb, line_item("oversized hanky"), [], adapter=OutOfContractAdapter())
    assert ranking.degraded


def test_tier_monotonicity(golden_kb):
    item = line_item("plastic hanky")
    lexical = candidate_headings(golden_kb, item)
    merged = tiered_rank(golden_kb, item, lexical)
    lex_scores = {c.heading: c.score for c in lexical}
    for cand in merged.scores:
        assert cand.score >= lex_scores.get(cand.heading, 0.0)


def test_adapter_failure_isolated_per_item(golden_kb, fig15_app):
    class FailOnHanky:
        name = "selective"
        deterministic = True

        def __init__(self):
            self.inner = SynonymAdapter()

        def rank(self, description, candidates):
            if "handkerchief" in description.lower():
                raise RuntimeError("boom")
            return self.inner.rank(description, candidates)

    baseline = verify_application(golden_kb, fig15_app)
    mixed = verify_application(golden_kb, fig15_app, adapter=FailOnHanky())
    # item 2's finding degrades to NeedsReview; item 1 is untouched
    assert mixed.findings[0] == baseline.findings[0]
    assert mixed.findings[1].status == FindingStatus.NEEDS_REVIEW


# --- verify_application ---------------------------------------------------------------


def test_fig15_report(golden_kb, fig15_app):
    report = verify_application(golden_kb, fig15_app)
    assert len(report.findings) == 2
    assert report.summary["Discrepancy"] == 2
    assert sum(report.summary.values()) == 2
    assert report.kb_version == golden_kb.version
    assert [f.item_index for f in report.findings] == [1, 2]


def test_report_deterministic_bytes(golden_kb, fig15_app):
    first = serialize_report(verify_application(golden_kb, fig15_app))
    second = serialize_report(verify_application(golden_kb, fig15_app))
    assert first == second


def test_report_parallel_matches_sequential(golden_kb, fig15_app):
    sequential = verify_application(golden_kb, fig15_app)
    parallel = verify_application(golden_kb, fig15_app, VerifierConfig(max_workers=4))
    assert serialize_report(sequential) == serialize_report(parallel)


def test_report_round_trips_through_dict(golden_kb, fig15_app):
    report = verify_application(golden_kb, fig15_app)
    assert report_from_dict(report_to_dict(report)) == report


def test_status_soundness(golden_kb, fig15_rev2_doc):
    app2 = parse_application(fig15_rev2_doc)
    report = verify_application(golden_kb, app2)
    for finding in report.findings:
        assert finding.status == FindingStatus.VERIFIED
        assert finding.claimed_code.heading == finding.suggested.code.heading
        assert finding.exemption == "eligible"


def test_extraction_confidence_carried(golden_kb):
    app = Application(
        app_id="X-1",
        revision=1,
        applicant="X",
        items=(line_item("toys", {"category": "toy"}, claimed="9503.00.0000"),),
        submitted_at="2025-01-01T00:00:00Z",
    )
    report = verify_application(
        golden_kb, app, extraction={1: {"description": 0.93, "claimed_code": 0.88}}
    )
    assert report.findings[0].extraction_confidence == (
        ("claimed_code", 0.88),
        ("description", 0.93),
    )

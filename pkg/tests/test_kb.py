"""Knowledge base loading, validation and queries."""

from __future__ import annotations

import pytest

from tariffcheck.kb.hscode import HsCode
from tariffcheck.kb.loader import KbFormatError, parse_kb
from tariffcheck.kb.model import exemption_status, kb_fingerprint, notes_for, KbQueryError

MINIMAL_KB = """
version: "1"
headings:
  - code: "9503"
    terms: [toys]
  - code: "3926"
    terms: [other articles of plastics]
notes:
  - id: "CH39-N2y"
    scope: "chapter:39"
    kind: exclusion
    condition: "category contains 'toy'"
    redirect: "9503"
    source_text: "Articles of Chapter 95 (toys) are excluded from Chapter 39."
    citation_uri: "kb://notes/ch39/2y"
"""


def test_parse_minimal_kb():
    kb = parse_kb(MINIMAL_KB)
    assert len(kb.headings) == 2
    assert len(kb.notes) == 1
    assert kb.version == "1"
    assert kb.notes[0].redirect == HsCode("9503")


def test_empty_headings_rejected():
    with pytest.raises(KbFormatError, match="no headings"):
        parse_kb('version: "1"\nheadings: []\n')


def test_dangling_redirect_rejected():
    doc = MINIMAL_KB.replace('redirect: "9503"', 'redirect: "9999"')
    with pytest.raises(KbFormatError, match="9999"):
        parse_kb(doc)


def test_duplicate_heading_rejected():
    doc = MINIMAL_KB.replace('- code: "3926"', '- code: "9503"')
    with pytest.raises(KbFormatError, match="duplicate heading"):
        parse_kb(doc)


def test_dsl_failure_reports_note_id_and_offset():
    doc = MINIMAL_KB.replace("category contains 'toy'", "category ~ 'toy'")
    with pytest.raises(KbFormatError) as exc:
        parse_kb(doc)
    assert "CH39-N2y" in str(exc.value)
    assert "offset" in str(exc.value)


def test_syntax_error_reports_position():
    with pytest.raises(KbFormatError, match="line"):
        parse_kb("version: [unclosed\n  - broken")


def test_exclusion_without_redirect_needs_explicit_mark():
    doc = MINIMAL_KB.replace('redirect: "9503"', "undetermined: true")
    kb = parse_kb(doc)
    assert kb.notes[0].redirect is None
    bad = MINIMAL_KB.replace('    redirect: "9503"\n', "")
    with pytest.raises(KbFormatError, match="undetermined"):
        parse_kb(bad)


def test_more_than_one_residual_per_sibling_group_rejected():
    doc = """
version: "1"
headings:
  - code: "9503"
    terms: [toys]
    subheadings:
      - {code: "950310", terms: [dolls], level: 1, is_residual: true}
      - {code: "950390", terms: [other], level: 1, is_residual: true}
"""
    with pytest.raises(KbFormatError, match="residual"):
        parse_kb(doc)


def test_nested_subheading_requires_parent():
    doc = """
version: "1"
headings:
  - code: "9503"
    terms: [toys]
    subheadings:
      - {code: "95031010", terms: [of wood], level: 2}
"""
    with pytest.raises(KbFormatError, match="parent"):
        parse_kb(doc)


def test_level_must_match_code_length():
    doc = """
version: "1"
headings:
  - code: "9503"
    terms: [toys]
    subheadings:
      - {code: "950310", terms: [dolls], level: 2}
"""
    with pytest.raises(KbFormatError, match="level"):
        parse_kb(doc)


def test_unsupported_format_tag():
    with pytest.raises(KbFormatError, match="format"):
        parse_kb(MINIMAL_KB, format_tag="toml")


# --- notes_for -----------------------------------------------------------------


def test_notes_for_golden_heading(golden_kb):
    notes = notes_for(golden_kb, "3926")
    assert [n.id for n in notes] == ["CH39-N2y"]


def test_notes_for_heading_without_notes(golden_kb):
    assert notes_for(golden_kb, "9503") == []


def test_notes_for_unknown_heading(golden_kb):
    with pytest.raises(KbQueryError):
        notes_for(golden_kb, "8712")


def test_section_notes_precede_chapter_notes():
    doc = """
version: "1"
headings:
  - code: "6214"
    terms: [shawls]
notes:
  - id: "CH62-N8"
    scope: "chapter:62"
    kind: definition
    condition: "any_side_cm > 60"
    source_text: "chapter note"
    citation_uri: "kb://c"
  - id: "SXI-N1"
    scope: "section:50-63"
    kind: definition
    condition: "material = 'textile'"
    source_text: "section note"
    citation_uri: "kb://s"
"""
    kb = parse_kb(doc)
    assert [n.id for n in notes_for(kb, "6214")] == ["SXI-N1", "CH62-N8"]
    # stable id order within scope
    assert notes_for(kb, "62")[0].scope_kind == "section"


# --- exemption_status -----------------------------------------------------------


def test_exemption_prefix_containment(golden_kb):
    status = exemption_status(golden_kb, HsCode("950300"), {})
    assert status.verdict == "eligible"
    assert status.list_id == "MIDA-EL-2025"


def test_exemption_no_prefix_match(golden_kb):
    assert exemption_status(golden_kb, HsCode("6213"), {}).verdict == "ineligible"


def test_exemption_conditional_entry_eligible_via_condition():
    doc = """
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
    kb = parse_kb(doc)
    assert exemption_status(kb, HsCode("950300"), {"material": "plastic"}).verdict == "eligible"
    assert exemption_status(kb, HsCode("950300"), {"material": "steel"}).verdict == "ineligible"
    assert exemption_status(kb, HsCode("950300"), {}).verdict == "conditional"


def test_exemption_longest_prefix_wins():
    doc = """
version: "1"
headings:
  - code: "9503"
    terms: [toys]
exemptions:
  - id: "L1"
    source: "kb://l1"
    entries:
      - prefix: "9503"
      - prefix: "950390"
        condition: "material = 'metal'"
"""
    kb = parse_kb(doc)
    # 6-digit entry's verdict is used even though the 4-digit entry would be eligible
    assert exemption_status(kb, HsCode("95039000"), {"material": "plastic"}).verdict == "ineligible"
    assert exemption_status(kb, HsCode("95039000"), {"material": "metal"}).verdict == "eligible"
    assert exemption_status(kb, HsCode("950300"), {}).verdict == "eligible"


def test_duplicate_prefix_rejected():
    doc = """
version: "1"
headings:
  - code: "9503"
    terms: [toys]
exemptions:
  - id: "L1"
    source: "kb://l1"
    entries:
      - prefix: "9503"
      - prefix: "9503"
"""
    with pytest.raises(KbFormatError, match="duplicate prefix"):
        parse_kb(doc)


# --- snapshot immutability -------------------------------------------------------


def test_reload_never_mutates_previous_snapshot(golden_kb_bytes):
    first = parse_kb(golden_kb_bytes)
    before = kb_fingerprint(first)
    second = parse_kb(golden_kb_bytes.replace(b'version: "2025.01"', b'version: "2025.02"'))
    assert second.version == "2025.02"
    assert kb_fingerprint(first) == before
    with pytest.raises(TypeError):
        first.headings["0000"] = None  # mapping proxy is read-only

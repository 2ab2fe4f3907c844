"""Application parsing, rendering and validation."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tariffcheck.intake.adapter import PassThroughExtractor
from tariffcheck.intake.model import Application, LineItem
from tariffcheck.intake.parse import (
    ApplicationParseError,
    normalize_hs,
    parse_application,
    render_application,
    validate_items,
)
from tariffcheck.kb.hscode import HsCode, HsCodeError


def test_normalize_claimed_code_form():
    assert normalize_hs("3926.90.0000").digits == "3926900000"
    assert normalize_hs("3926.90.0000").heading == "3926"


def test_normalize_heading_form():
    assert normalize_hs("62.14").digits == "6214"


def test_normalize_rejects_letters():
    with pytest.raises(HsCodeError):
        normalize_hs("ABC123")


def test_normalize_idempotent():
    code = normalize_hs("9503.00.00 00")
    assert normalize_hs(code.digits) == code
    assert normalize_hs(code.display()) == code


def test_parse_fig15_document(fig15_app):
    assert fig15_app.app_id == "FDI-2025-0001"
    assert fig15_app.revision == 1
    assert len(fig15_app.items) == 2
    toy = fig15_app.items[0]
    assert toy.description == "Doraemon plastic figure (toy)"
    assert toy.claimed_code == HsCode("3926900000")
    assert toy.attributes["category"] == "toy"
    hanky = fig15_app.items[1]
    assert hanky.attributes["width_cm"] == 65
    assert hanky.attributes["height_cm"] == 65


def test_missing_description_collected_not_fail_fast(fig15_doc):
    doc = fig15_doc.decode().replace("description = Doraemon plastic figure (toy)\n", "")
    with pytest.raises(ApplicationParseError) as exc:
        parse_application(doc)
    problems = exc.value.problems
    assert len(problems) == 1
    assert problems[0].index == 1
    assert problems[0].field == "description"
    # the other item still parsed
    assert [item.index for item in exc.value.parsed_items] == [2]


def test_duplicate_index_is_document_error(fig15_doc):
    doc = fig15_doc.decode().replace("index = 2", "index = 1")
    with pytest.raises(ApplicationParseError, match="duplicate item indices"):
        parse_application(doc)


def test_zero_items_rejected():
    with pytest.raises(ApplicationParseError, match="zero items"):
        parse_application(
            "app_id = A-1\napplicant = X\nrevision = 1\nsubmitted_at = 2025-01-01T00:00:00Z\n"
        )


def test_unreadable_document_rejected():
    with pytest.raises(ApplicationParseError, match="unreadable"):
        parse_application(b"\xff\xfe\x00bad")


def test_bad_claimed_code_is_item_problem(fig15_doc):
    doc = fig15_doc.decode().replace("claimed_code = 3926.90.0000", "claimed_code = 39XX")
    with pytest.raises(ApplicationParseError) as exc:
        parse_application(doc)
    assert any(p.field == "claimed_code" and p.index == 1 for p in exc.value.problems)


def test_list_attribute_parsing():
    doc = """
app_id = A-1
applicant = X
revision = 1
submitted_at = 2025-01-01T00:00:00Z

[item]
index = 1
description = composite housing
quantity = 1
value = 10
attr.materials = plastic, steel
attr.note = 'one, single string'
"""
    app = parse_application(doc)
    assert app.items[0].attributes["materials"] == ("plastic", "steel")
    assert app.items[0].attributes["note"] == "one, single string"


# --- validate_items --------------------------------------------------------------


def test_validate_clean_fig15_items(fig15_app):
    assert validate_items(fig15_app) == []


def _one_item_app(**overrides):
    fields = dict(index=1, description="widget", quantity=1.0, declared_value=10.0)
    fields.update(overrides)
    return Application(
        app_id="A-1",
        revision=1,
        applicant="X",
        items=(LineItem(**fields),),
        submitted_at="2025-01-01T00:00:00Z",
    )


def test_validate_missing_claimed_code():
    findings = validate_items(_one_item_app(claimed_code=None))
    assert any(f.field == "claimed_code" and f.index == 1 for f in findings)


def test_validate_non_positive_value():
    findings = validate_items(_one_item_app(declared_value=-5.0))
    assert any(f.field == "value" and "non-positive" in f.message for f in findings)


def test_validate_order_insensitive(fig15_app):
    reversed_app = Application(
        app_id=fig15_app.app_id,
        revision=fig15_app.revision,
        applicant=fig15_app.applicant,
        items=tuple(
            LineItem(
                index=i + 1,
                description=item.description,
                attributes=dict(item.attributes),
                claimed_code=None,
                quantity=item.quantity,
                declared_value=item.declared_value,
                currency=item.currency,
            )
            for i, item in enumerate(reversed(fig15_app.items))
        ),
        submitted_at=fig15_app.submitted_at,
    )
    findings = validate_items(reversed_app)
    assert {f.index for f in findings} == {1, 2}


# --- round trip -------------------------------------------------------------------

_WORDS = st.text(alphabet="abcdefghij xyz", min_size=1, max_size=20).map(str.strip).filter(bool)
_ATTR_KEYS = st.sampled_from(
    ["material", "category", "width_cm", "height_cm", "assembly_state", "packaging.kind", "origin"]
)
_ATTR_VALUES = st.one_of(
    _WORDS,
    st.integers(-1000, 1000),
    st.integers(-4000, 4000).map(lambda n: n / 4),
    st.lists(_WORDS, min_size=2, max_size=3).map(tuple),
)


@st.composite
def applications(draw):
    n = draw(st.integers(min_value=1, max_value=4))
    items = []
    for i in range(1, n + 1):
        items.append(
            LineItem(
                index=i,
                description=draw(_WORDS),
                attributes=draw(st.dictionaries(_ATTR_KEYS, _ATTR_VALUES, max_size=4)),
                claimed_code=draw(
                    st.one_of(st.none(), st.sampled_from([HsCode("9503"), HsCode("3926900000")]))
                ),
                quantity=float(draw(st.integers(0, 10_000))),
                declared_value=float(draw(st.integers(0, 10_000))),
                currency=draw(st.sampled_from(["MYR", "USD"])),
            )
        )
    return Application(
        app_id="RT-" + str(draw(st.integers(1, 999))),
        revision=draw(st.integers(1, 5)),
        applicant=draw(_WORDS),
        items=tuple(items),
        submitted_at="2025-03-02T04:15:00Z",
    )


@given(applications())
@settings(max_examples=200)
def test_parse_render_round_trip(app):
    assert parse_application(render_application(app)) == app


def test_passthrough_extractor_confidence(fig15_doc):
    result = PassThroughExtractor().extract(fig15_doc)
    assert result.application.app_id == "FDI-2025-0001"
    assert result.field_confidence[1]["description"] == 1.0
    assert result.field_confidence[2]["attr.width_cm"] == 1.0


def test_extractor_rejects_invalid_items_with_field_report(fig15_doc):
    broken = fig15_doc.decode().replace("description = Doraemon plastic figure (toy)\n", "")
    with pytest.raises(ApplicationParseError) as exc:
        PassThroughExtractor().extract(broken.encode())
    assert exc.value.problems[0].field == "description"

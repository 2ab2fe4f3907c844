"""Condition DSL: parsing, rendering, and truth-table oracle equivalence.

The oracle below re-implements evaluation from the documented semantics as
a plain recursive walk, independent of the production evaluator.
"""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tariffcheck.kb.conditions import (
    AllOf,
    AnyOf,
    AnySide,
    Compare,
    ConditionSyntaxError,
    HasCategory,
    Not,
    eval_condition,
    parse_condition,
    render_condition,
)

# --- parsing -----------------------------------------------------------------


def test_parse_any_side():
    assert parse_condition("any_side_cm > 60") == AnySide(">", 60, "cm")


def test_parse_category_contains():
    assert parse_condition("category contains 'toy'") == HasCategory("toy")


def test_parse_all_with_two_clauses():
    cond = parse_condition("all(material = 'cotton', any_side_cm > 60)")
    assert cond == AllOf((Compare("material", "=", "cotton"), AnySide(">", 60, "cm")))


def test_parse_infix_and_or_not():
    cond = parse_condition("material = 'cotton' and not category contains 'toy' or weight_kg <= 2")
    assert isinstance(cond, AnyOf)
    assert isinstance(cond.children[0], AllOf)
    assert cond.children[0].children[1] == Not(HasCategory("toy"))
    assert cond.children[1] == Compare("weight_kg", "<=", 2)


def test_parse_unicode_operators_normalized():
    assert parse_condition("width_cm ≥ 10") == Compare("width_cm", ">=", 10)
    assert parse_condition("material ≠ 'pvc'") == Compare("material", "!=", "pvc")


def test_unknown_operator_rejected():
    with pytest.raises(ConditionSyntaxError):
        parse_condition("material ~ 'cotton'")


def test_unbalanced_parentheses_rejected():
    with pytest.raises(ConditionSyntaxError):
        parse_condition("(material = 'cotton'")
    with pytest.raises(ConditionSyntaxError):
        parse_condition("all(material = 'cotton', any_side_cm > 60")


def test_bad_number_literal_rejected():
    with pytest.raises(ConditionSyntaxError):
        parse_condition("any_side_cm > sixty")


def test_offset_reported():
    with pytest.raises(ConditionSyntaxError) as exc:
        parse_condition("material = ")
    assert exc.value.offset == len("material = ")


# --- evaluation: spec-anchored cases ------------------------------------------


def test_any_side_over_threshold_true():
    result = eval_condition(AnySide(">", 60, "cm"), {"width_cm": 65, "height_cm": 65})
    assert result.value is True
    assert not result.evidence_incomplete


def test_any_side_under_threshold_false():
    result = eval_condition(AnySide(">", 60, "cm"), {"width_cm": 50, "height_cm": 50})
    assert result.value is False
    assert not result.evidence_incomplete


def test_any_side_boundary_not_strictly_greater():
    result = eval_condition(AnySide(">", 60, "cm"), {"width_cm": 60, "height_cm": 60})
    assert result.value is False


def test_any_side_missing_dimensions_is_incomplete_false():
    result = eval_condition(AnySide(">", 60, "cm"), {"material": "cotton"})
    assert result.value is False
    assert result.evidence_incomplete
    assert "any_side_cm" in result.missing_attrs


def test_conjunction_truth_table_by_hand():
    # all(material = 'cotton', any_side_cm > 60) over the four hand-built rows
    cond = parse_condition("all(material = 'cotton', any_side_cm > 60)")
    table = [
        ({"material": "cotton", "width_cm": 65}, True),
        ({"material": "cotton", "width_cm": 50}, False),
        ({"material": "silk", "width_cm": 65}, False),
        ({"material": "silk", "width_cm": 50}, False),
    ]
    for attrs, expected in table:
        assert eval_condition(cond, attrs).value is expected, attrs


def test_all_combinator_matches_conjunction_truth_table():
    a = Compare("a", "=", 1)
    b = Compare("b", "=", 1)
    for a_val in (0, 1):
        for b_val in (0, 1):
            result = eval_condition(AllOf((a, b)), {"a": a_val, "b": b_val})
            assert result.value is (a_val == 1 and b_val == 1)


def test_matched_clauses_lists_true_leaves():
    cond = parse_condition("all(material = 'cotton', any_side_cm > 60)")
    result = eval_condition(cond, {"material": "cotton", "width_cm": 65})
    assert "material = 'cotton'" in result.matched_clauses
    assert "any_side_cm > 60" in result.matched_clauses


def test_category_tags_are_tokenized_not_substrings():
    cond = HasCategory("toy")
    assert eval_condition(cond, {"category": "plastic toy"}).value is True
    assert eval_condition(cond, {"category": "toyota"}).value is False
    assert eval_condition(cond, {"category": ("toy", "collectible")}).value is True


def test_eval_is_pure():
    cond = parse_condition("any(material = 'cotton', weight_kg < 2)")
    attrs = {"material": "COTTON"}
    assert eval_condition(cond, attrs) == eval_condition(cond, attrs)


# --- generated ASTs ------------------------------------------------------------

_STRINGS = st.text(alphabet="abcdefgxyz ", min_size=1, max_size=8).map(str.strip).filter(bool)
_ATTR_NAMES = st.sampled_from(["material", "origin", "grade", "category", "weight_kg"])
_NUMBERS = st.one_of(st.integers(-999, 999), st.integers(-400, 400).map(lambda n: n / 4))
_CMP_OPS = st.sampled_from(["=", "!=", "<", "<=", ">", ">=", "contains"])
_BOUND_OPS = st.sampled_from(["=", "!=", "<", "<=", ">", ">="])

_LEAVES = st.one_of(
    # "category contains '<str>'" is canonically HasCategory, so the
    # generator never emits that spelling as a Compare.
    st.builds(
        Compare, attr_path=_ATTR_NAMES, op=_CMP_OPS, literal=st.one_of(_STRINGS, _NUMBERS)
    ).filter(
        lambda c: not (c.attr_path == "category" and c.op == "contains" and isinstance(c.literal, str))
    ),
    st.builds(AnySide, op=_BOUND_OPS, threshold=_NUMBERS, unit=st.sampled_from(["cm", "mm", "kg"])),
    st.builds(HasCategory, category=_STRINGS),
)


def _conditions(depth: int):
    if depth <= 1:
        return _LEAVES
    inner = _conditions(depth - 1)
    return st.one_of(
        _LEAVES,
        st.builds(lambda cs: AllOf(tuple(cs)), st.lists(inner, min_size=1, max_size=3)),
        st.builds(lambda cs: AnyOf(tuple(cs)), st.lists(inner, min_size=1, max_size=3)),
        st.builds(Not, inner),
    )


CONDITIONS = _conditions(5)

ATTR_MAPS = st.dictionaries(
    keys=st.sampled_from(
        ["material", "origin", "grade", "category", "weight_kg", "width_cm", "height_cm", "depth_mm"]
    ),
    values=st.one_of(_STRINGS, _NUMBERS, st.lists(_STRINGS, max_size=3).map(tuple)),
    max_size=6,
)


@given(CONDITIONS)
@settings(max_examples=300)
def test_parse_render_round_trip(cond):
    assert parse_condition(render_condition(cond)) == cond


# --- independent oracle ---------------------------------------------------------


def oracle_eval(cond, attrs):
    """Three-valued reference evaluation; returns (bool, missing_attr_names)."""
    missing: list[str] = []

    def as_num(v):
        if isinstance(v, bool):
            return None
        if isinstance(v, (int, float)):
            return float(v)
        if isinstance(v, str):
            try:
                return float(v)
            except ValueError:
                return None
        return None

    def num_cmp(value, op, bound):
        return {
            "=": value == bound,
            "!=": value != bound,
            "<": value < bound,
            "<=": value <= bound,
            ">": value > bound,
            ">=": value >= bound,
        }.get(op, False)

    def walk(node):
        if isinstance(node, Compare):
            if node.attr_path not in attrs:
                missing.append(node.attr_path)
                return None
            value, literal = attrs[node.attr_path], node.literal
            if node.op == "contains":
                if isinstance(value, (list, tuple)):
                    return any(str(v).strip().lower() == str(literal).strip().lower() for v in value)
                return str(literal).lower() in str(value).lower()
            vn, ln = as_num(value), as_num(literal)
            if node.op in ("<", "<=", ">", ">="):
                if vn is None or ln is None:
                    return False
                return num_cmp(vn, node.op, ln)
            if vn is not None and ln is not None:
                equal = vn == ln
            elif isinstance(value, (list, tuple)):
                equal = any(str(v).strip().lower() == str(literal).strip().lower() for v in value)
            else:
                equal = str(value).strip().lower() == str(literal).strip().lower()
            return equal if node.op == "=" else not equal
        if isinstance(node, AnySide):
            sides = []
            for key in attrs:
                if key.split(".")[-1].endswith("_" + node.unit):
                    num = as_num(attrs[key])
                    if num is not None:
                        sides.append(num)
            if not sides:
                missing.append("any_side_" + node.unit)
                return None
            return any(num_cmp(v, node.op, float(node.threshold)) for v in sides)
        if isinstance(node, HasCategory):
            if "category" not in attrs:
                missing.append("category")
                return None
            value = attrs["category"]
            if isinstance(value, (list, tuple)):
                tags = {str(v).strip().lower() for v in value}
            else:
                import re

                tags = {t for t in re.split(r"[,;\s]+", str(value).strip().lower()) if t}
            return node.category.lower() in tags
        if isinstance(node, AllOf):
            results = [walk(c) for c in node.children]
            if any(r is False for r in results):
                return False
            return None if any(r is None for r in results) else True
        if isinstance(node, AnyOf):
            results = [walk(c) for c in node.children]
            if any(r is True for r in results):
                return True
            return None if any(r is None for r in results) else False
        if isinstance(node, Not):
            inner = walk(node.child)
            return None if inner is None else not inner
        raise AssertionError(node)

    verdict = walk(cond)
    return bool(verdict), missing


@given(CONDITIONS, ATTR_MAPS)
@settings(max_examples=1000, deadline=None)
def test_eval_matches_oracle(cond, attrs):
    result = eval_condition(cond, attrs)
    expected_value, expected_missing = oracle_eval(cond, attrs)
    assert result.value == expected_value
    assert result.evidence_incomplete == bool(expected_missing)
    assert set(result.missing_attrs) == set(expected_missing)

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tariffcheck.kb.hscode import HsCode, HsCodeError


def test_normalizes_dotted_code():
    code = HsCode.parse("3926.90.0000")
    assert code.digits == "3926900000"
    assert code.chapter == "39"
    assert code.heading == "3926"
    assert code.subheading == "392690"
    assert code.national_suffix == "0000"


def test_normalizes_heading_with_dot():
    code = HsCode.parse("62.14")
    assert code.digits == "6214"
    assert code.heading == "6214"
    assert code.subheading is None
    assert code.national_suffix is None


def test_rejects_non_digits():
    with pytest.raises(HsCodeError):
        HsCode.parse("ABC123")


@pytest.mark.parametrize("bad", ["12", "12345", "1234567", "123456789", "12345678901"])
def test_rejects_bad_lengths(bad):
    with pytest.raises(HsCodeError):
        HsCode.parse(bad)


def test_rejects_unicode_digits():
    with pytest.raises(HsCodeError):
        HsCode.parse("٣٩٢٦")


@pytest.mark.parametrize("text", ["9503", "950300", "95030012", "9503001234"])
def test_accepts_valid_lengths(text):
    assert HsCode.parse(text).digits == text


def test_display_forms():
    assert HsCode("6214").display() == "62.14"
    assert HsCode("621400").display() == "6214.00"
    assert HsCode("3926900000").display() == "3926.90.0000"


@given(st.sampled_from([4, 6, 8, 10]), st.integers(min_value=0))
def test_accessors_never_disagree_with_digits(length, seed):
    digits = str(seed * 7919)[:length].ljust(length, "0")
    code = HsCode(digits)
    assert code.chapter == digits[:2]
    assert code.heading == digits[:4]
    if length >= 6:
        assert code.subheading == digits[:6]
    # round-trip through the display form
    assert HsCode.parse(code.display()) == code

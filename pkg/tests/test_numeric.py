from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from stepcompress.numeric import (
    answers_match,
    collapse_whitespace,
    extract_answer_text,
    format_fixed,
    parse_rational,
    serialize_rational,
)


@pytest.mark.parametrize(
    "value,expected",
    [
        (Fraction(1, 3), "0.333333"),
        (Fraction(2, 3), "0.666667"),
        (Fraction(3, 4), "0.750000"),
        (Fraction(1), "1.000000"),
        (Fraction(0), "0.000000"),
        (Fraction(-1, 3), "-0.333333"),
        # ties round to even in the last kept digit
        (Fraction(1, 2000000), "0.000000"),
        (Fraction(3, 2000000), "0.000002"),
        (Fraction(-1, 2000000), "0.000000"),
        (Fraction(5, 2), "2.500000"),
    ],
)
def test_format_fixed_golden(value, expected):
    assert format_fixed(value) == expected


def test_format_fixed_zero_digits():
    assert format_fixed(Fraction(5, 2), digits=0) == "2"  # tie to even
    assert format_fixed(Fraction(7, 2), digits=0) == "4"
    assert format_fixed(Fraction(-3, 2), digits=0) == "-2"


@given(st.fractions(min_value=-1000, max_value=1000))
def test_format_fixed_matches_decimal_module(value):
    import decimal

    with decimal.localcontext() as context:
        context.rounding = decimal.ROUND_HALF_EVEN
        quantized = (
            decimal.Decimal(value.numerator) / decimal.Decimal(value.denominator)
        ).quantize(decimal.Decimal("0.000001"))
    expected = f"{quantized:.6f}"
    if expected == "-0.000000":
        expected = "0.000000"
    assert format_fixed(value) == expected


@pytest.mark.parametrize(
    "value,expected",
    [
        (Fraction(3, 4), "3/4"),
        (Fraction(-3, 4), "-3/4"),
        (Fraction(14), "14"),
        (Fraction(0), "0"),
        (Fraction(8, 6), "4/3"),
    ],
)
def test_serialize_rational(value, expected):
    assert serialize_rational(value) == expected


@pytest.mark.parametrize(
    "text,expected",
    [
        ("14", Fraction(14)),
        ("+7", Fraction(7)),
        ("-7", Fraction(-7)),
        ("1.50", Fraction(3, 2)),
        ("23/4", Fraction(23, 4)),
        ("  2 / 8 ", Fraction(1, 4)),
        (".5", Fraction(1, 2)),
        ("3/0", None),
        ("x = 14", None),
        ("", None),
        ("1/2/3", None),
        ("abc", None),
    ],
)
def test_parse_rational(text, expected):
    assert parse_rational(text) == expected


@given(st.fractions(min_value=-10**6, max_value=10**6))
def test_parse_serialize_round_trip(value):
    assert parse_rational(serialize_rational(value)) == value


def test_collapse_whitespace():
    assert collapse_whitespace("  a \t b\n\nc ") == "a b c"


@pytest.mark.parametrize(
    "text,expected",
    [
        ("The answer is \\boxed{23/4}.", "23/4"),
        ("first \\boxed{1} then \\boxed{2}", "2"),
        ("\\boxed{\\frac{1}{2}}", "\\frac{1}{2}"),
        ("nested \\boxed{a{b}c}", "a{b}c"),
        ("unbalanced \\boxed{oops and then 42", "42"),
        ("x = 14 meters", "14"),
        ("about 3.5 or so", "3.5"),
        ("the ratio 23/4 wins", "23/4"),
        ("no numbers here", "no numbers here"),
    ],
)
def test_extract_answer_text(text, expected):
    assert extract_answer_text(text) == expected


@pytest.mark.parametrize(
    "candidate,reference,expected",
    [
        ("\\boxed{23/4}", "23/4", True),
        ("1.50", "3/2", True),
        ("14", "11", False),
        ("x = 14 meters", "14", True),
        ("+7", "7", True),
        ("abc", "abc", True),
        ("abc", "ABC", False),
        ("  abc   def ", "abc def", True),
        ("0.333333", "1/3", False),  # decimals compare exactly, not rounded
    ],
)
def test_answers_match(candidate, reference, expected):
    assert answers_match(candidate, reference) is expected

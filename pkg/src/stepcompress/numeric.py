"""Exact rational helpers shared across the package.

All intermediate arithmetic is done on `fractions.Fraction`; floats only
appear at the serialization boundary, where values are rendered as decimal
strings with a fixed number of fractional digits (round half to even).
"""

from __future__ import annotations

import re
from fractions import Fraction

Q_DIGITS = 6

_RATIONAL_RE = re.compile(
    r"^[+-]?(?:\d+(?:\.\d+)?|\.\d+)(?:\s*/\s*[+-]?\d+(?:\.\d+)?)?$"
)


def format_fixed(value: Fraction | int, digits: int = Q_DIGITS) -> str:
    """Render an exact rational as a decimal string with `digits` fractional
    digits, rounding half to even. No float passes through."""
    frac = Fraction(value)
    scale = 10**digits
    scaled = frac * scale
    whole, rem = divmod(scaled.numerator, scaled.denominator)
    # divmod floors, so `whole` is the floor of the scaled value and rem >= 0
    double_rem = 2 * rem
    if double_rem > scaled.denominator:
        whole += 1
    elif double_rem == scaled.denominator and whole % 2 != 0:
        whole += 1
    sign = "-" if whole < 0 else ""
    whole = abs(whole)
    int_part, frac_part = divmod(whole, scale)
    if digits == 0:
        return f"{sign}{int_part}"
    return f"{sign}{int_part}.{frac_part:0{digits}d}"


def serialize_rational(value: Fraction) -> str:
    """Lowest-terms `p/q` form; plain integer string when q == 1."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text: str) -> Fraction | None:
    """Parse an integer, decimal, or p/q string into an exact Fraction.

    Leading `+` is accepted; anything that does not look like a plain
    rational returns None instead of raising.
    """
    stripped = text.strip()
    if not stripped or not _RATIONAL_RE.match(stripped):
        return None
    if stripped.startswith("+"):
        stripped = stripped[1:]
    try:
        if "/" in stripped:
            num_text, den_text = stripped.split("/", 1)
            denominator = Fraction(den_text.strip())
            if denominator == 0:
                return None
            return Fraction(num_text.strip()) / denominator
        return Fraction(stripped)
    except (ValueError, ZeroDivisionError):
        return None


def collapse_whitespace(text: str) -> str:
    """Trim and collapse every internal whitespace run to one space."""
    return " ".join(text.split())


_NUMBER_TOKEN_RE = re.compile(
    r"[+-]?(?:\d+(?:\.\d+)?|\.\d+)(?:\s*/\s*\d+(?:\.\d+)?)?"
)


def _last_boxed(text: str) -> str | None:
    start = text.rfind("\\boxed{")
    if start < 0:
        return None
    depth = 0
    for position in range(start + len("\\boxed"), len(text)):
        char = text[position]
        if char == "{":
            depth += 1
        elif char == "}":
            depth -= 1
            if depth == 0:
                return text[start + len("\\boxed{") : position]
    return None  # unbalanced braces: fall back to number scan


def extract_answer_text(text: str) -> str:
    """Pull the answer out of free-form solution text.

    The content of the last balanced `\\boxed{...}` wins; failing that, the
    last number-looking token (integer, decimal, or p/q); failing that, the
    whitespace-collapsed text itself."""
    boxed = _last_boxed(text)
    if boxed is not None:
        return collapse_whitespace(boxed)
    numbers = _NUMBER_TOKEN_RE.findall(text)
    if numbers:
        return collapse_whitespace(numbers[-1])
    return collapse_whitespace(text)


def answers_match(candidate: str, reference: str) -> bool:
    """Compare two extracted answers: exact rational equality when both
    parse as rationals, otherwise case-sensitive string equality after
    whitespace collapsing."""
    left = extract_answer_text(candidate)
    right = extract_answer_text(reference)
    left_value = parse_rational(left)
    right_value = parse_rational(right)
    if left_value is not None and right_value is not None:
        return left_value == right_value
    return left == right

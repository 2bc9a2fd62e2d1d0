import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stepcompress.parser import (
    ParseError,
    Token,
    TokenKind,
    parse_block,
    pretty_print,
    tokenize,
)
from stepcompress.normalize import serialize_block

from progen import random_syntactic_solution


def test_tokenize_positions():
    tokens = tokenize("x = 1\ny = x + 2  # note\n")
    assert tokens[0] == Token(TokenKind.IDENT, "x", 1, 1)
    assert tokens[1] == Token(TokenKind.OP, "=", 1, 3)
    assert tokens[2] == Token(TokenKind.NUMBER, "1", 1, 5)
    assert tokens[3].kind is TokenKind.NEWLINE
    comment = [t for t in tokens if t.kind is TokenKind.COMMENT][0]
    assert comment.lexeme == "# note"
    assert (comment.line, comment.column) == (2, 12)


def test_tokenize_two_char_operators():
    lexemes = [t.lexeme for t in tokenize("a ** b // c <= d != e")
               if t.kind is TokenKind.OP]
    assert lexemes == ["**", "//", "<=", "!="]


def test_tokenize_illegal_character():
    with pytest.raises(ParseError) as info:
        tokenize("x = 1 @ 2")
    assert info.value.line == 1
    assert info.value.column == 7


@pytest.mark.parametrize("source,expected", [
    # unary minus binds tighter than division
    ("s = -b / a", "assign(s, div(neg(b), a))"),
    ("s = -(b / a)", "assign(s, neg(div(b, a)))"),
    # power is right associative and binds tighter than unary minus
    ("y = -x ** 2", "assign(y, neg(pow(x, 2)))"),
    ("y = 2 ** 3 ** 2", "assign(y, pow(2, pow(3, 2)))"),
    ("y = (2 ** 3) ** 2", "assign(y, pow(pow(2, 3), 2))"),
    # left associativity of same-level operators
    ("y = a - b - c", "assign(y, sub(sub(a, b), c))"),
    ("y = a / b / c", "assign(y, div(div(a, b), c))"),
    # mul binds tighter than add
    ("y = a + b * c", "assign(y, add(a, mul(b, c)))"),
    # decimals become exact rationals
    ("y = 0.25", "assign(y, 1/4)"),
    ("y = 1.50", "assign(y, 3/2)"),
    # calls and attributes
    ("y = math.sqrt(x)", "assign(y, call(attr(math, sqrt), x))"),
    ("y = f(a, b)", "assign(y, call(f, a, b))"),
    # comparisons
    ("ok = a <= b", "assign(ok, le(a, b))"),
    # the alias does not reach the serialized form
    ("import numpy as np", "import(numpy)"),
    ("import math", "import(math)"),
])
def test_parse_golden(source, expected):
    block = parse_block(source)
    assert serialize_block(block) == expected


def test_import_alias_survives_parsing():
    block = parse_block("import numpy as np")
    assert block.statements[0].module == "numpy"
    assert block.statements[0].alias == "np"


def test_unicode_identifiers_accepted():
    block = parse_block("площадь = 5\nя2 = площадь * 2")
    assert serialize_block(block) == (
        "assign(площадь, 5); assign(я2, mul(площадь, 2))"
    )


def test_semicolons_split_statements():
    block = parse_block("a = 1; b = a + 1")
    assert len(block.statements) == 2
    assert serialize_block(block) == "assign(a, 1); assign(b, add(a, 1))"


def test_comment_only_statement_preserved():
    block = parse_block("# just words\nx = 1")
    assert len(block.statements) == 2
    assert serialize_block(block) == 'comment("# just words"); assign(x, 1)'


def test_trailing_comment_attaches_to_statement():
    block = parse_block("x = 1  # meaning")
    assert len(block.statements) == 1
    assert block.statements[0].comment == "# meaning"


@pytest.mark.parametrize("source,fragment", [
    ("if x > 0:\n    y = 1", "unsupported construct: 'if'"),
    ("for i in range(3): pass", "unsupported construct: 'for'"),
    ("def f(): return 1", "unsupported construct: 'def'"),
    ("x = lambda v: v", "unsupported construct: 'lambda'"),
    ("while x: pass", "unsupported construct: 'while'"),
    ("x = a if b else c", "unsupported construct: 'if'"),
    ("x = not y", "unsupported construct: 'not'"),
    ("x = a and b", "unsupported construct: 'and'"),
    ("return 4", "unsupported construct: 'return'"),
    ("x, y = 1, 2", "unsupported construct: tuple"),
    ("x = [1, 2]", "illegal character '['"),
    ("x = {1: 2}", "illegal character '{'"),
    ("x = y[0]", "illegal character '['"),
    ("x += 1", "unexpected token '='"),
])
def test_reserved_constructs_rejected(source, fragment):
    with pytest.raises(ParseError) as info:
        parse_block(source)
    assert fragment in str(info.value)


def test_parse_error_carries_position():
    with pytest.raises(ParseError) as info:
        parse_block("x = 1\ny = for")
    assert info.value.line == 2


def test_string_literals_round_trip():
    block = parse_block("s = \"a\\nb\\\"c\"")
    printed = pretty_print(block)
    assert serialize_block(parse_block(printed)) == serialize_block(block)


@pytest.mark.parametrize("source", [
    "y = -b / a",
    "y = -(b / a)",
    "y = 2 ** 3 ** 2",
    "y = (2 ** 3) ** 2",
    "y = (a + b) * c",
    "y = a + b * c",
    "y = -x ** 2",
    "y = (-x) ** 2",
    "y = a - (b - c)",
    "y = a / (b / c)",
    "y = 3 ** -2",
    "y = math.sqrt(x + 1) * 2",
    "y = 0.125 + 7",
    "x = 1; y = x  # tail",
    "# alone\nz = 1",
])
def test_pretty_print_round_trip_goldens(source):
    block = parse_block(source)
    assert serialize_block(parse_block(pretty_print(block))) == serialize_block(block)


@pytest.mark.parametrize("seed", range(50))
def test_pretty_print_round_trip_random(seed):
    rng = random.Random(803 + seed)
    for source in random_syntactic_solution(rng):
        block = parse_block(source)
        assert serialize_block(parse_block(pretty_print(block))) == serialize_block(block)


@given(st.integers(min_value=-10**6, max_value=10**6),
       st.integers(min_value=-10**6, max_value=10**6))
@settings(max_examples=60)
def test_integer_arithmetic_parse_round_trip(a, b):
    source = f"y = {a} + ({b})" if b < 0 else f"y = {a} + {b}"
    block = parse_block(source)
    again = parse_block(pretty_print(block))
    assert serialize_block(again) == serialize_block(block)

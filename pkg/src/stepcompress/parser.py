"""Tokenizer and parser for the restricted straight-line code dialect.

Translated steps are plain sequences of imports, single-target assignments,
and expression statements over numbers, strings, names, arithmetic operators,
comparisons, attribute access, and calls. Control flow, function definitions,
and container syntax are deliberately rejected; callers fall back to an
opaque step key when parsing fails.

Operator precedence, tightest first:

    **   (right associative)
    unary -
    * / % //
    + -
    == != < <= > >=
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction


class TokenKind(Enum):
    IDENT = "ident"
    NUMBER = "number"
    STRING = "string"
    OP = "op"
    DELIM = "delim"
    NEWLINE = "newline"
    COMMENT = "comment"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    lexeme: str
    line: int
    column: int


class ParseError(Exception):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(
            f"{message} (line {line}, column {column})" if line else message
        )
        self.message = message
        self.line = line
        self.column = column


_TOKEN_RE = re.compile(
    r"""
    (?P<COMMENT>\#[^\n]*)
  | (?P<NEWLINE>\r\n|\n|\r)
  | (?P<SKIP>[ \t]+)
  | (?P<NUMBER>\d+\.\d*|\.\d+|\d+)
  | (?P<IDENT>[^\W\d]\w*)
  | (?P<STRING>'(?:\\.|[^'\\\n])*'|"(?:\\.|[^"\\\n])*")
  | (?P<OP>\*\*|//|==|!=|<=|>=|[+\-*/%<>=])
  | (?P<DELIM>[(),;.:])
    """,
    re.VERBOSE,
)

_RESERVED = {
    "if", "elif", "else", "for", "while", "def", "return", "lambda",
    "class", "with", "try", "except", "finally", "yield", "global",
    "nonlocal", "del", "assert", "pass", "break", "continue", "raise",
    "in", "is", "not", "and", "or", "from",
}

_STRING_ESCAPES = {
    "\\": "\\", "'": "'", '"': '"', "n": "\n", "t": "\t", "r": "\r", "0": "\0",
}


def tokenize(source: str) -> list[Token]:
    """Split source into tokens with 1-based line/column positions.

    Comments are single tokens running to end of line. Whitespace is
    skipped, but token lexemes plus the skipped whitespace reconstruct the
    source exactly. Any character outside the dialect raises ParseError.
    """
    tokens: list[Token] = []
    pos = 0
    line = 1
    col = 1
    length = len(source)
    while pos < length:
        match = _TOKEN_RE.match(source, pos)
        if match is None:
            raise ParseError(
                f"illegal character {source[pos]!r}", line, col
            )
        kind_name = match.lastgroup
        lexeme = match.group()
        if kind_name == "NEWLINE":
            tokens.append(Token(TokenKind.NEWLINE, lexeme, line, col))
            line += 1
            col = 1
        elif kind_name == "SKIP":
            col += len(lexeme)
        else:
            tokens.append(Token(TokenKind[kind_name], lexeme, line, col))
            col += len(lexeme)
        pos = match.end()
    return tokens


# --------------------------------------------------------------------------
# AST node types
# --------------------------------------------------------------------------

@dataclass
class Name:
    ident: str


@dataclass
class NumberLit:
    value: Fraction


@dataclass
class StringLit:
    value: str


@dataclass
class UnaryOp:
    op: str  # only "neg"
    operand: "Expr"


@dataclass
class BinOp:
    op: str  # add sub mul div pow mod floordiv
    left: "Expr"
    right: "Expr"


@dataclass
class NaryOp:
    """Flattened commutative chain (add or mul), arity >= 2.

    Never produced by the parser; normalization introduces these."""

    op: str
    operands: list["Expr"]


@dataclass
class Call:
    callee: "Expr"  # Name, Attribute chain, or call result
    args: list["Expr"]


@dataclass
class Attribute:
    base: "Expr"
    name: str


@dataclass
class Compare:
    op: str  # eq ne lt le gt ge
    left: "Expr"
    right: "Expr"


Expr = Name | NumberLit | StringLit | UnaryOp | BinOp | NaryOp | Call | Attribute | Compare


@dataclass
class Import:
    module: str
    alias: str | None = None
    comment: str | None = None


@dataclass
class Assign:
    target: str
    value: Expr
    comment: str | None = None


@dataclass
class ExprStmt:
    value: Expr
    comment: str | None = None


@dataclass
class CommentOnly:
    text: str


Stmt = Import | Assign | ExprStmt | CommentOnly


@dataclass
class Block:
    statements: list[Stmt] = field(default_factory=list)

    @property
    def comment_only(self) -> bool:
        """True when the block holds no executable statement."""
        return all(isinstance(stmt, CommentOnly) for stmt in self.statements)


_BIN_OPS = {
    "+": "add", "-": "sub", "*": "mul", "/": "div",
    "**": "pow", "%": "mod", "//": "floordiv",
}
_CMP_OPS = {"==": "eq", "!=": "ne", "<": "lt", "<=": "le", ">": "gt", ">=": "ge"}


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.index = 0

    # -- token helpers ------------------------------------------------------

    def peek(self) -> Token | None:
        if self.index < len(self.tokens):
            return self.tokens[self.index]
        return None

    def advance(self) -> Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def at_op(self, *lexemes: str) -> bool:
        token = self.peek()
        return (
            token is not None
            and token.kind in (TokenKind.OP, TokenKind.DELIM)
            and token.lexeme in lexemes
        )

    def expect_delim(self, lexeme: str) -> Token:
        token = self.peek()
        if token is None or token.kind != TokenKind.DELIM or token.lexeme != lexeme:
            raise self.error(f"expected {lexeme!r}")
        return self.advance()

    def error(self, message: str) -> ParseError:
        token = self.peek()
        if token is None:
            last = self.tokens[-1] if self.tokens else None
            line = last.line if last else 0
            col = last.column + len(last.lexeme) if last else 0
            return ParseError(message + " at end of input", line, col)
        return ParseError(message, token.line, token.column)

    # -- statements ---------------------------------------------------------

    def parse_block(self) -> Block:
        statements: list[Stmt] = []
        while self.peek() is not None:
            token = self.peek()
            assert token is not None
            if token.kind == TokenKind.NEWLINE:
                self.advance()
                continue
            if token.kind == TokenKind.DELIM and token.lexeme == ";":
                self.advance()
                continue
            if token.kind == TokenKind.COMMENT:
                self.advance()
                statements.append(CommentOnly(token.lexeme))
                continue
            statements.append(self.parse_statement())
        return Block(statements)

    def parse_statement(self) -> Stmt:
        token = self.peek()
        assert token is not None
        if token.kind == TokenKind.IDENT and token.lexeme == "import":
            stmt: Stmt = self.parse_import()
        elif token.kind == TokenKind.IDENT and token.lexeme in _RESERVED:
            raise self.error(f"unsupported construct: {token.lexeme!r}")
        else:
            stmt = self.parse_assign_or_expr()
        stmt_token = self.peek()
        if stmt_token is not None and stmt_token.kind == TokenKind.COMMENT:
            self.advance()
            if not isinstance(stmt, CommentOnly):
                stmt.comment = stmt_token.lexeme
        self.end_statement()
        return stmt

    def parse_import(self) -> Import:
        self.advance()  # "import"
        parts = [self.expect_ident("module name")]
        while self.at_op("."):
            self.advance()
            parts.append(self.expect_ident("module name component"))
        alias = None
        token = self.peek()
        if token is not None and token.kind == TokenKind.IDENT and token.lexeme == "as":
            self.advance()
            alias = self.expect_ident("import alias")
        return Import(module=".".join(parts), alias=alias)

    def expect_ident(self, what: str) -> str:
        token = self.peek()
        if token is None or token.kind != TokenKind.IDENT:
            raise self.error(f"expected {what}")
        if token.lexeme in _RESERVED:
            raise self.error(f"unsupported construct: {token.lexeme!r}")
        return self.advance().lexeme

    def parse_assign_or_expr(self) -> Stmt:
        token = self.peek()
        assert token is not None
        after = (
            self.tokens[self.index + 1]
            if self.index + 1 < len(self.tokens)
            else None
        )
        if (
            token.kind == TokenKind.IDENT
            and after is not None
            and after.kind == TokenKind.OP
            and after.lexeme == "="
        ):
            target = self.advance().lexeme
            self.advance()  # "="
            value = self.parse_expr()
            if self.at_op("="):
                raise self.error("multiple assignment targets")
            return Assign(target=target, value=value)
        value = self.parse_expr()
        if self.at_op("="):
            raise self.error("assignment target must be a single name")
        return ExprStmt(value=value)

    def end_statement(self) -> None:
        token = self.peek()
        if token is None:
            return
        if token.kind == TokenKind.NEWLINE or (
            token.kind == TokenKind.DELIM and token.lexeme == ";"
        ):
            self.advance()
            return
        if token.kind == TokenKind.DELIM and token.lexeme == ",":
            raise self.error("unsupported construct: tuple")
        if token.kind == TokenKind.IDENT and token.lexeme in _RESERVED:
            raise self.error(f"unsupported construct: {token.lexeme!r}")
        raise self.error(f"unexpected token {token.lexeme!r}")

    # -- expressions --------------------------------------------------------

    def parse_expr(self) -> Expr:
        return self.parse_compare()

    def parse_compare(self) -> Expr:
        left = self.parse_additive()
        if self.at_op(*_CMP_OPS):
            op = _CMP_OPS[self.advance().lexeme]
            right = self.parse_additive()
            if self.at_op(*_CMP_OPS):
                raise self.error("unsupported construct: chained comparison")
            return Compare(op=op, left=left, right=right)
        return left

    def parse_additive(self) -> Expr:
        left = self.parse_multiplicative()
        while self.at_op("+", "-"):
            op = _BIN_OPS[self.advance().lexeme]
            left = BinOp(op=op, left=left, right=self.parse_multiplicative())
        return left

    def parse_multiplicative(self) -> Expr:
        left = self.parse_unary()
        while self.at_op("*", "/", "%", "//"):
            op = _BIN_OPS[self.advance().lexeme]
            left = BinOp(op=op, left=left, right=self.parse_unary())
        return left

    def parse_unary(self) -> Expr:
        if self.at_op("-"):
            self.advance()
            return UnaryOp(op="neg", operand=self.parse_unary())
        if self.at_op("+"):
            self.advance()
            return self.parse_unary()
        return self.parse_power()

    def parse_power(self) -> Expr:
        base = self.parse_postfix()
        if self.at_op("**"):
            self.advance()
            # right operand at unary level: 2 ** -3 parses, and the
            # recursion keeps ** right associative
            return BinOp(op="pow", left=base, right=self.parse_unary())
        return base

    def parse_postfix(self) -> Expr:
        expr = self.parse_atom()
        while True:
            if self.at_op("."):
                self.advance()
                expr = Attribute(base=expr, name=self.expect_ident("attribute name"))
            elif self.at_op("("):
                self.advance()
                args: list[Expr] = []
                if not self.at_op(")"):
                    args.append(self.parse_expr())
                    while self.at_op(","):
                        self.advance()
                        args.append(self.parse_expr())
                self.expect_delim(")")
                expr = Call(callee=expr, args=args)
            else:
                return expr

    def parse_atom(self) -> Expr:
        token = self.peek()
        if token is None:
            raise self.error("expected expression")
        if token.kind == TokenKind.NUMBER:
            self.advance()
            return NumberLit(Fraction(token.lexeme))
        if token.kind == TokenKind.STRING:
            self.advance()
            return StringLit(_decode_string(token))
        if token.kind == TokenKind.IDENT:
            if token.lexeme in _RESERVED:
                raise self.error(f"unsupported construct: {token.lexeme!r}")
            self.advance()
            return Name(token.lexeme)
        if self.at_op("("):
            self.advance()
            inner = self.parse_expr()
            self.expect_delim(")")
            return inner
        raise self.error(f"unexpected token {token.lexeme!r}")


def _decode_string(token: Token) -> str:
    body = token.lexeme[1:-1]
    out: list[str] = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\" and i + 1 < len(body):
            out.append(_STRING_ESCAPES.get(body[i + 1], "\\" + body[i + 1]))
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def parse_block(source: str) -> Block:
    """Parse one step's code block. Raises ParseError on anything outside
    the dialect (the error names the offending construct)."""
    return _Parser(tokenize(source)).parse_block()


# --------------------------------------------------------------------------
# Pretty printer
# --------------------------------------------------------------------------

_LEVEL_COMPARE = 1
_LEVEL_ADD = 2
_LEVEL_MUL = 3
_LEVEL_UNARY = 4
_LEVEL_POW = 5
_LEVEL_ATOM = 6

_OP_SYMBOLS = {
    "add": "+", "sub": "-", "mul": "*", "div": "/",
    "pow": "**", "mod": "%", "floordiv": "//",
}
_CMP_SYMBOLS = {v: k for k, v in _CMP_OPS.items()}


def _expr_level(expr: Expr) -> int:
    if isinstance(expr, Compare):
        return _LEVEL_COMPARE
    if isinstance(expr, BinOp):
        if expr.op in ("add", "sub"):
            return _LEVEL_ADD
        if expr.op == "pow":
            return _LEVEL_POW
        return _LEVEL_MUL
    if isinstance(expr, NaryOp):
        return _LEVEL_ADD if expr.op == "add" else _LEVEL_MUL
    if isinstance(expr, UnaryOp):
        return _LEVEL_UNARY
    if isinstance(expr, NumberLit):
        if _decimal_form(expr.value) is None:
            return _LEVEL_MUL  # prints as p / q
        return _LEVEL_UNARY if expr.value < 0 else _LEVEL_ATOM
    return _LEVEL_ATOM


def _decimal_form(value: Fraction) -> str | None:
    """Exact decimal rendering when the denominator divides a power of ten."""
    if value.denominator == 1:
        return str(value.numerator)
    den = value.denominator
    twos = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    fives = 0
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return None
    places = max(twos, fives)
    scaled = value.numerator * 10**places // value.denominator
    sign = "-" if scaled < 0 else ""
    text = str(abs(scaled)).rjust(places + 1, "0")
    return f"{sign}{text[:-places]}.{text[-places:]}"


def _print_expr(expr: Expr, parent_level: int, tight_side: bool = False) -> str:
    level = _expr_level(expr)
    text = _render(expr)
    if level < parent_level or (level == parent_level and tight_side):
        return f"({text})"
    return text


def _render(expr: Expr) -> str:
    if isinstance(expr, Name):
        return expr.ident
    if isinstance(expr, NumberLit):
        decimal = _decimal_form(expr.value)
        if decimal is not None:
            return decimal
        return f"{expr.value.numerator} / {expr.value.denominator}"
    if isinstance(expr, StringLit):
        body = expr.value.replace("\\", "\\\\").replace('"', '\\"')
        body = body.replace("\n", "\\n").replace("\t", "\\t").replace("\r", "\\r")
        return f'"{body}"'
    if isinstance(expr, UnaryOp):
        return "-" + _print_expr(expr.operand, _LEVEL_UNARY)
    if isinstance(expr, BinOp):
        level = _expr_level(expr)
        symbol = _OP_SYMBOLS[expr.op]
        if expr.op == "pow":
            # right associative: parenthesize an exponentiation on the left
            left = _print_expr(expr.left, level, tight_side=True)
            right = _print_expr(expr.right, _LEVEL_UNARY)
            return f"{left} {symbol} {right}"
        left = _print_expr(expr.left, level)
        right = _print_expr(expr.right, level, tight_side=True)
        return f"{left} {symbol} {right}"
    if isinstance(expr, NaryOp):
        level = _expr_level(expr)
        symbol = _OP_SYMBOLS[expr.op]
        parts = [
            _print_expr(operand, level, tight_side=True)
            for operand in expr.operands
        ]
        return f" {symbol} ".join(parts)
    if isinstance(expr, Call):
        callee = _print_postfix_base(expr.callee)
        args = ", ".join(_print_expr(arg, 0) for arg in expr.args)
        return f"{callee}({args})"
    if isinstance(expr, Attribute):
        return _print_postfix_base(expr.base) + "." + expr.name
    if isinstance(expr, Compare):
        symbol = _CMP_SYMBOLS[expr.op]
        left = _print_expr(expr.left, _LEVEL_COMPARE)
        right = _print_expr(expr.right, _LEVEL_COMPARE, tight_side=True)
        return f"{left} {symbol} {right}"
    raise TypeError(f"cannot print {type(expr).__name__}")


def _print_postfix_base(expr: Expr) -> str:
    """Receiver of a call or attribute access. Numbers must be wrapped:
    `3.m` would lex the dot into the numeral."""
    if isinstance(expr, (Name, Call, Attribute, StringLit)):
        return _render(expr)
    return f"({_render(expr)})"


def pretty_print(block: Block) -> str:
    """Render a block back to surface syntax, one statement per line.

    parse_block(pretty_print(parse_block(s))) is structurally identical to
    parse_block(s).
    """
    lines: list[str] = []
    for stmt in block.statements:
        if isinstance(stmt, CommentOnly):
            lines.append(stmt.text)
            continue
        if isinstance(stmt, Import):
            text = f"import {stmt.module}"
            if stmt.alias:
                text += f" as {stmt.alias}"
        elif isinstance(stmt, Assign):
            text = f"{stmt.target} = {_print_expr(stmt.value, 0)}"
        elif isinstance(stmt, ExprStmt):
            text = _print_expr(stmt.value, 0)
        else:
            raise TypeError(f"cannot print {type(stmt).__name__}")
        if stmt.comment:
            text += f"  {stmt.comment}"
        lines.append(text)
    return "\n".join(lines)

"""Canonicalization of parsed step blocks into merge keys.

Four transforms run over every executable block of a solution, in order:
comment stripping, identifier renaming (solution-wide, first appearance
wins), operation normalization against the alias table, commutative
reordering, and constant folding. The result serializes to a prefix-notation
string that is the step's merge key.

A single sweep of those transforms is not a fixed point: sorting commutative
operands can move a variable's first appearance past another's, so a rerun
would assign different indices. The sweep is therefore iterated until the
serialized form stops changing (observed: never more than three sweeps).
Each sweep only reads earlier steps, which keeps keys prefix-stable: the key
of step i is the same whether steps i+1.. are present or not.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .numeric import collapse_whitespace, serialize_rational
from .parser import (
    Assign,
    Attribute,
    BinOp,
    Block,
    Call,
    CommentOnly,
    Compare,
    Expr,
    ExprStmt,
    Import,
    Name,
    NaryOp,
    NumberLit,
    ParseError,
    StringLit,
    Stmt,
    UnaryOp,
    parse_block,
)

from enum import Enum


class StepKeyKind(Enum):
    CODE = "code"
    COMMENT_ONLY = "comment_only"
    OPAQUE = "opaque"


@dataclass(frozen=True)
class StepKey:
    kind: StepKeyKind
    key: str

    @property
    def sort_key(self) -> tuple[str, str]:
        return (self.kind.value, self.key)


COMMENT_SENTINEL = "only comment"

# Exponent magnitude above which constant folding declines, so that a single
# literal cannot balloon into a numeral with thousands of digits.
_FOLD_POW_LIMIT = 512

_MAX_SWEEPS = 12

CANONICAL_OPS = ("add", "sub", "mul", "div", "pow", "mod", "floordiv", "neg")

_DEFAULT_ALIASES = {
    "multiply": "mul", "times": "mul", "product": "mul", "mul": "mul",
    "add": "add", "plus": "add", "sum": "add",
    "subtract": "sub", "minus": "sub", "difference": "sub", "sub": "sub",
    "divide": "div", "quotient": "div", "div": "div",
    "power": "pow", "pow": "pow",
}


@dataclass(frozen=True)
class AliasTable:
    """Spelling -> canonical operation map used by operation normalization.

    Values are restricted to the closed vocabulary in CANONICAL_OPS; the
    spellings also survive identifier renaming so that the later pass can
    still see them.
    """

    mapping: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for spelling, op in self.mapping.items():
            if op not in CANONICAL_OPS:
                raise ValueError(
                    f"alias {spelling!r} maps to {op!r}, outside the closed "
                    f"vocabulary {CANONICAL_OPS}"
                )
            if not spelling.isidentifier():
                raise ValueError(f"alias spelling {spelling!r} is not an identifier")

    @classmethod
    def default(cls) -> "AliasTable":
        return cls(dict(_DEFAULT_ALIASES))

    def with_overrides(self, overrides: dict[str, str]) -> "AliasTable":
        merged = dict(self.mapping)
        merged.update(overrides)
        return AliasTable(merged)

    def get(self, spelling: str) -> str | None:
        return self.mapping.get(spelling)

    @property
    def spellings(self) -> frozenset[str]:
        return frozenset(self.mapping)


# Frozen inventory of well-known callables and constants from the four
# libraries the translation prompt points at. A runtime scan of the installed
# modules would make keys version- and platform-dependent, so the list is
# pinned here instead. Matched against the final dotted component only.
KNOWN_FUNCTIONS = frozenset({
    # math
    "acos", "acosh", "asin", "asinh", "atan", "atan2", "atanh", "ceil",
    "comb", "copysign", "cos", "cosh", "degrees", "dist", "erf", "erfc",
    "exp", "expm1", "fabs", "factorial", "floor", "fmod", "frexp", "fsum",
    "gamma", "gcd", "hypot", "isclose", "isfinite", "isinf", "isnan",
    "isqrt", "lcm", "ldexp", "lgamma", "log", "log10", "log1p", "log2",
    "modf", "perm", "pi", "e", "tau", "inf", "nan", "prod", "radians",
    "remainder", "sin", "sinh", "sqrt", "tan", "tanh", "trunc",
    # sympy
    "Abs", "Add", "Eq", "Float", "Integer", "Matrix", "Max", "Min", "Mul",
    "Number", "Poly", "Pow", "Rational", "S", "Sum", "Symbol", "symbols",
    "simplify", "expand", "factor", "collect", "cancel", "apart", "together",
    "solve", "solveset", "linsolve", "roots", "diff", "integrate", "limit",
    "series", "summation", "cbrt", "root", "binomial", "ceiling", "re", "im",
    "arg", "conjugate", "sign", "nsimplify", "radsimp", "ratsimp",
    "trigsimp", "powsimp", "sympify", "evalf", "subs", "doit", "n",
    "limit_denominator", "numer", "denom", "fraction", "primefactors",
    "isprime", "nextprime", "prevprime", "divisors", "totient", "Piecewise",
    "lambdify", "oo", "zoo", "I", "E", "GoldenRatio", "EulerGamma",
    "numerator", "denominator", "real", "imag",
    # numpy
    "abs", "absolute", "arange", "arccos", "arcsin", "arctan", "arctan2",
    "argmax", "argmin", "around", "array", "asarray", "average", "clip",
    "concatenate", "cross", "cumprod", "cumsum", "deg2rad", "diag",
    "divmod", "dot", "eye", "floor_divide", "hstack", "identity", "interp",
    "linspace", "matmul", "max", "maximum", "mean", "median", "min",
    "minimum", "negative", "ones", "outer", "percentile", "polyadd",
    "polyder", "polyfit", "polyint", "polymul", "polysub", "polyval",
    "rad2deg", "ravel", "reshape", "round", "sort", "square", "stack",
    "std", "trace", "transpose", "vstack", "where", "zeros", "det", "inv",
    "norm", "eig", "item",
    # scipy
    "quad", "dblquad", "odeint", "solve_ivp", "minimize", "fsolve",
    "brentq", "curve_fit", "linprog", "interp1d", "erfinv", "beta", "lu",
    "qr", "svd", "expm", "fft", "ifft",
})


_INDEXED_NAME_RE = re.compile(r"^(var|func)(\d+)$")


@dataclass
class RenameMap:
    """First-appearance renaming state for one solution.

    Variables map to var{i}, unknown callees to func{j}; both index spaces
    are dense from zero and injective.
    """

    variables: dict[str, str] = field(default_factory=dict)
    callees: dict[str, str] = field(default_factory=dict)

    def variable(self, original: str) -> str:
        replacement = self.variables.get(original)
        if replacement is None:
            replacement = f"var{len(self.variables)}"
            self.variables[original] = replacement
        return replacement

    def callee(self, original: str) -> str:
        replacement = self.callees.get(original)
        if replacement is None:
            replacement = f"func{len(self.callees)}"
            self.callees[original] = replacement
        return replacement

    def compose_after(self, earlier: "RenameMap") -> "RenameMap":
        """Map original names through `earlier` and then through self."""
        variables = {
            orig: self.variables.get(mid, mid)
            for orig, mid in earlier.variables.items()
        }
        callees = {
            orig: self.callees.get(mid, mid)
            for orig, mid in earlier.callees.items()
        }
        return RenameMap(variables=variables, callees=callees)


# --------------------------------------------------------------------------
# The four transforms
# --------------------------------------------------------------------------

def strip_comments(block: Block) -> Block:
    """Drop comment-only statements and trailing comments. Comments carry no
    merge semantics; a block left empty is the comment-only case."""
    statements: list[Stmt] = []
    for stmt in block.statements:
        if isinstance(stmt, CommentOnly):
            continue
        if isinstance(stmt, Import):
            statements.append(Import(stmt.module, stmt.alias, None))
        elif isinstance(stmt, Assign):
            statements.append(Assign(stmt.target, stmt.value, None))
        elif isinstance(stmt, ExprStmt):
            statements.append(ExprStmt(stmt.value, None))
    return Block(statements)


def _dotted_path(expr: Expr) -> list[str] | None:
    """["np", "linalg", "det"] for a pure dotted name, else None."""
    parts: list[str] = []
    node = expr
    while isinstance(node, Attribute):
        parts.append(node.name)
        node = node.base
    if isinstance(node, Name):
        parts.append(node.ident)
        parts.reverse()
        return parts
    return None


class _Renamer:
    def __init__(self, rename: RenameMap, known_callees: frozenset[str]):
        self.rename = rename
        self.known = known_callees

    def block(self, block: Block) -> Block:
        statements: list[Stmt] = []
        for stmt in block.statements:
            if isinstance(stmt, Assign):
                target = self.rename.variable(stmt.target)
                statements.append(Assign(target, self.expr(stmt.value), stmt.comment))
            elif isinstance(stmt, ExprStmt):
                statements.append(ExprStmt(self.expr(stmt.value), stmt.comment))
            else:
                statements.append(stmt)
        return Block(statements)

    def value_name(self, ident: str) -> str:
        """Bare name in value position. Known library names stay put until
        an assignment shadows them; the rule is forward-only, so earlier
        keys never depend on later statements."""
        if ident not in self.rename.variables and ident in self.known:
            return ident
        return self.rename.variable(ident)

    def expr(self, expr: Expr) -> Expr:
        if isinstance(expr, Name):
            return Name(self.value_name(expr.ident))
        if isinstance(expr, (NumberLit, StringLit)):
            return expr
        if isinstance(expr, UnaryOp):
            return UnaryOp(expr.op, self.expr(expr.operand))
        if isinstance(expr, BinOp):
            return BinOp(expr.op, self.expr(expr.left), self.expr(expr.right))
        if isinstance(expr, NaryOp):
            return NaryOp(expr.op, [self.expr(operand) for operand in expr.operands])
        if isinstance(expr, Compare):
            return Compare(expr.op, self.expr(expr.left), self.expr(expr.right))
        if isinstance(expr, Call):
            return Call(self.callee(expr.callee), [self.expr(arg) for arg in expr.args])
        if isinstance(expr, Attribute):
            return self.attribute(expr)
        raise TypeError(f"cannot rename {type(expr).__name__}")

    def callee(self, callee: Expr) -> Expr:
        """Callee position: library names survive, everything else becomes
        func{j}. Namespaces of dotted library names are dropped."""
        if isinstance(callee, Name):
            if callee.ident in self.known:
                return callee
            return Name(self.rename.callee(callee.ident))
        path = _dotted_path(callee)
        if path is not None:
            final = path[-1]
            if final in self.known:
                return Name(final)
            return Name(self.rename.callee(".".join(path)))
        if isinstance(callee, Attribute):
            # method on a computed value: normalize the receiver, keep or
            # rename the method name itself
            name = callee.name
            if name not in self.known:
                name = self.rename.callee(name)
            return Attribute(self.expr(callee.base), name)
        return self.expr(callee)

    def attribute(self, expr: Attribute) -> Expr:
        path = _dotted_path(expr)
        if path is not None:
            final = path[-1]
            if final in self.known:
                # library constant like math.pi: namespace dropped
                return Name(final)
            # dotted read rooted at a user variable: rename the root only
            root = self.value_name(path[0])
            node: Expr = Name(root)
            for part in path[1:]:
                node = Attribute(node, part)
            return node
        return Attribute(self.expr(expr.base), expr.name)


def rename_identifiers(
    blocks: list[Block],
    aliases: AliasTable | None = None,
    rename: RenameMap | None = None,
) -> tuple[list[Block], RenameMap]:
    """Solution-wide renaming pass over executable blocks, in step order.

    Within a statement the assignment target is scanned first, then the value
    expression left to right. Operation-alias spellings and known library
    names in callee position are preserved for the passes that follow.
    """
    aliases = aliases or AliasTable.default()
    rename = rename or RenameMap()
    renamer = _Renamer(rename, KNOWN_FUNCTIONS | aliases.spellings)
    return [renamer.block(block) for block in blocks], rename


def normalize_operations(block: Block, aliases: AliasTable | None = None) -> Block:
    """Fold aliased calls into operator nodes and drop import aliases.

    A call becomes NaryOp for add/mul with two or more arguments and BinOp
    for the binary-only operations with exactly two; any other arity is left
    as a call rather than guessed at.
    """
    aliases = aliases or AliasTable.default()

    def walk(expr: Expr) -> Expr:
        if isinstance(expr, (Name, NumberLit, StringLit)):
            return expr
        if isinstance(expr, UnaryOp):
            return UnaryOp(expr.op, walk(expr.operand))
        if isinstance(expr, BinOp):
            return BinOp(expr.op, walk(expr.left), walk(expr.right))
        if isinstance(expr, NaryOp):
            return NaryOp(expr.op, [walk(operand) for operand in expr.operands])
        if isinstance(expr, Compare):
            return Compare(expr.op, walk(expr.left), walk(expr.right))
        if isinstance(expr, Attribute):
            return Attribute(walk(expr.base), expr.name)
        if isinstance(expr, Call):
            args = [walk(arg) for arg in expr.args]
            callee = walk(expr.callee)
            if isinstance(callee, Name):
                op = aliases.get(callee.ident)
                if op in ("add", "mul") and len(args) >= 2:
                    return NaryOp(op, args)
                if op in ("sub", "div", "pow", "mod", "floordiv") and len(args) == 2:
                    return BinOp(op, args[0], args[1])
                if op == "neg" and len(args) == 1:
                    return UnaryOp("neg", args[0])
            return Call(callee, args)
        raise TypeError(f"cannot normalize {type(expr).__name__}")

    statements: list[Stmt] = []
    for stmt in block.statements:
        if isinstance(stmt, Import):
            statements.append(Import(stmt.module, None, stmt.comment))
        elif isinstance(stmt, Assign):
            statements.append(Assign(stmt.target, walk(stmt.value), stmt.comment))
        elif isinstance(stmt, ExprStmt):
            statements.append(ExprStmt(walk(stmt.value), stmt.comment))
        else:
            statements.append(stmt)
    return Block(statements)


def _sorted_operands(operands: list[Expr]) -> list[Expr]:
    return sorted(operands, key=lambda operand: serialize_expr(operand, pad=True))


def reorder_commutative(block: Block) -> Block:
    """Flatten maximal add/mul chains into NaryOp and sort the operands by
    their serialized form. Subtraction and division are left alone."""

    def gather(expr: Expr, op: str, into: list[Expr]) -> None:
        if isinstance(expr, BinOp) and expr.op == op:
            gather(expr.left, op, into)
            gather(expr.right, op, into)
        elif isinstance(expr, NaryOp) and expr.op == op:
            for operand in expr.operands:
                gather(operand, op, into)
        else:
            into.append(walk(expr))

    def walk(expr: Expr) -> Expr:
        if isinstance(expr, (Name, NumberLit, StringLit)):
            return expr
        if isinstance(expr, UnaryOp):
            return UnaryOp(expr.op, walk(expr.operand))
        if isinstance(expr, (BinOp, NaryOp)) and getattr(expr, "op") in ("add", "mul"):
            operands: list[Expr] = []
            gather(expr, expr.op, operands)
            return NaryOp(expr.op, _sorted_operands(operands))
        if isinstance(expr, BinOp):
            return BinOp(expr.op, walk(expr.left), walk(expr.right))
        if isinstance(expr, NaryOp):
            return NaryOp(expr.op, [walk(operand) for operand in expr.operands])
        if isinstance(expr, Compare):
            return Compare(expr.op, walk(expr.left), walk(expr.right))
        if isinstance(expr, Call):
            return Call(walk(expr.callee), [walk(arg) for arg in expr.args])
        if isinstance(expr, Attribute):
            return Attribute(walk(expr.base), expr.name)
        raise TypeError(f"cannot reorder {type(expr).__name__}")

    return _map_statements(block, walk)


def _fold_binary(op: str, left: Fraction, right: Fraction) -> Fraction | None:
    if op == "add":
        return left + right
    if op == "sub":
        return left - right
    if op == "mul":
        return left * right
    if op == "div":
        if right == 0:
            return None
        return left / right
    if op == "mod":
        if right == 0:
            return None
        return left % right
    if op == "floordiv":
        if right == 0:
            return None
        return Fraction(left // right)
    if op == "pow":
        if right.denominator != 1 or abs(right.numerator) > _FOLD_POW_LIMIT:
            return None
        if left == 0 and right < 0:
            return None
        return left ** right.numerator
    return None


def fold_constants(block: Block) -> Block:
    """Evaluate operator nodes whose operands are all literal numbers,
    exactly. Division (and modulo, floor division) by a literal zero is left
    in place, as are exponents outside the safe integer range."""

    def walk(expr: Expr) -> Expr:
        if isinstance(expr, (Name, NumberLit, StringLit)):
            return expr
        if isinstance(expr, UnaryOp):
            operand = walk(expr.operand)
            if expr.op == "neg" and isinstance(operand, NumberLit):
                return NumberLit(-operand.value)
            return UnaryOp(expr.op, operand)
        if isinstance(expr, BinOp):
            left = walk(expr.left)
            right = walk(expr.right)
            if isinstance(left, NumberLit) and isinstance(right, NumberLit):
                folded = _fold_binary(expr.op, left.value, right.value)
                if folded is not None:
                    return NumberLit(folded)
            return BinOp(expr.op, left, right)
        if isinstance(expr, NaryOp):
            operands = [walk(operand) for operand in expr.operands]
            constants = [o.value for o in operands if isinstance(o, NumberLit)]
            rest = [o for o in operands if not isinstance(o, NumberLit)]
            if len(constants) >= 2:
                combined = Fraction(0) if expr.op == "add" else Fraction(1)
                for value in constants:
                    combined = combined + value if expr.op == "add" else combined * value
                if not rest:
                    return NumberLit(combined)
                operands = [NumberLit(combined)] + rest
            return NaryOp(expr.op, _sorted_operands(operands))
        if isinstance(expr, Compare):
            return Compare(expr.op, walk(expr.left), walk(expr.right))
        if isinstance(expr, Call):
            return Call(walk(expr.callee), [walk(arg) for arg in expr.args])
        if isinstance(expr, Attribute):
            return Attribute(walk(expr.base), expr.name)
        raise TypeError(f"cannot fold {type(expr).__name__}")

    return _map_statements(block, walk)


def _map_statements(block: Block, walk) -> Block:
    statements: list[Stmt] = []
    for stmt in block.statements:
        if isinstance(stmt, Assign):
            statements.append(Assign(stmt.target, walk(stmt.value), stmt.comment))
        elif isinstance(stmt, ExprStmt):
            statements.append(ExprStmt(walk(stmt.value), stmt.comment))
        else:
            statements.append(stmt)
    return Block(statements)


# --------------------------------------------------------------------------
# Serialization
# --------------------------------------------------------------------------

def _pad_indexed(ident: str) -> str:
    match = _INDEXED_NAME_RE.match(ident)
    if match is None:
        return ident
    return f"{match.group(1)}{int(match.group(2)):06d}"


def serialize_expr(expr: Expr, pad: bool = False) -> str:
    """Prefix notation with explicit arity. `pad` zero-pads var/func indices
    so that lexicographic comparison matches index order; only the sort uses
    padded forms, emitted keys never do."""
    if isinstance(expr, Name):
        return _pad_indexed(expr.ident) if pad else expr.ident
    if isinstance(expr, NumberLit):
        return serialize_rational(expr.value)
    if isinstance(expr, StringLit):
        return json.dumps(expr.value, ensure_ascii=True)
    if isinstance(expr, UnaryOp):
        return f"neg({serialize_expr(expr.operand, pad)})"
    if isinstance(expr, BinOp):
        return (
            f"{expr.op}({serialize_expr(expr.left, pad)}, "
            f"{serialize_expr(expr.right, pad)})"
        )
    if isinstance(expr, NaryOp):
        inner = ", ".join(serialize_expr(operand, pad) for operand in expr.operands)
        return f"nary_{expr.op}({inner})"
    if isinstance(expr, Compare):
        return (
            f"{expr.op}({serialize_expr(expr.left, pad)}, "
            f"{serialize_expr(expr.right, pad)})"
        )
    if isinstance(expr, Call):
        parts = [serialize_expr(expr.callee, pad)]
        parts.extend(serialize_expr(arg, pad) for arg in expr.args)
        return f"call({', '.join(parts)})"
    if isinstance(expr, Attribute):
        return f"attr({serialize_expr(expr.base, pad)}, {expr.name})"
    raise TypeError(f"cannot serialize {type(expr).__name__}")


def serialize_stmt(stmt: Stmt, pad: bool = False) -> str:
    if isinstance(stmt, Import):
        return f"import({stmt.module})"
    if isinstance(stmt, Assign):
        target = _pad_indexed(stmt.target) if pad else stmt.target
        return f"assign({target}, {serialize_expr(stmt.value, pad)})"
    if isinstance(stmt, ExprStmt):
        return f"expr({serialize_expr(stmt.value, pad)})"
    if isinstance(stmt, CommentOnly):
        return f"comment({json.dumps(stmt.text)})"
    raise TypeError(f"cannot serialize {type(stmt).__name__}")


def serialize_block(block: Block, pad: bool = False) -> str:
    return "; ".join(serialize_stmt(stmt, pad) for stmt in block.statements)


def opaque_key(raw_text: str) -> str:
    """Fallback key for unparseable steps: collapsed raw text behind a short
    content-hash prefix."""
    collapsed = collapse_whitespace(raw_text)
    digest = hashlib.sha256(collapsed.encode("utf-8")).hexdigest()[:12]
    return f"{digest}:{collapsed}"


# --------------------------------------------------------------------------
# The full per-solution pipeline
# --------------------------------------------------------------------------

def _sweep(
    blocks: list[Block], aliases: AliasTable
) -> tuple[list[Block], RenameMap]:
    rename = RenameMap()
    renamer = _Renamer(rename, KNOWN_FUNCTIONS | aliases.spellings)
    out: list[Block] = []
    for block in blocks:
        block = strip_comments(block)
        block = renamer.block(block)
        block = normalize_operations(block, aliases)
        block = reorder_commutative(block)
        block = fold_constants(block)
        out.append(block)
    return out, rename


def normalize_solution(
    blocks: list[Block], aliases: AliasTable | None = None
) -> tuple[list[Block], RenameMap]:
    """Run the transform sweep to a fixed point over one solution's
    executable blocks. Returns the normalized blocks and the composed
    original-name -> final-name map."""
    aliases = aliases or AliasTable.default()
    current, composed = _sweep(blocks, aliases)
    signature = [serialize_block(block) for block in current]
    for _ in range(_MAX_SWEEPS - 1):
        candidate, rename = _sweep(current, aliases)
        next_signature = [serialize_block(block) for block in candidate]
        composed = rename.compose_after(composed)
        if next_signature == signature:
            return candidate, composed
        current, signature = candidate, next_signature
    return current, composed


@dataclass
class CanonicalizedSolution:
    """Per-step keys plus the normalized blocks (None for steps that did not
    parse or were comment-only) and the composed rename map."""

    keys: list[StepKey]
    blocks: list[Block | None]
    rename_map: RenameMap

    @property
    def comment_step_indices(self) -> list[int]:
        return [
            i + 1
            for i, key in enumerate(self.keys)
            if key.kind is StepKeyKind.COMMENT_ONLY
        ]


def canonical_keys(
    step_sources: list[str], aliases: AliasTable | None = None
) -> CanonicalizedSolution:
    """Translate a solution's step code blocks into merge keys.

    Unparseable steps degrade to opaque keys, all-comment steps become
    comment keys carrying their collapsed text, and everything else is
    normalized and serialized.
    """
    parsed: list[Block | None] = []
    kinds: list[StepKeyKind] = []
    for source in step_sources:
        try:
            block = parse_block(source)
        except ParseError:
            parsed.append(None)
            kinds.append(StepKeyKind.OPAQUE)
            continue
        if block.comment_only:
            parsed.append(None)
            kinds.append(StepKeyKind.COMMENT_ONLY)
        else:
            parsed.append(block)
            kinds.append(StepKeyKind.CODE)

    code_blocks = [block for block in parsed if block is not None]
    normalized, rename = normalize_solution(code_blocks, aliases)
    normalized_iter = iter(normalized)

    keys: list[StepKey] = []
    blocks: list[Block | None] = []
    for source, kind in zip(step_sources, kinds):
        if kind is StepKeyKind.OPAQUE:
            keys.append(StepKey(kind, opaque_key(source)))
            blocks.append(None)
        elif kind is StepKeyKind.COMMENT_ONLY:
            keys.append(StepKey(kind, collapse_whitespace(source)))
            blocks.append(None)
        else:
            block = next(normalized_iter)
            keys.append(StepKey(kind, serialize_block(block)))
            blocks.append(block)
    return CanonicalizedSolution(keys=keys, blocks=blocks, rename_map=rename)


# --------------------------------------------------------------------------
# Straight-line evaluation (exact)
# --------------------------------------------------------------------------

class EvaluationError(Exception):
    pass


Value = Fraction | bool | str


def _eval_expr(expr: Expr, env: dict[str, Value]) -> Value:
    if isinstance(expr, NumberLit):
        return expr.value
    if isinstance(expr, StringLit):
        return expr.value
    if isinstance(expr, Name):
        if expr.ident not in env:
            raise EvaluationError(f"unbound name {expr.ident!r}")
        return env[expr.ident]
    if isinstance(expr, UnaryOp):
        value = _eval_numeric(expr.operand, env)
        return -value
    if isinstance(expr, BinOp):
        left = _eval_numeric(expr.left, env)
        right = _eval_numeric(expr.right, env)
        return _apply_binop(expr.op, left, right)
    if isinstance(expr, NaryOp):
        values = [_eval_numeric(operand, env) for operand in expr.operands]
        result = values[0]
        for value in values[1:]:
            result = result + value if expr.op == "add" else result * value
        return result
    if isinstance(expr, Compare):
        left = _eval_numeric(expr.left, env)
        right = _eval_numeric(expr.right, env)
        return {
            "eq": left == right, "ne": left != right,
            "lt": left < right, "le": left <= right,
            "gt": left > right, "ge": left >= right,
        }[expr.op]
    if isinstance(expr, Call):
        raise EvaluationError(
            f"unknown callee {serialize_expr(expr.callee)!r}: calls are "
            "outside the straight-line evaluator"
        )
    if isinstance(expr, Attribute):
        raise EvaluationError(f"cannot evaluate attribute {expr.name!r}")
    raise EvaluationError(f"cannot evaluate {type(expr).__name__}")


def _eval_numeric(expr: Expr, env: dict[str, Value]) -> Fraction:
    value = _eval_expr(expr, env)
    if isinstance(value, bool) or not isinstance(value, (Fraction, int)):
        raise EvaluationError(f"expected a number, got {type(value).__name__}")
    return Fraction(value)


def _apply_binop(op: str, left: Fraction, right: Fraction) -> Fraction:
    if op == "add":
        return left + right
    if op == "sub":
        return left - right
    if op == "mul":
        return left * right
    if op in ("div", "mod", "floordiv") and right == 0:
        raise EvaluationError("division by zero")
    if op == "div":
        return left / right
    if op == "mod":
        return left % right
    if op == "floordiv":
        return Fraction(left // right)
    if op == "pow":
        if right.denominator != 1:
            raise EvaluationError("non-integer exponent")
        if left == 0 and right < 0:
            raise EvaluationError("zero base with negative exponent")
        return left ** right.numerator
    raise EvaluationError(f"unknown operation {op!r}")


def evaluate_straight_line(
    blocks: Block | list[Block], env: dict[str, Value] | None = None
) -> dict[str, Value]:
    """Execute assignments in order with exact rational arithmetic and
    return the resulting environment. Imports and comments are inert;
    expression statements are evaluated and discarded."""
    if isinstance(blocks, Block):
        blocks = [blocks]
    out: dict[str, Value] = dict(env) if env else {}
    for block in blocks:
        for stmt in block.statements:
            if isinstance(stmt, Assign):
                out[stmt.target] = _eval_expr(stmt.value, out)
            elif isinstance(stmt, ExprStmt):
                _eval_expr(stmt.value, out)
    return out

"""Small expression language for right-hand sides and candidate functions.

Expressions are over the variables x and t, real literals, the binary
operators + - * / ^ (with ^ right-associative and binding tighter than
unary minus), unary minus, and the calls gamma, sqrt, abs, exp, ln, sin,
cos, pow, max.  Evaluation is plain IEEE-754 double arithmetic; domain
violations raise instead of producing NaN or infinity.

The grammar (EBNF) is published in docs/grammar.md.
"""

import math
import re
from dataclasses import dataclass, field
from typing import Union

from .specfun import gamma as _gamma

__all__ = [
    "Expression",
    "Num",
    "Var",
    "Neg",
    "BinOp",
    "Call",
    "parse",
    "evaluate",
    "to_string",
    "variables",
    "ExpressionError",
    "ParseError",
    "UnknownIdentifierError",
    "ArityError",
    "EvalDomainError",
]

FUNCTIONS = {
    "gamma": 1,
    "sqrt": 1,
    "abs": 1,
    "exp": 1,
    "ln": 1,
    "sin": 1,
    "cos": 1,
    "pow": 2,
    "max": 2,
}

VARIABLES = ("x", "t")


class ExpressionError(ValueError):
    """Base class for expression errors; position is a 1-based byte offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class ParseError(ExpressionError):
    def __init__(self, message: str, position: int, expected: tuple[str, ...] = ()):
        if expected:
            message = f"{message}; expected one of: {', '.join(expected)}"
        super().__init__(message, position)
        self.expected = expected


class UnknownIdentifierError(ExpressionError):
    pass


class ArityError(ExpressionError):
    pass


class EvalDomainError(ExpressionError):
    pass


@dataclass(frozen=True)
class Num:
    value: float
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Var:
    name: str
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Neg:
    operand: "Expression"
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expression"
    right: "Expression"
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple["Expression", ...]
    pos: int = field(default=0, compare=False)


Expression = Union[Num, Var, Neg, BinOp, Call]


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    i = 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if m is None:
            stripped = text[i:].lstrip()
            if not stripped:
                break
            pos = len(text) - len(stripped) + 1
            raise ParseError(f"unexpected character {stripped[0]!r}", pos)
        kind = m.lastgroup
        value = m.group(kind)
        tokens.append((kind, value, m.start(kind) + 1))
        i = m.end()
    tokens.append(("end", "", len(text) + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.k = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.k]

    def advance(self) -> tuple[str, str, int]:
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def expect_op(self, op: str) -> int:
        kind, value, pos = self.peek()
        if kind != "op" or value != op:
            raise ParseError(
                f"found {value!r}" if kind != "end" else "unexpected end of input",
                pos,
                expected=(f"'{op}'",),
            )
        self.advance()
        return pos

    def parse(self) -> Expression:
        node = self.sum()
        kind, value, pos = self.peek()
        if kind != "end":
            raise ParseError(
                f"unexpected trailing input {value!r}",
                pos,
                expected=("'+'", "'-'", "'*'", "'/'", "'^'", "end of input"),
            )
        return node

    def sum(self) -> Expression:
        node = self.term()
        while True:
            kind, value, pos = self.peek()
            if kind == "op" and value in "+-":
                self.advance()
                node = BinOp(value, node, self.term(), pos=pos)
            else:
                return node

    def term(self) -> Expression:
        node = self.unary()
        while True:
            kind, value, pos = self.peek()
            if kind == "op" and value in "*/":
                self.advance()
                node = BinOp(value, node, self.unary(), pos=pos)
            else:
                return node

    def unary(self) -> Expression:
        kind, value, pos = self.peek()
        if kind == "op" and value == "-":
            self.advance()
            return Neg(self.unary(), pos=pos)
        return self.power()

    def power(self) -> Expression:
        base = self.atom()
        kind, value, pos = self.peek()
        if kind == "op" and value == "^":
            self.advance()
            return BinOp("^", base, self.unary(), pos=pos)
        return base

    def atom(self) -> Expression:
        kind, value, pos = self.advance()
        if kind == "num":
            literal = float(value)
            if not math.isfinite(literal):
                raise ParseError(f"numeric literal {value!r} overflows", pos)
            return Num(literal, pos=pos)
        if kind == "ident":
            next_kind, next_value, _ = self.peek()
            if next_kind == "op" and next_value == "(":
                if value not in FUNCTIONS:
                    raise UnknownIdentifierError(f"unknown function {value!r}", pos)
                self.advance()
                args = [self.sum()]
                while True:
                    k2, v2, p2 = self.peek()
                    if k2 == "op" and v2 == ",":
                        self.advance()
                        args.append(self.sum())
                    else:
                        break
                self.expect_op(")")
                if len(args) != FUNCTIONS[value]:
                    raise ArityError(
                        f"{value} takes {FUNCTIONS[value]} argument(s), got {len(args)}",
                        pos,
                    )
                return Call(value, tuple(args), pos=pos)
            if value not in VARIABLES:
                raise UnknownIdentifierError(f"unknown identifier {value!r}", pos)
            return Var(value, pos=pos)
        if kind == "op" and value == "(":
            node = self.sum()
            self.expect_op(")")
            return node
        raise ParseError(
            f"found {value!r}" if kind != "end" else "unexpected end of input",
            pos,
            expected=("number", "identifier", "'('", "'-'"),
        )


def parse(text: str) -> Expression:
    """Parse an expression; errors carry a 1-based byte offset."""
    return _Parser(text).parse()


def variables(e: Expression) -> set[str]:
    """Names of the free variables appearing in e."""
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Neg):
        return variables(e.operand)
    if isinstance(e, BinOp):
        return variables(e.left) | variables(e.right)
    if isinstance(e, Call):
        out: set[str] = set()
        for arg in e.args:
            out |= variables(arg)
        return out
    return set()


def _check_finite(value: float, where: int, what: str) -> float:
    if not math.isfinite(value):
        raise EvalDomainError(f"{what} is not finite", where)
    return value


def _power(base: float, exponent: float, pos: int) -> float:
    if base == 0.0 and exponent < 0.0:
        raise EvalDomainError("zero raised to a negative power", pos)
    if base < 0.0 and exponent != math.floor(exponent):
        raise EvalDomainError("negative base with non-integer exponent", pos)
    try:
        return math.pow(base, exponent)
    except (OverflowError, ValueError) as exc:
        raise EvalDomainError(f"power evaluation failed: {exc}", pos) from None


def evaluate(e: Expression, x: float, t: float) -> float:
    """Evaluate e at (x, t); domain violations raise EvalDomainError."""
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        return x if e.name == "x" else t
    if isinstance(e, Neg):
        return -evaluate(e.operand, x, t)
    if isinstance(e, BinOp):
        left = evaluate(e.left, x, t)
        right = evaluate(e.right, x, t)
        if e.op == "+":
            return _check_finite(left + right, e.pos, "sum")
        if e.op == "-":
            return _check_finite(left - right, e.pos, "difference")
        if e.op == "*":
            return _check_finite(left * right, e.pos, "product")
        if e.op == "/":
            if right == 0.0:
                raise EvalDomainError("division by zero", e.pos)
            return _check_finite(left / right, e.pos, "quotient")
        return _check_finite(_power(left, right, e.pos), e.pos, "power")
    # Call
    args = [evaluate(arg, x, t) for arg in e.args]
    name = e.func
    if name == "gamma":
        if args[0] <= 0.0:
            raise EvalDomainError("gamma requires a positive argument", e.pos)
        try:
            return _check_finite(_gamma(args[0]), e.pos, "gamma")
        except OverflowError:
            raise EvalDomainError("gamma overflow", e.pos) from None
    if name == "sqrt":
        if args[0] < 0.0:
            raise EvalDomainError("sqrt of a negative number", e.pos)
        return math.sqrt(args[0])
    if name == "abs":
        return abs(args[0])
    if name == "exp":
        try:
            return _check_finite(math.exp(args[0]), e.pos, "exp")
        except OverflowError:
            raise EvalDomainError("exp overflow", e.pos) from None
    if name == "ln":
        if args[0] <= 0.0:
            raise EvalDomainError("ln requires a positive argument", e.pos)
        return math.log(args[0])
    if name == "sin":
        return math.sin(args[0])
    if name == "cos":
        return math.cos(args[0])
    if name == "pow":
        return _check_finite(_power(args[0], args[1], e.pos), e.pos, "power")
    # max
    return max(args[0], args[1])


_LEVEL_ADD = 1
_LEVEL_MUL = 2
_LEVEL_NEG = 3
_LEVEL_POW = 4
_LEVEL_ATOM = 5


def _fmt(e: Expression, min_level: int) -> str:
    if isinstance(e, Num):
        body, level = repr(e.value), _LEVEL_ATOM
    elif isinstance(e, Var):
        body, level = e.name, _LEVEL_ATOM
    elif isinstance(e, Call):
        body = f"{e.func}({', '.join(_fmt(a, _LEVEL_ADD) for a in e.args)})"
        level = _LEVEL_ATOM
    elif isinstance(e, Neg):
        body, level = f"-{_fmt(e.operand, _LEVEL_NEG)}", _LEVEL_NEG
    elif e.op in "+-":
        body = f"{_fmt(e.left, _LEVEL_ADD)} {e.op} {_fmt(e.right, _LEVEL_MUL)}"
        level = _LEVEL_ADD
    elif e.op in "*/":
        body = f"{_fmt(e.left, _LEVEL_MUL)}{e.op}{_fmt(e.right, _LEVEL_NEG)}"
        level = _LEVEL_MUL
    else:  # ^ is right-associative; its base must be an atom
        body = f"{_fmt(e.left, _LEVEL_ATOM)}^{_fmt(e.right, _LEVEL_NEG)}"
        level = _LEVEL_POW
    if level < min_level:
        return f"({body})"
    return body


def to_string(e: Expression) -> str:
    """Render e so that parse(to_string(e)) is structurally identical to e."""
    return _fmt(e, _LEVEL_ADD)

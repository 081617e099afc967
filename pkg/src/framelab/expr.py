"""Scalar expression language with exact forward-mode differentiation.

Expressions are parsed from text into an immutable AST and evaluated as
truncated Taylor jets, so every partial derivative up to the requested order
is exact (no finite differencing anywhere in this path).

Grammar (see docs/expression-grammar.md for the EBNF):

    expr   : term (("+" | "-") term)*          left associative
    term   : unary (("*" | "/") unary)*        left associative
    unary  : "-" unary | power
    power  : atom ("^" unary)?                 right associative
    atom   : NUMBER | "pi" | FUNC "(" expr ")" | VARIABLE | "(" expr ")"

Functions: sin cos tan exp log sqrt sinh cosh tanh. Variables are the
declared prefix followed by an index, e.g. u1..u3 or x1..x5.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .jets import (
    Jet,
    JetSpace,
    get_space,
    jcos,
    jcosh,
    jexp,
    jlog,
    jpow_int,
    jsin,
    jsinh,
    jsqrt,
)

__all__ = [
    "Span",
    "Num",
    "Var",
    "PiConst",
    "Neg",
    "Bin",
    "Call",
    "Expression",
    "ExprJet",
    "ExprError",
    "ParseError",
    "DomainError",
    "parse",
    "to_source",
    "eval_jet",
    "eval_expr",
    "MAX_ORDER",
    "FUNCTIONS",
]

MAX_ORDER = 3

FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt", "sinh", "cosh", "tanh")


class ExprError(ValueError):
    """Base class for expression failures."""


class ParseError(ExprError):
    """Syntax or name resolution failure, located by byte offset."""

    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        self.offset = offset
        self.expected = expected
        if expected:
            message = f"{message} (expected {', '.join(expected)})"
        super().__init__(f"at byte {offset}: {message}")


class DomainError(ExprError):
    """Evaluation left the domain of a sub-expression."""

    def __init__(self, message: str, span: Span):
        self.span = span
        super().__init__(f"{message} in sub-expression at bytes {span.start}..{span.end}")


@dataclass(frozen=True)
class Span:
    start: int
    end: int


@dataclass(frozen=True)
class Num:
    value: float
    span: Span = field(compare=False, repr=False)


@dataclass(frozen=True)
class Var:
    name: str
    index: int  # 1-based
    span: Span = field(compare=False, repr=False)


@dataclass(frozen=True)
class PiConst:
    span: Span = field(compare=False, repr=False)


@dataclass(frozen=True)
class Neg:
    arg: "Expression"
    span: Span = field(compare=False, repr=False)


@dataclass(frozen=True)
class Bin:
    op: str  # one of + - * / ^
    left: "Expression"
    right: "Expression"
    span: Span = field(compare=False, repr=False)


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Expression"
    span: Span = field(compare=False, repr=False)


Expression = Union[Num, Var, PiConst, Neg, Bin, Call]


# -- tokenizer ---------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # number | ident | op | end
    text: str
    start: int
    end: int


def _byte_offsets(source: str) -> list[int]:
    offs = [0]
    for ch in source:
        offs.append(offs[-1] + len(ch.encode("utf-8")))
    return offs


def _tokenize(source: str) -> list[_Token]:
    boff = _byte_offsets(source)
    toks = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}", boff[pos])
        if m.lastgroup != "ws":
            kind = {"number": "number", "ident": "ident", "op": "op"}[m.lastgroup]
            toks.append(_Token(kind, m.group(), boff[m.start()], boff[m.end()]))
        pos = m.end()
    toks.append(_Token("end", "", boff[len(source)], boff[len(source)]))
    return toks


# -- parser ------------------------------------------------------------------


class _Parser:
    def __init__(self, source: str, dim: int, var_prefix: str):
        if not source.strip():
            raise ParseError("empty expression", 0)
        if not 1 <= dim <= 9:
            raise ValueError(f"dimension must be between 1 and 9, got {dim}")
        self.toks = _tokenize(source)
        self.k = 0
        self.dim = dim
        self.prefix = var_prefix

    def peek(self) -> _Token:
        return self.toks[self.k]

    def advance(self) -> _Token:
        t = self.toks[self.k]
        self.k += 1
        return t

    def fail(self, expected: tuple[str, ...]):
        t = self.peek()
        got = "end of input" if t.kind == "end" else repr(t.text)
        raise ParseError(f"unexpected {got}", t.start, expected)

    def parse(self) -> Expression:
        e = self.expr()
        if self.peek().kind != "end":
            self.fail(("operator", "end of input"))
        return e

    def expr(self) -> Expression:
        e = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.advance().text
            r = self.term()
            e = Bin(op, e, r, Span(e.span.start, r.span.end))
        return e

    def term(self) -> Expression:
        e = self.unary()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.advance().text
            r = self.unary()
            e = Bin(op, e, r, Span(e.span.start, r.span.end))
        return e

    def unary(self) -> Expression:
        t = self.peek()
        if t.kind == "op" and t.text == "-":
            self.advance()
            arg = self.unary()
            return Neg(arg, Span(t.start, arg.span.end))
        return self.power()

    def power(self) -> Expression:
        base = self.atom()
        t = self.peek()
        if t.kind == "op" and t.text == "^":
            self.advance()
            exponent = self.unary()  # right associative
            return Bin("^", base, exponent, Span(base.span.start, exponent.span.end))
        return base

    def atom(self) -> Expression:
        t = self.peek()
        if t.kind == "number":
            self.advance()
            return Num(float(t.text), Span(t.start, t.end))
        if t.kind == "op" and t.text == "(":
            self.advance()
            e = self.expr()
            c = self.peek()
            if not (c.kind == "op" and c.text == ")"):
                self.fail(("')'",))
            self.advance()
            return e
        if t.kind == "ident":
            self.advance()
            name = t.text
            if name == "pi":
                return PiConst(Span(t.start, t.end))
            if name in FUNCTIONS:
                o = self.peek()
                if not (o.kind == "op" and o.text == "("):
                    self.fail(("'('",))
                self.advance()
                arg = self.expr()
                c = self.peek()
                if not (c.kind == "op" and c.text == ")"):
                    self.fail(("')'",))
                close = self.advance()
                return Call(name, arg, Span(t.start, close.end))
            return self.variable(t)
        self.fail(("number", "variable", "function", "'pi'", "'('", "'-'"))

    def variable(self, t: _Token) -> Var:
        name = t.text
        if name.startswith(self.prefix):
            digits = name[len(self.prefix):]
            if digits.isdigit() and (len(digits) == 1 or digits[0] != "0"):
                index = int(digits)
                if not 1 <= index <= self.dim:
                    raise ParseError(
                        f"variable {name!r} out of range for dimension {self.dim}",
                        t.start,
                    )
                return Var(name, index, Span(t.start, t.end))
        raise ParseError(f"unknown identifier {name!r}", t.start)


def parse(source: str, dim: int, var_prefix: str = "u") -> Expression:
    """Parse `source` over variables `<var_prefix>1 .. <var_prefix><dim>`."""
    return _Parser(source, dim, var_prefix).parse()


# -- canonical printer ---------------------------------------------------------

_PREC_ATOM = 5
_PREC_POW = 4
_PREC_NEG = 3
_PREC_MUL = 2
_PREC_ADD = 1


def _prec(e: Expression) -> int:
    if isinstance(e, (Num, Var, PiConst, Call)):
        return _PREC_ATOM
    if isinstance(e, Neg):
        return _PREC_NEG
    if e.op == "^":
        return _PREC_POW
    if e.op in "*/":
        return _PREC_MUL
    return _PREC_ADD


def to_source(e: Expression) -> str:
    """Canonical rendering; parse(to_source(e)) reproduces the AST exactly."""
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, PiConst):
        return "pi"
    if isinstance(e, Call):
        return f"{e.fn}({to_source(e.arg)})"
    if isinstance(e, Neg):
        s = to_source(e.arg)
        if _prec(e.arg) < _PREC_NEG:
            s = f"({s})"
        return f"-{s}"
    # binary
    p = _prec(e)
    ls, rs = to_source(e.left), to_source(e.right)
    if e.op == "^":
        # right associative: parenthesize a left child at or below our level
        if _prec(e.left) <= p:
            ls = f"({ls})"
        if _prec(e.right) < p:
            rs = f"({rs})"
    else:
        if _prec(e.left) < p:
            ls = f"({ls})"
        if _prec(e.right) <= p:
            rs = f"({rs})"
    return f"{ls}{e.op}{rs}"


# -- evaluation ----------------------------------------------------------------


def _is_constant(j: Jet) -> bool:
    return not np.any(j.coeffs[..., 1:])


def eval_expr(e: Expression, varjets: list[Jet], space: JetSpace) -> Jet:
    """Evaluate to a raw jet over pre-built variable jets (any order)."""
    if isinstance(e, Num):
        return space.constant(e.value)
    if isinstance(e, PiConst):
        return space.constant(math.pi)
    if isinstance(e, Var):
        if e.index > len(varjets):
            raise DomainError(
                f"variable {e.name} exceeds the evaluation dimension", e.span
            )
        return varjets[e.index - 1]
    if isinstance(e, Neg):
        return -eval_expr(e.arg, varjets, space)
    if isinstance(e, Call):
        a = eval_expr(e.arg, varjets, space)
        if e.fn == "sin":
            return jsin(a)
        if e.fn == "cos":
            return jcos(a)
        if e.fn == "exp":
            return jexp(a)
        if e.fn == "sinh":
            return jsinh(a)
        if e.fn == "cosh":
            return jcosh(a)
        if e.fn == "tan":
            c = jcos(a)
            if np.any(c.val == 0.0):
                raise DomainError("tan at a pole", e.span)
            return jsin(a) / c
        if e.fn == "tanh":
            return jsinh(a) / jcosh(a)
        if e.fn == "log":
            if np.any(a.val <= 0.0):
                raise DomainError("log of a non-positive value", e.span)
            return jlog(a)
        if e.fn == "sqrt":
            if np.any(a.val < 0.0):
                raise DomainError("sqrt of a negative value", e.span)
            if space.order >= 1 and np.any(a.val == 0.0):
                raise DomainError("sqrt is not differentiable at zero", e.span)
            return jsqrt(a)
        raise AssertionError(f"unhandled function {e.fn}")
    # binary
    l = eval_expr(e.left, varjets, space)
    if e.op == "+":
        return l + eval_expr(e.right, varjets, space)
    if e.op == "-":
        return l - eval_expr(e.right, varjets, space)
    if e.op == "*":
        return l * eval_expr(e.right, varjets, space)
    if e.op == "/":
        r = eval_expr(e.right, varjets, space)
        if np.any(r.val == 0.0):
            raise DomainError("division by zero", e.span)
        return l / r
    if e.op == "^":
        r = eval_expr(e.right, varjets, space)
        rv = r.val
        if _is_constant(r) and np.all(rv == np.floor(rv)) and np.all(np.abs(rv) < 2**31):
            n = int(np.asarray(rv).flat[0])
            if n < 0 and np.any(l.val == 0.0):
                raise DomainError("zero raised to a negative power", e.span)
            return jpow_int(l, n)
        # non-integer exponent: b^r = exp(r log b), requires b > 0
        if np.any(l.val <= 0.0):
            raise DomainError(
                "non-positive base raised to a non-integer power", e.span
            )
        return jexp(r * jlog(l))
    raise AssertionError(f"unhandled operator {e.op}")


@dataclass(frozen=True)
class ExprJet:
    """Value and exact partial derivatives at a point.

    Partials are keyed by multi-index: the tuple entry alpha[i] is the number
    of derivatives in variable i+1, so for dim 2 the key (1, 1) holds the
    mixed derivative d^2/du1 du2. Symmetry of mixed partials is exact because
    a multi-index cannot distinguish differentiation orders.
    """

    value: float
    partials: dict[tuple[int, ...], float]
    order: int
    dim: int

    def partial(self, alpha) -> float:
        return self.partials[tuple(alpha)]


def eval_jet(e: Expression, point, order: int) -> ExprJet:
    """Evaluate with all exact partial derivatives of total order <= `order`."""
    if not 0 <= order <= MAX_ORDER:
        raise ValueError(f"order must be in 0..{MAX_ORDER}, got {order}")
    pt = [float(c) for c in point]
    dim = len(pt)
    space = get_space(dim, order)
    j = eval_expr(e, space.variables(np.array(pt)), space)
    partials = {
        alpha: float(j.partial(alpha))
        for alpha in space.multi_indices
    }
    return ExprJet(float(j.val), partials, order, dim)

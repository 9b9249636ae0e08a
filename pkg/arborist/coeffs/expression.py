#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

"""
Coefficient expressions.

Drift and diffusion coefficients are written as small arithmetic expressions
in the edge coordinate ``x``. Importable functions include:

* parse
* evaluate
* pretty

Grammar: numbers (``2``, ``0.5``, ``1e-3``), the constant ``pi``, the
variable ``x``, binary ``+ - * / ^``, unary ``-``, parentheses and the
functions ``sin cos exp log sqrt tanh``. ``^`` binds tightest and groups to
the right, then unary minus, then ``* /``, then ``+ -``. Whitespace is
ignored.
"""

import math
import typing as t
from dataclasses import dataclass

import numpy as np
import regex

from ..errors import ExpressionDomainError, ExpressionSyntaxError


FUNCTIONS: t.Dict[str, t.Callable] = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "tanh": np.tanh,
}
CONSTANTS = {"pi": math.pi}
VARIABLE = "x"

_TOKEN = regex.compile(
    r"""
    (?P<space>\s+)
    |(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)
    |(?P<name>[a-z]+)
    |(?P<op>[-+*/^()])
    """,
    regex.VERBOSE,
)

_BINDING = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 40}
_UNARY_BINDING = 30


@dataclass(frozen=True)
class Number:
    value: float


@dataclass(frozen=True)
class Constant:
    name: str


@dataclass(frozen=True)
class Variable:
    name: str = VARIABLE


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Expression"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Call:
    name: str
    argument: "Expression"


Expression = t.Union[Number, Constant, Variable, Unary, Binary, Call]


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    position: int


def _tokenize(text: str) -> t.List[_Token]:
    tokens = []
    position = 0
    while position < len(text):
        match = _TOKEN.match(text, position)
        if match is None:
            raise ExpressionSyntaxError(f"unexpected character {text[position]!r}", position)
        if match.lastgroup != "space":
            tokens.append(_Token(match.lastgroup, match.group(), position))
        position = match.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    """Pratt parser over the token list"""

    def __init__(self, text: str):
        self._tokens = _tokenize(text)
        self._index = 0

    def _peek(self) -> _Token:
        return self._tokens[self._index]

    def _advance(self) -> _Token:
        token = self._tokens[self._index]
        if token.kind != "end":
            self._index += 1
        return token

    def _expect(self, text: str):
        token = self._advance()
        if token.text != text:
            raise ExpressionSyntaxError(f"expected {text!r}, found {_describe(token)}", token.position)

    def _binding(self, token: _Token) -> int:
        if token.kind == "op":
            return _BINDING.get(token.text, 0)
        return 0

    def parse(self) -> Expression:
        tree = self._expression(0)
        token = self._peek()
        if token.kind != "end":
            raise ExpressionSyntaxError(f"unexpected {_describe(token)}", token.position)
        return tree

    def _expression(self, right_binding: int) -> Expression:
        left = self._prefix(self._advance())
        while right_binding < self._binding(self._peek()):
            left = self._infix(self._advance(), left)
        return left

    def _prefix(self, token: _Token) -> Expression:
        if token.kind == "number":
            value = float(token.text)
            if not math.isfinite(value):
                raise ExpressionSyntaxError(f"literal {token.text} overflows", token.position)
            return Number(value)
        if token.kind == "name":
            if token.text == VARIABLE:
                return Variable()
            if token.text in CONSTANTS:
                return Constant(token.text)
            if token.text in FUNCTIONS:
                self._expect("(")
                argument = self._expression(0)
                self._expect(")")
                return Call(token.text, argument)
            raise ExpressionSyntaxError(f"unknown identifier {token.text!r}", token.position)
        if token.text == "-":
            return Unary("-", self._expression(_UNARY_BINDING))
        if token.text == "(":
            inner = self._expression(0)
            self._expect(")")
            return inner
        raise ExpressionSyntaxError(f"unexpected {_describe(token)}", token.position)

    def _infix(self, token: _Token, left: Expression) -> Expression:
        binding = _BINDING[token.text]
        if token.text == "^":
            binding -= 1
        return Binary(token.text, left, self._expression(binding))


def _describe(token: _Token) -> str:
    return "end of input" if token.kind == "end" else f"{token.text!r}"


def parse(text: str) -> Expression:
    """Parse an expression in ``x``.

    Args:
        text: expression source, e.g. ``"1 + 0.5*sin(2*pi*x)"``

    Returns:
        the abstract syntax tree

    Raises:
        ExpressionSyntaxError: malformed text or unknown identifier; the
            exception carries the 0-based ``position`` of the offending token
    """
    if not text or not text.strip():
        raise ExpressionSyntaxError("empty expression", 0)
    return _Parser(text).parse()


def pretty(expr: Expression) -> str:
    """Fully parenthesized source text that parses back to ``expr``"""
    if isinstance(expr, Number):
        return repr(expr.value)
    if isinstance(expr, (Constant, Variable)):
        return expr.name
    if isinstance(expr, Unary):
        return f"({expr.op}{pretty(expr.operand)})"
    if isinstance(expr, Binary):
        return f"({pretty(expr.left)} {expr.op} {pretty(expr.right)})"
    if isinstance(expr, Call):
        return f"{expr.name}({pretty(expr.argument)})"
    raise TypeError(f"not an expression: {expr!r}")


def _walk(expr: Expression, x: np.ndarray):
    if isinstance(expr, Number):
        return np.float64(expr.value)
    if isinstance(expr, Constant):
        return np.float64(CONSTANTS[expr.name])
    if isinstance(expr, Variable):
        return x
    if isinstance(expr, Unary):
        return np.negative(_walk(expr.operand, x))
    if isinstance(expr, Call):
        return FUNCTIONS[expr.name](_walk(expr.argument, x))
    left, right = _walk(expr.left, x), _walk(expr.right, x)
    if expr.op == "+":
        return np.add(left, right)
    if expr.op == "-":
        return np.subtract(left, right)
    if expr.op == "*":
        return np.multiply(left, right)
    if expr.op == "/":
        return np.divide(left, right)
    return np.power(left, right)


def evaluate(expr: t.Union[Expression, str], x):
    """Evaluate an expression at one point or an array of points.

    Args:
        expr: parsed expression (strings are parsed first)
        x: scalar or array of coordinates

    Returns:
        float for scalar ``x``, otherwise an array shaped like ``x``

    Raises:
        ExpressionDomainError: the expression is undefined or overflows at
            some point (log of a nonpositive number, division by zero, ...)
    """
    if isinstance(expr, str):
        expr = parse(expr)
    points = np.asarray(x, dtype=float)
    try:
        with np.errstate(divide="raise", invalid="raise", over="raise"):
            values = _walk(expr, points)
    except (FloatingPointError, ZeroDivisionError) as err:
        raise ExpressionDomainError(f"cannot evaluate {pretty(expr)}: {err}") from None
    values = np.broadcast_to(np.asarray(values, dtype=float), points.shape)
    if not np.all(np.isfinite(values)):
        raise ExpressionDomainError(f"{pretty(expr)} is not finite on the requested points")
    if values.ndim == 0:
        return float(values)
    return np.array(values)

#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

import math

import numpy as np
import pytest

from arborist.coeffs.expression import (
    Binary,
    Call,
    Constant,
    Number,
    Unary,
    Variable,
    evaluate,
    parse,
    pretty,
)
from arborist.errors import ExpressionDomainError, ExpressionSyntaxError


@pytest.mark.parametrize(
    "text,exp",
    [
        ("2", Number(2.0)),
        ("x", Variable()),
        ("pi", Constant("pi")),
        ("1 + 2*x", Binary("+", Number(1.0), Binary("*", Number(2.0), Variable()))),
        ("-x^2", Unary("-", Binary("^", Variable(), Number(2.0)))),
        ("2^3^2", Binary("^", Number(2.0), Binary("^", Number(3.0), Number(2.0)))),
        ("1 - 2 - 3", Binary("-", Binary("-", Number(1.0), Number(2.0)), Number(3.0))),
        ("sin(x)", Call("sin", Variable())),
        ("((x))", Variable()),
        ("1e-3", Number(0.001)),
        (".5", Number(0.5)),
    ],
)
def test_parse(text, exp):
    assert parse(text) == exp


@pytest.mark.parametrize(
    "text,x,exp",
    [
        ("1 + 2*3", 0.0, 7.0),
        ("-2^2", 0.0, -4.0),
        ("2^3^2", 0.0, 512.0),
        ("8 / 2 / 2", 0.0, 2.0),
        ("1 + 0.3*sin(2*pi*x)", 0.25, 1.3),
        ("exp(log(x))", 2.5, 2.5),
        ("sqrt(x) * tanh(0)", 4.0, 0.0),
        ("cos(pi)", 0.0, -1.0),
        ("x - -x", 1.5, 3.0),
    ],
)
def test_evaluate(text, x, exp):
    assert evaluate(text, x) == pytest.approx(exp, rel=1e-15, abs=1e-15)


def test_evaluate_returns_float_for_scalars():
    assert isinstance(evaluate("x", 1.0), float)
    assert isinstance(evaluate("2", 1.0), float)


def test_evaluate_broadcasts_constants():
    values = evaluate("3", np.linspace(0, 1, 5))
    np.testing.assert_array_equal(values, np.full(5, 3.0))


def test_evaluate_vectorized():
    x = np.linspace(0.0, 1.0, 11)
    np.testing.assert_allclose(evaluate("x^2 - x", x), x ** 2 - x, rtol=1e-15)


@pytest.mark.parametrize(
    "text,position",
    [
        ("", 0),
        ("   ", 0),
        ("1 +", 3),
        ("(1", 2),
        ("1 $ 2", 2),
        ("2 * y", 4),
        ("sin x", 4),
        ("foo(x)", 0),
        ("1 2", 2),
        (")", 0),
    ],
)
def test_syntax_errors(text, position):
    with pytest.raises(ExpressionSyntaxError) as info:
        parse(text)
    assert info.value.position == position
    assert f"at position {position}" in str(info.value)


@pytest.mark.parametrize(
    "text,x",
    [
        ("log(x)", 0.0),
        ("1 / x", 0.0),
        ("sqrt(x)", -1.0),
        ("exp(x)", 1000.0),
    ],
)
def test_domain_errors(text, x):
    with pytest.raises(ExpressionDomainError):
        evaluate(text, x)


def test_domain_error_on_any_point():
    with pytest.raises(ExpressionDomainError):
        evaluate("log(x)", np.array([1.0, 0.5, 0.0]))


@pytest.mark.parametrize(
    "text",
    ["1 + 0.3*sin(2*pi*x)", "-x^2", "2^3^2", "(1 - x) / (1 + x)", "0.4*(1 + 0.2*sin(2*pi*x))^2"],
)
def test_pretty_parses_back(text):
    expr = parse(text)
    assert parse(pretty(expr)) == expr
    assert evaluate(pretty(expr), 0.3) == evaluate(expr, 0.3)


def test_pi_is_exact():
    assert evaluate("pi", 0.0) == math.pi

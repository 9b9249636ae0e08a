#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

"""
Exceptions raised by arborist.

Everything derives from ``ArboristError`` so callers (and the command line
interface) can catch the whole family at once. Most classes also derive from
the closest builtin, so ``except ValueError`` keeps working for input
problems.
"""


class ArboristError(Exception):
    """Base class for all arborist errors"""


class GraphError(ArboristError, ValueError):
    """Invalid metric graph, cut set, or arborescence request"""


class ExpressionError(ArboristError, ValueError):
    """Base class for coefficient expression problems"""


class ExpressionSyntaxError(ExpressionError):
    """Malformed expression text.

    Args:
        message: description of the problem
        position: 0-based offset into the source text
    """

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class ExpressionDomainError(ExpressionError, ArithmeticError):
    """Expression evaluated outside its domain (log of a nonpositive number,
    division by zero, ...)"""


class CoefficientError(ArboristError, ValueError):
    """Coefficients or vertex parameters violating their constraints"""


class ConvergenceError(ArboristError, ArithmeticError):
    """Quadrature or interpolation failed to converge"""


class NumericalConsistencyError(ArboristError):
    """Results that should agree by theory do not, or a linear system is
    singular beyond its expected rank deficiency"""


class MethodNotApplicableError(ArboristError):
    """A method was requested for an input it does not support"""


class ConfigError(ArboristError, ValueError):
    """Invalid model configuration.

    Args:
        message: description of the problem
        location: dotted path into the configuration document
    """

    def __init__(self, message: str, location: str = ""):
        text = f"{location}: {message}" if location else message
        super().__init__(text)
        self.location = location
        self.reason = message

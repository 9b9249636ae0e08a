#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

"""
Quadrature on intervals.

Importable functions include:

* integrate
* CumulativeIntegral

Integrands are vectorized callables: they receive a 1-d array of abscissae
and return an array of the same shape.
"""

import functools
import logging
import typing as t

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import BarycentricInterpolator

from ..errors import ConvergenceError


logger = logging.getLogger(__name__)

Integrand = t.Callable[[np.ndarray], np.ndarray]

MAX_CUMULATIVE_DEGREE = 512


@functools.lru_cache(maxsize=None)
def gauss_legendre(order: int) -> t.Tuple[np.ndarray, np.ndarray]:
    """Gauss–Legendre nodes and weights on [-1, 1]"""
    nodes, weights = leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def panel_sums(
    f: Integrand,
    lower: np.ndarray,
    upper: np.ndarray,
    order: int = 16,
    panels: int = 1,
) -> t.Tuple[np.ndarray, np.ndarray]:
    """Composite Gauss–Legendre over many intervals at once.

    Each interval ``[lower[i], upper[i]]`` is split into ``panels`` equal
    panels with an ``order``-point rule on each.

    Returns:
        the integrals of ``f`` and of ``|f|`` over each interval
    """
    lower = np.atleast_1d(np.asarray(lower, dtype=float))
    upper = np.atleast_1d(np.asarray(upper, dtype=float))
    nodes, weights = gauss_legendre(order)
    fractions = np.linspace(0.0, 1.0, panels + 1)
    cuts = lower[:, None] + (upper - lower)[:, None] * fractions[None, :]
    left, right = cuts[:, :-1].ravel(), cuts[:, 1:].ravel()
    half = (right - left) / 2
    points = (left + right)[:, None] / 2 + half[:, None] * nodes[None, :]
    values = np.asarray(f(points.ravel()), dtype=float).reshape(points.shape)
    signed = (values @ weights) * half
    absolute = (np.abs(values) @ weights) * np.abs(half)
    shape = (lower.size, panels)
    return signed.reshape(shape).sum(axis=1), absolute.reshape(shape).sum(axis=1)


def integrate(
    f: Integrand,
    a: float,
    b: float,
    tol: float = 1e-10,
    order: int = 16,
    max_refinements: int = 12,
) -> float:
    """Integrate ``f`` over the oriented interval from ``a`` to ``b``.

    The panel count doubles until two successive estimates differ by at most
    ``tol`` relative to the integral of ``|f|``. Swapping the limits flips
    the sign.

    Args:
        f: vectorized integrand
        a: lower limit
        b: upper limit
        tol: relative tolerance
        order: Gauss–Legendre points per panel
        max_refinements: maximum number of panel doublings

    Returns:
        the integral

    Raises:
        ConvergenceError: the estimates do not settle within ``max_refinements``
    """
    if a == b:
        return 0.0
    if a > b:
        return -integrate(f, b, a, tol, order, max_refinements)
    (previous,), _ = panel_sums(f, a, b, order, 1)
    for refinement in range(1, max_refinements + 1):
        (current,), (magnitude,) = panel_sums(f, a, b, order, 2 ** refinement)
        if abs(current - previous) <= tol * max(abs(current), magnitude):
            logger.debug("integral on [%g, %g] settled with %d panels", a, b, 2 ** refinement)
            return float(current)
        previous = current
    msg = f"integral on [{a}, {b}] did not converge after {max_refinements} refinements"
    raise ConvergenceError(msg)


def chebyshev_points(a: float, b: float, degree: int) -> np.ndarray:
    """Chebyshev points of the second kind on [a, b], ascending, endpoints included"""
    angles = np.pi * np.arange(degree + 1) / degree
    points = (a + b) / 2 - (b - a) / 2 * np.cos(angles)
    points[0], points[-1] = a, b
    return points


class CumulativeIntegral:
    """Antiderivative ``F(x) = ∫_a^x f`` as a cached interpolation table.

    ``F`` is tabulated at Chebyshev points by summing Gauss–Legendre
    integrals over the gaps between consecutive points, then evaluated
    anywhere on ``[a, b]`` by barycentric interpolation. The point count
    doubles until the previous table reproduces the new values to ``tol``.

    Args:
        f: vectorized integrand
        a: left end of the interval
        b: right end of the interval
        tol: relative tolerance
        order: Gauss–Legendre points per panel
        max_refinements: maximum number of panel doublings per gap
    """

    def __init__(
        self,
        f: Integrand,
        a: float,
        b: float,
        tol: float = 1e-10,
        order: int = 16,
        max_refinements: int = 12,
    ):
        self.a, self.b = float(a), float(b)
        self._f = f
        self._tol = tol
        self._order = order
        self._max_refinements = max_refinements
        self.nodes, self.values = self._tabulate()
        self._interpolator = BarycentricInterpolator(self.nodes, self.values)

    @property
    def total(self) -> float:
        """``F(b)``"""
        return float(self.values[-1])

    def __call__(self, x):
        points = np.clip(np.asarray(x, dtype=float), self.a, self.b)
        values = self._interpolator(points)
        if np.ndim(values) == 0:
            return float(values)
        return np.asarray(values, dtype=float)

    def _cumulative(self, points: np.ndarray) -> np.ndarray:
        lower, upper = points[:-1], points[1:]
        previous, _ = panel_sums(self._f, lower, upper, self._order, 1)
        for refinement in range(1, self._max_refinements + 1):
            current, magnitude = panel_sums(self._f, lower, upper, self._order, 2 ** refinement)
            if np.max(np.abs(current - previous)) <= self._tol * max(magnitude.sum(), 1e-300):
                return np.concatenate([[0.0], np.cumsum(current)])
            previous = current
        msg = f"gap integrals on [{self.a}, {self.b}] did not converge"
        raise ConvergenceError(msg)

    def _tabulate(self) -> t.Tuple[np.ndarray, np.ndarray]:
        degree = 16
        previous = None
        while degree <= MAX_CUMULATIVE_DEGREE:
            points = chebyshev_points(self.a, self.b, degree)
            values = self._cumulative(points)
            if previous is not None:
                scale = max(np.max(np.abs(values)), 1e-300)
                if np.max(np.abs(previous(points) - values)) <= self._tol * scale:
                    logger.debug(
                        "cumulative table on [%g, %g] uses %d points", self.a, self.b, degree + 1
                    )
                    return points, values
            previous = BarycentricInterpolator(points, values)
            degree *= 2
        msg = (
            f"cumulative integral on [{self.a}, {self.b}] needs more than "
            f"{MAX_CUMULATIVE_DEGREE + 1} interpolation points"
        )
        raise ConvergenceError(msg)

#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

"""
Random walks on a discretized ring or interval and their diffusive limit.

A walk is described microscopically by a vertex weight ``α``, a symmetric
edge weight ``Q`` and a field ``F``: it jumps from ``x`` to a neighbour ``y``
at rate ``α(x) Q((x+y)/2) e^{∫_x^y F}``, sped up by the inverse square of the
mesh. Any ``F`` whose integral over the ring equals that of ``s = b / σ²``
gives a walk converging to the diffusion with drift ``b`` and diffusion
coefficient ``σ``. Importable functions include:

* admissible_field
* micro_from_macro
* ring_walk
* interval_walk
* lattice_density
* scaling_error
* interval_scaling_error
* convergence_table
"""

import logging
import math
import typing as t
from dataclasses import dataclass

import numpy as np
import pandas as pd

from ..coeffs import CumulativeIntegral, Diffusion, EdgeProfile, evaluate, parse
from ..errors import CoefficientError, MethodNotApplicableError
from ..treemeasure import ring_density_closed_form
from .chain import FiniteChain, stationary_linear


logger = logging.getLogger(__name__)

Field = t.Callable[[np.ndarray], np.ndarray]

GAUGE_TOL = 1e-8


def admissible_field(profile: EdgeProfile, spec: t.Union[str, Field]) -> t.Tuple[str, Field]:
    """Resolve a field specification into a name and a vectorized callable.

    ``"s"`` selects ``F = s``; ``"mean"`` selects the constant mean of ``s``
    over the edge; any other string is parsed as an expression in ``x``.
    """
    if callable(spec):
        return getattr(spec, "__name__", "field"), spec
    if spec == "s":
        return spec, profile.s
    if spec == "mean":
        mean = profile.total_s / profile.length
        return spec, lambda x: np.full(np.shape(x), mean)
    expression = parse(spec)
    return spec, lambda x: evaluate(expression, x)


@dataclass
class MicroTriple:
    """Microscopic parametrization ``(α, Q, F)`` of a walk on one edge.

    The vertex weight is ``α(x) = σ²(x) e^{-W(x)} / (2c)`` and the edge weight
    ``Q(x) = c e^{W(x)}``, with ``W(x) = ∫₀ˣ 2(s - F)``, so that ``2 α Q = σ²``.

    Attributes:
        profile: the macroscopic coefficients the walk approximates
        field: the field ``F``
        potential: ``W``, tabulated
        field_integral: ``∫₀ˣ F``, tabulated
        c: the free positive constant
    """

    profile: EdgeProfile
    field: Field
    potential: CumulativeIntegral
    field_integral: CumulativeIntegral
    c: float = 1.0

    def alpha(self, x):
        return self.profile.sigma2(x) * np.exp(-self.potential(x)) / (2 * self.c)

    def Q(self, x):
        return self.c * np.exp(self.potential(x))

    def field_steps(self, points: np.ndarray) -> np.ndarray:
        """``∫ F`` over each gap between consecutive points"""
        return np.diff(self.field_integral(points))


def micro_from_macro(
    profile: EdgeProfile,
    field: t.Union[str, Field],
    c: float = 1.0,
    periodic: bool = True,
) -> MicroTriple:
    """Microscopic weights reproducing ``(b, σ)`` for a given field.

    Args:
        profile: macroscopic coefficients on the edge
        field: ``F``, see ``admissible_field``
        c: free positive constant in ``Q``
        periodic: the edge is a ring, so ``∫ F`` must equal ``∫ s``

    Raises:
        CoefficientError: ``c`` is not positive, or the ring condition fails
    """
    if not c > 0:
        raise CoefficientError(f"c must be positive, got {c}")
    _, f = admissible_field(profile, field)
    quadrature = profile.numerics.quadrature()
    field_integral = CumulativeIntegral(f, 0.0, profile.length, **quadrature)
    if periodic:
        gap = field_integral.total - profile.total_s
        if abs(gap) > GAUGE_TOL * max(1.0, abs(profile.total_s)):
            msg = (
                f"field integrates to {field_integral.total:.12g} over the ring but s integrates "
                f"to {profile.total_s:.12g}; the weights would not be periodic"
            )
            raise CoefficientError(msg)
    potential = CumulativeIntegral(
        lambda x: 2 * (profile.s(x) - f(x)), 0.0, profile.length, **quadrature
    )
    return MicroTriple(profile, f, potential, field_integral, c)


def ring_walk(triple: MicroTriple, n: int) -> FiniteChain:
    """Nearest-neighbour walk on ``n`` equally spaced points of the ring.

    Raises:
        MethodNotApplicableError: fewer than three points
    """
    if n < 3:
        raise MethodNotApplicableError(f"a ring walk needs at least 3 points, got {n}")
    length = triple.profile.length
    h = length / n
    points = np.linspace(0.0, length, n + 1)
    alpha = triple.alpha(points[:-1])
    q = triple.Q((points[:-1] + points[1:]) / 2)
    steps = triple.field_steps(points)
    rates = {}
    for i in range(n):
        j = (i + 1) % n
        rates[i, j] = alpha[i] * q[i] * math.exp(steps[i]) / h ** 2
        rates[j, i] = alpha[j] * q[i] * math.exp(-steps[i]) / h ** 2
    return FiniteChain.build(rates, states=range(n))


def interval_walk(triple: MicroTriple, n: int) -> FiniteChain:
    """Nearest-neighbour walk on ``n + 1`` points of an interval, reflected at the ends"""
    if n < 2:
        raise MethodNotApplicableError(f"an interval walk needs at least 2 cells, got {n}")
    length = triple.profile.length
    h = length / n
    points = np.linspace(0.0, length, n + 1)
    alpha = triple.alpha(points)
    q = triple.Q((points[:-1] + points[1:]) / 2)
    steps = triple.field_steps(points)
    rates = {}
    for i in range(n):
        rates[i, i + 1] = alpha[i] * q[i] * math.exp(steps[i]) / h ** 2
        rates[i + 1, i] = alpha[i + 1] * q[i] * math.exp(-steps[i]) / h ** 2
    return FiniteChain.build(rates, states=range(n + 1))


def lattice_density(chain: FiniteChain, length: float, periodic: bool = True) -> np.ndarray:
    """Stationary masses of a lattice walk turned into density values.

    On the ring each point carries a cell of width ``h``; on the interval
    the masses are rescaled so that their trapezoid integral is one.
    """
    pi = stationary_linear(chain)
    if periodic:
        return pi * len(pi) / length
    h = length / (len(pi) - 1)
    trapezoid = np.ones(len(pi))
    trapezoid[[0, -1]] = 0.5
    return pi / (h * np.sum(trapezoid * pi))


def _ring_profile(diffusion: Diffusion) -> EdgeProfile:
    graph = diffusion.graph
    if len(graph.edges) != 1 or not graph.edges[0].is_loop:
        raise MethodNotApplicableError("ring scaling needs a graph with a single loop")
    return diffusion.profile(graph.edges[0].id)


def scaling_error(
    diffusion: Diffusion,
    field: t.Union[str, Field],
    n: int,
    c: float = 1.0,
    limit: t.Optional[np.ndarray] = None,
) -> float:
    """Sup distance between a rescaled ring walk and the continuous density.

    Args:
        diffusion: a ring (single vertex, single loop)
        field: admissible field, see ``admissible_field``
        n: number of lattice points
        c: free constant of the microscopic weights
        limit: continuous density at the lattice points, if already known

    Returns:
        ``max_i |n μⁿ(x_i) / ℓ - μ(x_i)|``
    """
    profile = _ring_profile(diffusion)
    walk = ring_walk(micro_from_macro(profile, field, c), n)
    discrete = lattice_density(walk, profile.length)
    if limit is None:
        limit = ring_density_closed_form(diffusion, np.linspace(0.0, profile.length, n + 1)[:-1])
    return float(np.max(np.abs(discrete - limit)))


def interval_scaling_error(
    profile: EdgeProfile, field: t.Union[str, Field], n: int, c: float = 1.0
) -> float:
    """Sup distance between a reflected interval walk and ``e^{2I} / σ²``, normalized"""
    walk = interval_walk(micro_from_macro(profile, field, c, periodic=False), n)
    discrete = lattice_density(walk, profile.length, periodic=False)
    points = np.linspace(0.0, profile.length, n + 1)
    exact = np.exp(2 * profile.cumulative_s(points)) / profile.sigma2(points)
    exact = exact / profile.integrate(lambda y: np.exp(2 * profile.cumulative_s(y)) / profile.sigma2(y))
    return float(np.max(np.abs(discrete - exact)))


def convergence_table(
    diffusion: Diffusion,
    fields: t.Sequence[t.Union[str, Field]] = ("s", "mean"),
    sizes: t.Sequence[int] = (100, 200, 400, 800),
    c: float = 1.0,
) -> pd.DataFrame:
    """Scaling errors of ring walks over a sequence of lattice sizes.

    Returns:
        one row per lattice size with an ``error[<field>]`` and a
        ``ratio[<field>]`` column per field (previous error over current
        error), plus ``gauge_difference``, the sup distance between the
        rescaled walks of the first two fields
    """
    profile = _ring_profile(diffusion)
    rows = []
    previous: t.Dict[str, float] = {}
    for n in sorted(sizes):
        limit = ring_density_closed_form(diffusion, np.linspace(0.0, profile.length, n + 1)[:-1])
        row: t.Dict[str, float] = {"N": n}
        densities = []
        for field in fields:
            name, f = admissible_field(profile, field)
            walk = ring_walk(micro_from_macro(profile, f, c), n)
            density = lattice_density(walk, profile.length)
            densities.append(density)
            error = float(np.max(np.abs(density - limit)))
            row[f"error[{name}]"] = error
            row[f"ratio[{name}]"] = previous[name] / error if name in previous and error > 0 else np.nan
            previous[name] = error
        if len(densities) > 1:
            row["gauge_difference"] = float(np.max(np.abs(densities[0] - densities[1])))
        logger.debug("lattice size %d: %s", n, row)
        rows.append(row)
    return pd.DataFrame(rows)

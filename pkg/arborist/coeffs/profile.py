#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

"""
Edge coefficients and vertex parameters of a diffusion on a metric graph.

On every edge the process follows ``dX = b(X) dt + σ(X) dW``; at every
vertex it is described by a sojourn weight ``α_v``, one positive weight
``α_{v,e}`` per incident germ and a free constant ``K_v``. Importable
functions include:

* cumulative_s
* oriented_integral
* build_diffusion

Throughout, ``s = b / σ²`` and ``I(x) = ∫₀ˣ s`` is the single integral
stored by ``EdgeProfile``; formulas apply their own factors of two.
"""

import functools
import logging
import math
import typing as t
from dataclasses import dataclass, field

import numpy as np

from ..errors import CoefficientError, ConfigError, ExpressionDomainError, GraphError
from ..graph import Germ, MetricEdge, MetricGraph
from .expression import Expression, evaluate, parse, pretty
from .quadrature import CumulativeIntegral, integrate


logger = logging.getLogger(__name__)

POSITIVITY_SAMPLES = 1024


@dataclass(frozen=True)
class Numerics:
    """Numerical settings shared by every computation.

    Attributes:
        tol: relative tolerance of quadrature and interpolation
        order: Gauss–Legendre points per panel
        max_refinements: maximum number of panel doublings
        grid_size: output grid points per edge
        compare_tol: agreement threshold between methods
        bruteforce_order: Gauss–Legendre points per axis of the tensor rule
        max_bruteforce_dimension: largest cut-space dimension for tensor quadrature
    """

    tol: float = 1e-10
    order: int = 16
    max_refinements: int = 12
    grid_size: int = 257
    compare_tol: float = 1e-6
    bruteforce_order: int = 16
    max_bruteforce_dimension: int = 3

    def __post_init__(self):
        checks = {
            "tol": 0 < self.tol < 1,
            "order": self.order >= 2,
            "max_refinements": self.max_refinements >= 1,
            "grid_size": self.grid_size >= 3,
            "compare_tol": self.compare_tol > 0,
            "bruteforce_order": self.bruteforce_order >= 2,
            "max_bruteforce_dimension": self.max_bruteforce_dimension >= 0,
        }
        for name, ok in checks.items():
            if not ok:
                raise ConfigError(f"invalid value {getattr(self, name)!r}", f"numerics.{name}")

    def quadrature(self) -> t.Dict[str, t.Any]:
        return {"tol": self.tol, "order": self.order, "max_refinements": self.max_refinements}


class EdgeProfile:
    """Drift and diffusion coefficient on one metric edge.

    The diffusion coefficient must stay positive; this is checked on
    1024 evenly spaced points including both ends, which is a heuristic and
    not a proof. The integral ``I`` of ``s`` and the scale function
    ``Φ(x) = ∫₀ˣ e^{-2 I(y)} dy`` are tabulated on first use.

    Args:
        edge: the metric edge
        drift: expression for ``b``
        diffusion: expression for ``σ``
        numerics: quadrature settings

    Raises:
        CoefficientError: σ is not positive, or a coefficient cannot be
            evaluated on the edge
    """

    def __init__(
        self,
        edge: MetricEdge,
        drift: t.Union[Expression, str] = "0",
        diffusion: t.Union[Expression, str] = "1",
        numerics: Numerics = Numerics(),
    ):
        self.edge = edge
        self.drift_expression = parse(drift) if isinstance(drift, str) else drift
        self.diffusion_expression = parse(diffusion) if isinstance(diffusion, str) else diffusion
        self.numerics = numerics
        self._check()

    def __repr__(self) -> str:
        return (
            f"EdgeProfile({self.edge.id!r}, b={pretty(self.drift_expression)!r}, "
            f"sigma={pretty(self.diffusion_expression)!r})"
        )

    @property
    def length(self) -> float:
        return self.edge.length

    def _check(self):
        samples = np.linspace(0.0, self.length, POSITIVITY_SAMPLES)
        try:
            sigma = evaluate(self.diffusion_expression, samples)
        except ExpressionDomainError as err:
            raise CoefficientError(f"edge '{self.edge.id}': sigma: {err}") from None
        try:
            evaluate(self.drift_expression, samples)
        except ExpressionDomainError as err:
            raise CoefficientError(f"edge '{self.edge.id}': b: {err}") from None
        worst = int(np.argmin(sigma))
        if sigma[worst] <= 0:
            msg = (
                f"edge '{self.edge.id}': sigma = {pretty(self.diffusion_expression)} is not "
                f"positive (value {sigma[worst]:.6g} at x = {samples[worst]:.6g})"
            )
            raise CoefficientError(msg)

    def drift(self, x):
        return evaluate(self.drift_expression, x)

    def diffusion(self, x):
        return evaluate(self.diffusion_expression, x)

    def sigma2(self, x):
        return np.square(self.diffusion(x))

    def s(self, x):
        """``b / σ²``"""
        return self.drift(x) / self.sigma2(x)

    @functools.cached_property
    def _integral(self) -> CumulativeIntegral:
        return CumulativeIntegral(self.s, 0.0, self.length, **self.numerics.quadrature())

    @functools.cached_property
    def _scale(self) -> CumulativeIntegral:
        return CumulativeIntegral(
            lambda y: np.exp(-2 * self._integral(y)), 0.0, self.length, **self.numerics.quadrature()
        )

    def cumulative_s(self, x):
        """``I(x) = ∫₀ˣ s``"""
        return self._integral(x)

    @property
    def total_s(self) -> float:
        """``I(ℓ)``"""
        return self._integral.total

    def scale_function(self, x):
        """``Φ(x) = ∫₀ˣ e^{-2 I(y)} dy``"""
        return self._scale(x)

    @property
    def scale_total(self) -> float:
        """``Φ(ℓ)``"""
        return self._scale.total

    def oriented_integral(self, start: float, end: float) -> float:
        """``∫ s`` along the segment from ``start`` to ``end``; negative when ``end < start``"""
        for coordinate in (start, end):
            if not -1e-12 <= coordinate <= self.length + 1e-12:
                raise GraphError(
                    f"coordinate {coordinate} outside edge '{self.edge.id}' of length {self.length}"
                )
        return self.cumulative_s(end) - self.cumulative_s(start)

    def integrate(self, f, a: float = 0.0, b: t.Optional[float] = None) -> float:
        """Integrate ``f`` over a piece of this edge with the edge's quadrature settings"""
        return integrate(f, a, self.length if b is None else b, **self.numerics.quadrature())


def cumulative_s(profile: EdgeProfile) -> CumulativeIntegral:
    """The cached table of ``I(x) = ∫₀ˣ s`` for ``profile``"""
    return profile._integral


def oriented_integral(profile: EdgeProfile, start: float, end: float) -> float:
    return profile.oriented_integral(start, end)


@dataclass(frozen=True)
class VertexParams:
    """Vertex parameters of the generator.

    Attributes:
        alpha: sojourn weight ``α_v ≥ 0`` per vertex
        germ_alpha: ``α_{v,e} > 0`` per germ
        K: free constant ``K_v > 0`` per vertex
    """

    alpha: t.Mapping[str, float]
    germ_alpha: t.Mapping[Germ, float]
    K: t.Mapping[str, float] = field(default_factory=dict)

    @classmethod
    def build(
        cls,
        graph: MetricGraph,
        alpha: t.Optional[t.Mapping[str, float]] = None,
        germ_alpha: t.Optional[t.Mapping[Germ, float]] = None,
        K: t.Optional[t.Mapping[str, float]] = None,
    ) -> "VertexParams":
        """Fill in defaults (``α_v = 0``, ``α_{v,e} = 1``, ``K_v = 1``) and validate.

        Raises:
            CoefficientError: unknown ids or violated constraints
        """
        alpha, germ_alpha, K = dict(alpha or {}), dict(germ_alpha or {}), dict(K or {})
        for name, keys in (("alpha", alpha), ("K", K)):
            unknown = sorted(set(keys) - set(graph.vertices))
            if unknown:
                raise CoefficientError(f"{name} given for unknown vertices {unknown}")
        germs = set(graph.all_germs())
        unknown = sorted(str(g) for g in set(germ_alpha) - germs)
        if unknown:
            raise CoefficientError(f"germ weights given for unknown germs {unknown}")
        params = cls(
            alpha={v: float(alpha.get(v, 0.0)) for v in graph.vertices},
            germ_alpha={g: float(germ_alpha.get(g, 1.0)) for g in graph.all_germs()},
            K={v: float(K.get(v, 1.0)) for v in graph.vertices},
        )
        params.validate(graph)
        return params

    def validate(self, graph: MetricGraph):
        for vertex in graph.vertices:
            total = self.sojourn(vertex) + sum(self.weight(g) for g in graph.germs(vertex))
            if not total > 0:
                raise CoefficientError(
                    f"vertex '{vertex}': alpha and the germ weights must not all vanish"
                )
            if not (self.sojourn(vertex) >= 0 and math.isfinite(self.sojourn(vertex))):
                raise CoefficientError(f"vertex '{vertex}': alpha must be finite and nonnegative")
            if not self.k(vertex) > 0:
                raise CoefficientError(f"vertex '{vertex}': K must be positive")
            for germ in graph.germs(vertex):
                if not (self.weight(germ) > 0 and math.isfinite(self.weight(germ))):
                    raise CoefficientError(f"germ {germ}: weight must be finite and positive")

    def sojourn(self, vertex: str) -> float:
        return self.alpha.get(vertex, 0.0)

    def weight(self, germ: Germ) -> float:
        return self.germ_alpha.get(germ, 1.0)

    def k(self, vertex: str) -> float:
        return self.K.get(vertex, 1.0)

    def exit_weight(self, germ: Germ) -> float:
        """``W⁺ = K_v α_{v,e}``; the entering weight ``W⁻`` is 1"""
        return self.k(germ.vertex) * self.weight(germ)


@dataclass(frozen=True)
class Diffusion:
    """Everything that defines the process: graph, edge profiles, vertex parameters"""

    graph: MetricGraph
    profiles: t.Mapping[str, EdgeProfile]
    params: VertexParams
    numerics: Numerics = Numerics()

    def profile(self, edge_id: str) -> EdgeProfile:
        try:
            return self.profiles[edge_id]
        except KeyError:
            raise GraphError(f"no profile for edge '{edge_id}'") from None


def build_diffusion(
    graph: MetricGraph,
    coefficients: t.Optional[t.Mapping[str, t.Tuple[str, str]]] = None,
    params: t.Optional[VertexParams] = None,
    numerics: Numerics = Numerics(),
) -> Diffusion:
    """Bundle a graph with its coefficients.

    Args:
        graph: metric graph
        coefficients: ``(b, sigma)`` expression pair per edge id; missing
            edges get ``b = 0``, ``σ = 1``
        params: vertex parameters (defaults from ``VertexParams.build``)
        numerics: numerical settings

    Returns:
        the assembled diffusion
    """
    coefficients = dict(coefficients or {})
    unknown = sorted(set(coefficients) - set(graph.edge_ids))
    if unknown:
        raise CoefficientError(f"coefficients given for unknown edges {unknown}")
    profiles = {
        edge.id: EdgeProfile(edge, *coefficients.get(edge.id, ("0", "1")), numerics=numerics)
        for edge in graph.edges
    }
    if params is None:
        params = VertexParams.build(graph)
    else:
        params.validate(graph)
    return Diffusion(graph, profiles, params, numerics)

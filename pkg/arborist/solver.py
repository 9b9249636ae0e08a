#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

"""
Direct stationarity solver and reversibility.

On each edge every stationary density has the form

    μ_e(x) = (k₁ + k₂ Φ(x)) e^{2 I(x)} / σ²(x),    Φ(x) = ∫₀ˣ e^{-2 I}

with constant current ``-k₂ / 2``. The constants of all edges and one
``λ_v`` per vertex are pinned down by the gluing conditions
``½ σ² μ_e(v) = λ_v α_{v,e}``, zero divergence at every vertex and total
mass one. Importable functions include:

* assemble_system
* assemble_and_solve
* measure_from_solution
* stationarity_residuals
* vertex_chain
* is_reversible
* detailed_balance_residual
* reversible_invariant
"""

import logging
import math
import typing as t
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .coeffs import Diffusion, integrate
from .discrete import FiniteChain, stationary_linear
from .errors import MethodNotApplicableError, NumericalConsistencyError
from .graph import Germ, MetricGraph, Side, fundamental_cycle, spanning_trees
from .treemeasure import Measure, current_profile


logger = logging.getLogger(__name__)

SINGULARITY_THRESHOLD = 1e-13
REVERSIBILITY_TOL = 1e-9


@dataclass(frozen=True)
class EdgeSolution:
    """Constants of the stationary density on one edge"""

    edge: str
    k1: float
    k2: float

    @property
    def current(self) -> float:
        return -self.k2 / 2

    def density(self, diffusion: Diffusion, x):
        p = diffusion.profile(self.edge)
        x = np.asarray(x, dtype=float)
        return (self.k1 + self.k2 * p.scale_function(x)) * np.exp(2 * p.cumulative_s(x)) / p.sigma2(x)


@dataclass(frozen=True)
class StationarySystem:
    """The square linear system for edge constants and vertex multipliers.

    Attributes:
        unknowns: labels ``k1[e]``, ``k2[e]`` and ``lambda[v]``
        equations: one label per row
        matrix: the square system, last divergence row replaced by normalization
        rhs: right-hand side (zero except for the normalization row)
        homogeneous: gluing and all divergence rows, without normalization
    """

    unknowns: t.Tuple[str, ...]
    equations: t.Tuple[str, ...]
    matrix: np.ndarray
    rhs: np.ndarray
    homogeneous: np.ndarray

    def solve(self) -> np.ndarray:
        """Dense LU with partial pivoting.

        Raises:
            NumericalConsistencyError: the system is singular
        """
        lu, pivots = lu_factor(self.matrix, check_finite=True)
        diagonal = np.abs(np.diag(lu))
        if diagonal.min() <= SINGULARITY_THRESHOLD * diagonal.max():
            msg = (
                f"stationarity system of size {len(self.unknowns)} is singular beyond its "
                "scaling freedom; check vertex parameters"
            )
            raise NumericalConsistencyError(msg)
        return lu_solve((lu, pivots), self.rhs)


def _edge_moments(diffusion: Diffusion, edge_id: str) -> t.Tuple[float, float]:
    p = diffusion.profile(edge_id)
    quadrature = diffusion.numerics.quadrature()

    def base(y):
        return np.exp(2 * p.cumulative_s(y)) / p.sigma2(y)

    first = integrate(base, 0.0, p.length, **quadrature)
    second = integrate(lambda y: p.scale_function(y) * base(y), 0.0, p.length, **quadrature)
    return first, second


def assemble_system(diffusion: Diffusion) -> StationarySystem:
    """Build the stationarity system of ``diffusion``"""
    graph, params = diffusion.graph, diffusion.params
    edges, vertices = graph.edge_ids, graph.vertices
    n_edges = len(edges)
    column = {e: 2 * i for i, e in enumerate(edges)}
    vertex_column = {v: 2 * n_edges + j for j, v in enumerate(vertices)}
    size = 2 * n_edges + len(vertices)
    rows, labels = [], []
    for germ in graph.all_germs():
        p = diffusion.profile(germ.edge)
        row = np.zeros(size)
        k1, k2 = column[germ.edge], column[germ.edge] + 1
        if germ.side is Side.TAIL:
            row[k1] = 0.5
        else:
            rise = math.exp(2 * p.total_s)
            row[k1] = 0.5 * rise
            row[k2] = 0.5 * rise * p.scale_total
        row[vertex_column[germ.vertex]] -= params.weight(germ)
        rows.append(row)
        labels.append(f"gluing[{germ}]")
    for vertex in vertices:
        row = np.zeros(size)
        for edge_id in graph.outgoing(vertex):
            row[column[edge_id] + 1] -= 0.5
        for edge_id in graph.incoming(vertex):
            row[column[edge_id] + 1] += 0.5
        rows.append(row)
        labels.append(f"divergence[{vertex}]")
    homogeneous = np.array(rows)
    normalization = np.zeros(size)
    for edge_id in edges:
        first, second = _edge_moments(diffusion, edge_id)
        normalization[column[edge_id]] = first
        normalization[column[edge_id] + 1] = second
    for vertex in vertices:
        normalization[vertex_column[vertex]] = params.sojourn(vertex)
    matrix = np.vstack([homogeneous[:-1], normalization])
    rhs = np.zeros(size)
    rhs[-1] = 1.0
    unknowns = tuple(
        label for e in edges for label in (f"k1[{e}]", f"k2[{e}]")
    ) + tuple(f"lambda[{v}]" for v in vertices)
    logger.debug("stationarity system with %d unknowns", size)
    return StationarySystem(
        unknowns=unknowns,
        equations=tuple(labels[:-1]) + ("normalization",),
        matrix=matrix,
        rhs=rhs,
        homogeneous=homogeneous,
    )


def measure_from_solution(
    diffusion: Diffusion,
    solutions: t.Mapping[str, EdgeSolution],
    multipliers: t.Mapping[str, float],
    method: str = "direct",
) -> Measure:
    """Turn edge constants and vertex multipliers into a Measure.

    Atoms are ``λ_v α_v`` and currents ``-k₂ / 2``; no renormalization
    happens here.
    """
    graph, params = diffusion.graph, diffusion.params
    grids = {
        e: np.linspace(0.0, graph.edge(e).length, diffusion.numerics.grid_size)
        for e in graph.edge_ids
    }
    return Measure(
        atoms={v: multipliers[v] * params.sojourn(v) for v in graph.vertices},
        grids=grids,
        densities={e: solutions[e].density(diffusion, grids[e]) for e in graph.edge_ids},
        currents={e: solutions[e].current for e in graph.edge_ids},
        normalization=1.0,
        method=method,
        evaluator=lambda e, x: solutions[e].density(diffusion, x),
    )


def assemble_and_solve(diffusion: Diffusion) -> Measure:
    """Invariant measure from the stationarity conditions.

    Raises:
        NumericalConsistencyError: the system is singular
    """
    system = assemble_system(diffusion)
    values = system.solve()
    edges = diffusion.graph.edge_ids
    solutions = {
        e: EdgeSolution(e, float(values[2 * i]), float(values[2 * i + 1]))
        for i, e in enumerate(edges)
    }
    multipliers = {
        v: float(values[2 * len(edges) + j]) for j, v in enumerate(diffusion.graph.vertices)
    }
    return measure_from_solution(diffusion, solutions, multipliers)


@dataclass(frozen=True)
class ResidualReport:
    """How far a measure is from stationarity, relative to its flux scale.

    Attributes:
        current_variation: largest spread of the pointwise current along an edge
        current_mismatch: largest gap between pointwise and reported currents
        divergence: largest net current out of a vertex
        germ_ratio: largest spread of the gluing multipliers at a vertex
        normalization: deviation of the total mass from one
        scale: the flux scale the first four residuals are divided by
    """

    current_variation: float
    current_mismatch: float
    divergence: float
    germ_ratio: float
    normalization: float
    scale: float

    def worst(self) -> float:
        return max(self.current_variation, self.current_mismatch, self.divergence,
                   self.germ_ratio, self.normalization)

    def as_dict(self) -> t.Dict[str, float]:
        return {
            "current_variation": self.current_variation,
            "current_mismatch": self.current_mismatch,
            "divergence": self.divergence,
            "germ_ratio": self.germ_ratio,
            "normalization": self.normalization,
            "scale": self.scale,
        }


def stationarity_residuals(measure: Measure, diffusion: Diffusion) -> ResidualReport:
    """Check the stationarity conditions on a measure.

    Currents along each edge come from a spectral derivative of ``σ² μ``.
    At each vertex the gluing multiplier is estimated as ``½ σ² μ_e / α_{v,e}``
    through every germ and as ``μ_v / α_v`` when ``α_v > 0``; all estimates
    must agree.
    """
    graph, params = diffusion.graph, diffusion.params
    flux = {e: diffusion.profile(e).sigma2(measure.grids[e]) * measure.densities[e]
            for e in graph.edge_ids}
    scale = max(max(float(np.max(np.abs(f))) for f in flux.values()), 1e-300)
    variation, mismatch = 0.0, 0.0
    for edge_id in graph.edge_ids:
        _, current = current_profile(measure, diffusion, edge_id)
        variation = max(variation, float(np.max(current) - np.min(current)))
        mismatch = max(mismatch, float(np.max(np.abs(current - measure.currents[edge_id]))))
    divergence, spread = 0.0, 0.0
    for vertex in graph.vertices:
        net = sum(measure.currents[e] for e in graph.outgoing(vertex)) - sum(
            measure.currents[e] for e in graph.incoming(vertex)
        )
        divergence = max(divergence, abs(net))
        estimates = []
        for germ in graph.germs(vertex):
            end = graph.germ_coordinate(germ)
            p = diffusion.profile(germ.edge)
            estimates.append(0.5 * p.sigma2(end) * float(measure.density(germ.edge, end))
                             / params.weight(germ))
        if params.sojourn(vertex) > 0:
            estimates.append(measure.atoms[vertex] / params.sojourn(vertex))
        spread = max(spread, max(estimates) - min(estimates))
    mass = sum(measure.atoms.values()) + sum(
        integrate(lambda y, e=e: measure.density(e, y), 0.0, graph.edge(e).length,
                  **diffusion.numerics.quadrature())
        for e in graph.edge_ids
    )
    return ResidualReport(
        current_variation=variation / scale,
        current_mismatch=mismatch / scale,
        divergence=divergence / scale,
        germ_ratio=spread / scale,
        normalization=abs(mass - 1.0),
        scale=scale,
    )


@dataclass(frozen=True)
class Transition:
    """One jump of the vertex chain, through one germ of one edge"""

    source: str
    target: str
    germ: Germ
    rate: float


@dataclass(frozen=True)
class VertexChain:
    """Auxiliary jump process on the vertices.

    Each edge gives a jump from its tail to its head with rate
    ``α_{tail,e} e^{+L}`` and back with rate ``α_{head,e} e^{-L}``, where
    ``L = ∫₀^ℓ s``. Loops give a pair of jumps from a vertex to itself.

    Attributes:
        graph: the underlying metric graph
        transitions: forward (tail to head) and backward jump per edge
        stationary: stationary distribution of the summed non-loop rates
    """

    graph: MetricGraph
    transitions: t.Tuple[Transition, ...]
    stationary: t.Mapping[str, float]

    def pair(self, edge_id: str) -> t.Tuple[Transition, Transition]:
        forward = next(tr for tr in self.transitions
                       if tr.germ.edge == edge_id and tr.germ.side is Side.TAIL)
        backward = next(tr for tr in self.transitions
                        if tr.germ.edge == edge_id and tr.germ.side is Side.HEAD)
        return forward, backward

    def affinity(self, edge_id: str) -> float:
        """``log q(tail→head) - log q(head→tail)``"""
        forward, backward = self.pair(edge_id)
        return math.log(forward.rate) - math.log(backward.rate)

    def rates(self) -> t.Dict[t.Tuple[str, str], float]:
        summed: t.Dict[t.Tuple[str, str], float] = {}
        for tr in self.transitions:
            if tr.source != tr.target:
                summed[tr.source, tr.target] = summed.get((tr.source, tr.target), 0.0) + tr.rate
        return summed


def vertex_chain(diffusion: Diffusion) -> VertexChain:
    """Build the vertex chain of ``diffusion`` and its stationary distribution"""
    graph, params = diffusion.graph, diffusion.params
    transitions = []
    for edge in graph.edges:
        total = diffusion.profile(edge.id).total_s
        tail = Germ(edge.tail, edge.id, Side.TAIL)
        head = Germ(edge.head, edge.id, Side.HEAD)
        transitions.append(Transition(edge.tail, edge.head, tail,
                                      params.weight(tail) * math.exp(total)))
        transitions.append(Transition(edge.head, edge.tail, head,
                                      params.weight(head) * math.exp(-total)))
    partial = VertexChain(graph, tuple(transitions), {})
    if len(graph.vertices) == 1:
        stationary = {graph.vertices[0]: 1.0}
    else:
        finite = FiniteChain.build(partial.rates(), states=graph.vertices)
        stationary = dict(zip(finite.states, stationary_linear(finite)))
    return VertexChain(graph, tuple(transitions), stationary)


@dataclass(frozen=True)
class Reversibility:
    """Outcome of the cycle criterion.

    Attributes:
        reversible: whether every cycle is balanced
        certificate: an unbalanced cycle as ``(edge id, direction)`` pairs
        affinity: the log rate ratio accumulated along the certificate
    """

    reversible: bool
    certificate: t.Tuple[t.Tuple[str, int], ...] = ()
    affinity: float = 0.0

    def __bool__(self) -> bool:
        return self.reversible


def is_reversible(chain: VertexChain) -> Reversibility:
    """Kolmogorov's criterion over the fundamental cycles of a spanning tree.

    Parallel edges and loops are separate cycles, so each edge must be
    balanced on its own.
    """
    graph = chain.graph
    tree = spanning_trees(graph)[0]
    for edge_id in tree.cut_edges:
        cycle = fundamental_cycle(graph, tree, edge_id)
        affinity = sum(direction * chain.affinity(e) for e, direction in cycle)
        magnitude = sum(abs(chain.affinity(e)) for e, _ in cycle)
        if abs(affinity) > REVERSIBILITY_TOL * max(1.0, magnitude):
            logger.debug("cycle %s carries affinity %g", cycle, affinity)
            return Reversibility(False, cycle, affinity)
    return Reversibility(True)


def detailed_balance_residual(
    chain: VertexChain, stationary: t.Optional[t.Mapping[str, float]] = None
) -> float:
    """Largest ``|π_v q(v,w) - π_w q(w,v)|`` over the edges"""
    pi = chain.stationary if stationary is None else stationary
    residual = 0.0
    for edge in chain.graph.edges:
        forward, backward = chain.pair(edge.id)
        residual = max(residual, abs(pi[forward.source] * forward.rate
                                     - pi[backward.source] * backward.rate))
    return residual


def reversible_invariant(chain: VertexChain, diffusion: Diffusion) -> Measure:
    """Closed-form invariant measure of a reversible diffusion.

    With ``π`` the stationary distribution of the vertex chain,
    ``μ_e(x) ∝ π_tail q(tail→head) e^{I(x) - (L - I(x))} / σ²(x)`` and
    ``μ_v ∝ π_v α_v / 2``; every current vanishes.

    Raises:
        MethodNotApplicableError: the vertex chain is not reversible
    """
    check = is_reversible(chain)
    if not check:
        cycle = " ".join(f"{e}{'+' if d > 0 else '-'}" for e, d in check.certificate)
        msg = f"diffusion is not reversible: cycle [{cycle}] has affinity {check.affinity:.6g}"
        raise MethodNotApplicableError(msg)
    graph, params = diffusion.graph, diffusion.params
    pi = chain.stationary
    solutions, mass = {}, 0.0
    for edge in graph.edges:
        forward, _ = chain.pair(edge.id)
        total = diffusion.profile(edge.id).total_s
        k1 = 2 * pi[edge.tail] * forward.rate * math.exp(-total)
        solutions[edge.id] = EdgeSolution(edge.id, k1, 0.0)
        mass += k1 * _edge_moments(diffusion, edge.id)[0]
    mass += sum(pi[v] * params.sojourn(v) for v in graph.vertices)
    solutions = {e: EdgeSolution(e, s.k1 / mass, 0.0) for e, s in solutions.items()}
    multipliers = {v: pi[v] / mass for v in graph.vertices}
    return measure_from_solution(diffusion, solutions, multipliers, method="reversible")

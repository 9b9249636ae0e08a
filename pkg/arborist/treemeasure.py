#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

"""
Invariant measure from the continuous matrix-tree formula.

The unnormalized density at a point ``x`` of edge ``e`` is a sum over
spanning trees ``T`` of an integral, over the positions of the cuts on the
edges outside ``T``, of the weight of the metric arborescence obtained by
cutting there and orienting everything toward ``x``. The weight of an
arborescence is

    R(τ) = exp(∫_τ s) / σ²(x) · Π_v 𝒲_v(τ)

where ``∫_τ s`` follows the orientation of every piece of every edge and
``𝒲_v`` is ``K_v α_{v,e}`` for the germ by which ``v`` exits. Importable
functions include:

* invariant_measure
* ring_density_closed_form
* current_profile

and the ``TreeFormula`` class that carries the individual steps.

Cut halves always enter their endpoint vertex, so vertex weights do not
depend on where an edge is cut and the cut integral factorizes into one
gate ``G_c = ∫₀^ℓ e^{L_c - 2 I_c(y)} dy`` per cut edge. Only a cut on the
root's own edge needs care: it splits at ``x`` into two pieces whose
vertex weights differ.
"""

import functools
import itertools
import logging
import math
import typing as t
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Chebyshev

from .coeffs import Diffusion, EdgeProfile, integrate
from .coeffs.quadrature import gauss_legendre
from .errors import GraphError, MethodNotApplicableError, NumericalConsistencyError
from .graph import (
    Arborescence,
    CutSet,
    Point,
    SpanningTree,
    UnicyclicSubgraph,
    arborescence,
    cut_space_dimension,
    spanning_trees,
    unicyclic_subgraphs,
)


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Measure:
    """A normalized invariant measure.

    Attributes:
        atoms: mass ``μ_v`` sitting on each vertex
        grids: output coordinates per edge
        densities: ``μ_e`` on the output grid of each edge
        currents: constant current per edge, positive along the edge (tail to head)
        normalization: the constant ``Z`` the unnormalized measure was divided by
        method: name of the method that produced the measure
    """

    atoms: t.Mapping[str, float]
    grids: t.Mapping[str, np.ndarray]
    densities: t.Mapping[str, np.ndarray]
    currents: t.Mapping[str, float]
    normalization: float
    method: str
    evaluator: t.Optional[t.Callable[[str, np.ndarray], np.ndarray]] = field(
        default=None, repr=False, compare=False
    )

    def density(self, edge_id: str, x):
        """Evaluate ``μ_e`` anywhere on the edge, off the grid when possible"""
        if self.evaluator is not None:
            return self.evaluator(edge_id, np.asarray(x, dtype=float))
        return np.interp(x, self.grids[edge_id], self.densities[edge_id])


def _uniform_grid(profile: EdgeProfile, size: int) -> np.ndarray:
    return np.linspace(0.0, profile.length, size)


@dataclass(frozen=True)
class TreeFactorization:
    """The cut integral for one spanning tree and one root edge, factorized.

    For a tree containing the root edge there is a single term; otherwise
    the root edge itself is cut, and the cut below and above the root give
    one term each.

    Attributes:
        tree: the spanning tree
        edge: id of the root edge
        cut_root: whether the root edge lies outside the tree
        weights: vertex-weight product times the exponentials of the uncut
            tree edges, one entry per term (``[uncut]`` or ``[below, above]``)
        gates: ``G_c`` for every cut edge other than the root edge
    """

    tree: SpanningTree
    edge: str
    cut_root: bool
    weights: t.Tuple[float, ...]
    gates: t.Mapping[str, float]
    profile: EdgeProfile = field(repr=False, compare=False)

    @property
    def gate_product(self) -> float:
        return math.prod(self.gates.values())

    def __call__(self, x):
        """Contribution of this tree to the unnormalized density at ``x``"""
        p = self.profile
        x = np.asarray(x, dtype=float)
        rise = np.exp(2 * p.cumulative_s(x)) / p.sigma2(x) * self.gate_product
        total = p.total_s
        if not self.cut_root:
            (weight,) = self.weights
            return weight * rise * math.exp(-total)
        below, above = self.weights
        phi = p.scale_function(x)
        return rise * (
            below * math.exp(-total) * phi + above * math.exp(total) * (p.scale_total - phi)
        )


class TreeFormula:
    """Matrix-tree evaluation of the invariant measure of a diffusion.

    Args:
        diffusion: graph, edge profiles and vertex parameters
    """

    def __init__(self, diffusion: Diffusion):
        self.diffusion = diffusion
        self.graph = diffusion.graph
        self.params = diffusion.params
        self.numerics = diffusion.numerics
        self.trees = spanning_trees(self.graph)
        self._factorizations: t.Dict[str, t.Tuple[TreeFactorization, ...]] = {}
        logger.debug("tree formula over %d spanning trees", len(self.trees))

    def gate(self, edge_id: str) -> float:
        """``G_c = ∫₀^ℓ e^{L - 2 I(y)} dy = e^{L} Φ(ℓ)``"""
        p = self.diffusion.profile(edge_id)
        return math.exp(p.total_s) * p.scale_total

    def arborescence_weight(self, tau: Arborescence) -> float:
        """``R(τ)``: oriented exponential, root factor and vertex weights"""
        exponent = sum(
            self.diffusion.profile(seg.edge).oriented_integral(seg.start, seg.end)
            for seg in tau.segments
        )
        vertices = math.prod(self.params.exit_weight(germ) for germ in tau.exits.values())
        root = self.diffusion.profile(tau.root.edge).sigma2(tau.root.coordinate)
        return math.exp(exponent) * vertices / root

    def _uncut_weight(self, tau: Arborescence, skip: str = "") -> float:
        exponent = sum(
            self.diffusion.profile(seg.edge).oriented_integral(seg.start, seg.end)
            for seg in tau.segments
            if seg.edge in tau.tree.edges and seg.edge != skip
        )
        vertices = math.prod(self.params.exit_weight(germ) for germ in tau.exits.values())
        return vertices * math.exp(exponent)

    def _representative(self, tree: SpanningTree, edge_id: str, root_cut: float) -> Arborescence:
        cuts = {c: self.graph.edge(c).length / 2 for c in tree.cut_edges}
        length = self.graph.edge(edge_id).length
        if edge_id in cuts:
            cuts[edge_id] = root_cut * length
        return arborescence(self.graph, tree, CutSet.of(cuts), Point(edge_id, length / 2))

    def factorize(self, tree: SpanningTree, edge_id: str) -> TreeFactorization:
        """Split the cut integral of ``tree`` with root on ``edge_id`` into gates.

        Vertex weights and uncut exponentials are read off representative
        arborescences (midpoint cuts, root at the midpoint of its edge, a
        root-edge cut at a quarter below or above it).
        """
        cut_root = edge_id in tree.cut_edges
        if cut_root:
            weights = tuple(
                self._uncut_weight(self._representative(tree, edge_id, fraction), edge_id)
                for fraction in (0.25, 0.75)
            )
        else:
            weights = (self._uncut_weight(self._representative(tree, edge_id, 0.5), edge_id),)
        gates = {c: self.gate(c) for c in tree.cut_edges if c != edge_id}
        return TreeFactorization(
            tree, edge_id, cut_root, weights, gates, self.diffusion.profile(edge_id)
        )

    def factorizations(self, edge_id: str) -> t.Tuple[TreeFactorization, ...]:
        if edge_id not in self._factorizations:
            self._factorizations[edge_id] = tuple(
                self.factorize(tree, edge_id) for tree in self.trees
            )
        return self._factorizations[edge_id]

    def edge_density(self, edge_id: str, x) -> np.ndarray:
        """Unnormalized density on an edge, endpoints included (by continuity)"""
        x = np.asarray(x, dtype=float)
        return sum(factor(x) for factor in self.factorizations(edge_id))

    def density(self, point: Point) -> float:
        """Unnormalized density ``m_e(x)`` at an interior point.

        Raises:
            GraphError: the point is a vertex
        """
        edge = self.graph.edge(point.edge)
        if not 0.0 < point.coordinate < edge.length:
            raise GraphError(f"{point} is not inside edge '{edge.id}'; use vertex_atom_scale")
        return float(self.edge_density(point.edge, point.coordinate))

    def density_bruteforce(self, point: Point) -> float:
        """Unnormalized density by tensor-product quadrature over every cut.

        Each cut coordinate runs over a Gauss–Legendre rule on its edge; the
        root edge's rule is split at the root. Every node builds and weighs
        its own arborescence.

        Raises:
            MethodNotApplicableError: cut-space dimension above
                ``numerics.max_bruteforce_dimension``
        """
        k = cut_space_dimension(self.graph)
        if k > self.numerics.max_bruteforce_dimension:
            raise MethodNotApplicableError(
                f"brute-force quadrature needs cut-space dimension at most "
                f"{self.numerics.max_bruteforce_dimension}, got {k}"
            )
        edge = self.graph.edge(point.edge)
        if not 0.0 < point.coordinate < edge.length:
            raise GraphError(f"{point} is not inside edge '{edge.id}'")
        nodes, weights = gauss_legendre(self.numerics.bruteforce_order)

        def axis(a: float, b: float) -> t.Tuple[np.ndarray, np.ndarray]:
            return (a + b) / 2 + (b - a) / 2 * nodes, (b - a) / 2 * weights

        total = 0.0
        for tree in self.trees:
            axes = []
            for c in tree.cut_edges:
                length = self.graph.edge(c).length
                if c == point.edge:
                    below, above = axis(0.0, point.coordinate), axis(point.coordinate, length)
                    axes.append((np.concatenate([below[0], above[0]]),
                                 np.concatenate([below[1], above[1]])))
                else:
                    axes.append(axis(0.0, length))
            for combination in itertools.product(*(range(len(a[0])) for a in axes)):
                cuts = {c: axes[i][0][j] for i, (c, j) in enumerate(zip(tree.cut_edges, combination))}
                weight = math.prod(axes[i][1][j] for i, j in enumerate(combination))
                tau = arborescence(self.graph, tree, CutSet.of(cuts), point)
                total += weight * self.arborescence_weight(tau)
        return total

    def germ_limits(self, vertex: str) -> t.Dict[str, float]:
        """``σ² m / α_{v,e}`` at ``vertex`` through each incident germ"""
        limits = {}
        for germ in self.graph.germs(vertex):
            p = self.diffusion.profile(germ.edge)
            end = self.graph.germ_coordinate(germ)
            value = p.sigma2(end) * float(self.edge_density(germ.edge, end))
            limits[str(germ)] = value / self.params.weight(germ)
        return limits

    def vertex_atom_scale(self, vertex: str) -> float:
        """``λ̃_v``, the germ-independent limit of ``σ² m / α_{v,e}`` at ``vertex``.

        Raises:
            NumericalConsistencyError: germs disagree beyond ``compare_tol``
        """
        limits = self.germ_limits(vertex)
        values = np.array(list(limits.values()))
        scale = float(np.mean(values))
        spread = float(np.max(values) - np.min(values))
        if spread > self.numerics.compare_tol * scale:
            msg = f"germ limits at vertex '{vertex}' disagree: {limits}"
            raise NumericalConsistencyError(msg)
        return scale

    def _subgraph_weight(self, subgraph: UnicyclicSubgraph) -> float:
        exponent = sum(
            self.diffusion.profile(seg.edge).oriented_integral(seg.start, seg.end)
            for seg in subgraph.segments
        )
        vertices = math.prod(self.params.exit_weight(g) for g in subgraph.exits.values())
        gates = math.prod(self.gate(c) for c in subgraph.cut_edges)
        return vertices * math.exp(exponent) * gates

    def edge_current_unicyclic(self, edge_id: str) -> float:
        """Unnormalized current through an edge from oriented unicyclic subgraphs.

        Half the difference between the subgraphs whose cycle runs along the
        edge and their reversed pairs; a bridge carries no current.
        """
        current = 0.0
        for subgraph in unicyclic_subgraphs(self.graph, edge_id):
            current += subgraph.theta * self._subgraph_weight(subgraph)
        return current / 2

    def invariant_measure(self) -> Measure:
        """Normalize densities, atoms and currents into a probability measure.

        Atoms are ``½ λ̃_v α_v / Z``, vanishing exactly when ``α_v = 0``.
        """
        edge_mass = {
            e: integrate(
                functools.partial(self.edge_density, e),
                0.0,
                self.graph.edge(e).length,
                **self.numerics.quadrature(),
            )
            for e in self.graph.edge_ids
        }
        raw_atoms = {
            v: (0.5 * self.vertex_atom_scale(v) * self.params.sojourn(v)
                if self.params.sojourn(v) > 0 else 0.0)
            for v in self.graph.vertices
        }
        z = sum(edge_mass.values()) + sum(raw_atoms.values())
        grids = {
            e: _uniform_grid(self.diffusion.profile(e), self.numerics.grid_size)
            for e in self.graph.edge_ids
        }
        return Measure(
            atoms={v: a / z for v, a in raw_atoms.items()},
            grids=grids,
            densities={e: self.edge_density(e, grids[e]) / z for e in self.graph.edge_ids},
            currents={e: self.edge_current_unicyclic(e) / z for e in self.graph.edge_ids},
            normalization=z,
            method="tree",
            evaluator=lambda e, x: self.edge_density(e, x) / z,
        )


def invariant_measure(diffusion: Diffusion) -> Measure:
    """Invariant measure of ``diffusion`` by the matrix-tree formula"""
    return TreeFormula(diffusion).invariant_measure()


def _ring_profile(diffusion: Diffusion) -> EdgeProfile:
    graph = diffusion.graph
    if len(graph.vertices) != 1 or len(graph.edges) != 1 or not graph.edges[0].is_loop:
        raise MethodNotApplicableError(
            "the ring closed form needs a single vertex with a single loop, got "
            f"{len(graph.vertices)} vertices and {len(graph.edges)} edges"
        )
    (vertex,) = graph.vertices
    weights = {diffusion.params.weight(g) for g in graph.germs(vertex)}
    if len(weights) > 1:
        logger.warning(
            "ring closed form assumes a transparent vertex; germ weights %s", sorted(weights)
        )
    return diffusion.profile(graph.edges[0].id)


def _ring_unnormalized(profile: EdgeProfile, x: float) -> float:
    total = profile.total_s
    rise = 2 * profile.cumulative_s(x)
    quadrature = profile.numerics.quadrature()
    ahead = integrate(lambda y: np.exp(rise - 2 * profile.cumulative_s(y)), x, profile.length,
                      **quadrature)
    wrapped = integrate(lambda y: np.exp(rise - 2 * profile.cumulative_s(y) - 2 * total), 0.0, x,
                        **quadrature)
    return (ahead + wrapped) / profile.sigma2(x)


def ring_density_closed_form(
    diffusion: Diffusion, x, edge_mass: float = 1.0
) -> t.Union[float, np.ndarray]:
    """Density of the ring by one quadrature per point.

    ``μ(x) ∝ σ(x)^{-2} ∫ₓ^{x+ℓ} e^{S(x) - S(y)} dy`` with ``S = 2I`` continued
    periodically (``S(y + ℓ) = S(y) + 2L``), scaled to mass ``edge_mass`` on
    the edge. A sticky vertex leaves the shape unchanged and only takes
    ``1 - edge_mass`` into its atom.

    Raises:
        MethodNotApplicableError: the graph is not a single loop
    """
    profile = _ring_profile(diffusion)
    shape = np.shape(x)
    z = profile.integrate(np.vectorize(lambda y: _ring_unnormalized(profile, y)))
    values = np.array([_ring_unnormalized(profile, y) for y in np.ravel(x)]) * (edge_mass / z)
    return float(values[0]) if shape == () else values.reshape(shape)


def current_profile(
    measure: Measure, diffusion: Diffusion, edge_id: str, degree: int = 64
) -> t.Tuple[np.ndarray, np.ndarray]:
    """Pointwise current ``J = -½ (σ² μ)' + b μ`` on the output grid of an edge.

    The derivative comes from a Chebyshev interpolant of ``σ² μ`` of the
    given degree.

    Returns:
        grid coordinates and current values
    """
    p = diffusion.profile(edge_id)
    flux = Chebyshev.interpolate(
        lambda y: p.sigma2(y) * measure.density(edge_id, y), degree, domain=[0.0, p.length]
    )
    x = measure.grids[edge_id]
    return x, -0.5 * flux.deriv()(x) + p.drift(x) * measure.density(edge_id, x)

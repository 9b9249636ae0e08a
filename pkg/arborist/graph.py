#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

"""
Metric graphs and their combinatorics.

A metric graph is a finite set of vertices with edges glued onto them. Every
edge is a segment ``(0, length)`` whose coordinate-0 end (the tail) and
coordinate-length end (the head) are identified with vertices. Loops and
parallel edges are allowed. Importable functions include:

* build_graph
* cut_space_dimension
* spanning_trees
* kirchhoff_count
* cut
* arborescence
* fundamental_cycle
* unicyclic_subgraphs

Vertices and edges are addressed by string ids. A vertex sees each incident
edge through a *germ* ``(vertex, edge, side)``, so a loop contributes two
germs at its vertex.
"""

import collections
import enum
import logging
import math
import types
import typing as t
from dataclasses import dataclass, field

import networkx as nx
import numpy as np
from networkx.utils import UnionFind

from .errors import GraphError


logger = logging.getLogger(__name__)


class Side(enum.Enum):
    """End of an edge: TAIL sits at coordinate 0, HEAD at coordinate length"""

    TAIL = "tail"
    HEAD = "head"


@dataclass(frozen=True)
class MetricEdge:
    id: str
    length: float
    tail: str
    head: str

    @property
    def is_loop(self) -> bool:
        return self.tail == self.head

    def endpoint(self, side: Side) -> str:
        return self.tail if side is Side.TAIL else self.head

    def coordinate(self, side: Side) -> float:
        return 0.0 if side is Side.TAIL else self.length


@dataclass(frozen=True)
class Germ:
    """An edge as seen from one of its endpoint vertices"""

    vertex: str
    edge: str
    side: Side

    def __str__(self) -> str:
        return f"{self.vertex}:{self.edge}.{self.side.value}"


@dataclass(frozen=True)
class Point:
    """A point of the metric graph, given by an edge id and a coordinate"""

    edge: str
    coordinate: float


@dataclass(frozen=True)
class MetricGraph:
    """A validated metric graph. Build instances with ``build_graph``.

    Attributes:
        vertices: vertex ids in canonical (sorted) order
        edges: metric edges in canonical (sorted by id) order
    """

    vertices: t.Tuple[str, ...]
    edges: t.Tuple[MetricEdge, ...]
    _index: t.Mapping[str, MetricEdge] = field(init=False, repr=False, compare=False)
    _germs: t.Mapping[str, t.Tuple[Germ, ...]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        index = {edge.id: edge for edge in self.edges}
        germs: t.Dict[str, t.List[Germ]] = {v: [] for v in self.vertices}
        for edge in self.edges:
            germs[edge.tail].append(Germ(edge.tail, edge.id, Side.TAIL))
            germs[edge.head].append(Germ(edge.head, edge.id, Side.HEAD))
        object.__setattr__(self, "_index", types.MappingProxyType(index))
        object.__setattr__(
            self, "_germs", types.MappingProxyType({v: tuple(g) for v, g in germs.items()})
        )

    def edge(self, edge_id: str) -> MetricEdge:
        try:
            return self._index[edge_id]
        except KeyError:
            raise GraphError(f"unknown edge '{edge_id}'") from None

    @property
    def edge_ids(self) -> t.Tuple[str, ...]:
        return tuple(edge.id for edge in self.edges)

    def outgoing(self, vertex: str) -> t.Tuple[str, ...]:
        """A⁺(v): edges whose coordinate-0 end is ``vertex``"""
        return tuple(g.edge for g in self.germs(vertex) if g.side is Side.TAIL)

    def incoming(self, vertex: str) -> t.Tuple[str, ...]:
        """A⁻(v): edges whose coordinate-length end is ``vertex``"""
        return tuple(g.edge for g in self.germs(vertex) if g.side is Side.HEAD)

    def germs(self, vertex: str) -> t.Tuple[Germ, ...]:
        try:
            return self._germs[vertex]
        except KeyError:
            raise GraphError(f"unknown vertex '{vertex}'") from None

    def all_germs(self) -> t.Tuple[Germ, ...]:
        return tuple(g for v in self.vertices for g in self.germs(v))

    def germ_coordinate(self, germ: Germ) -> float:
        return self.edge(germ.edge).coordinate(germ.side)

    def other_end(self, germ: Germ) -> Germ:
        """The germ at the opposite end of the same edge"""
        edge = self.edge(germ.edge)
        side = Side.HEAD if germ.side is Side.TAIL else Side.TAIL
        return Germ(edge.endpoint(side), edge.id, side)

    def to_networkx(self, edge_ids: t.Optional[t.Iterable[str]] = None) -> nx.MultiGraph:
        """Underlying undirected multigraph, keyed by edge id.

        Args:
            edge_ids: restrict to these edges (all vertices are always kept)

        Returns:
            networkx MultiGraph with one keyed edge per metric edge
        """
        graph = nx.MultiGraph()
        graph.add_nodes_from(self.vertices)
        chosen = self.edge_ids if edge_ids is None else edge_ids
        for edge_id in chosen:
            edge = self.edge(edge_id)
            graph.add_edge(edge.tail, edge.head, key=edge.id, length=edge.length)
        return graph


def build_graph(spec: t.Mapping[str, t.Any]) -> MetricGraph:
    """Validate a graph description and build a MetricGraph.

    The description has the form::

        {"vertices": ["v", "w"],
         "edges": [{"id": "e1", "length": 1.0, "tail": "v", "head": "w"}]}

    Args:
        spec: graph description

    Returns:
        validated metric graph, with vertices and edges in sorted order

    Raises:
        GraphError: on duplicate ids, nonpositive or non-finite lengths,
            endpoints naming unknown vertices, or a disconnected graph
    """
    for key in ("vertices", "edges"):
        if not isinstance(spec.get(key, []), (list, tuple)):
            raise GraphError(f"graph {key} must be a list, got {type(spec[key]).__name__}")
    vertices = [str(v) for v in spec.get("vertices", [])]
    if not vertices:
        raise GraphError("graph has no vertices")
    duplicates = sorted(v for v, n in collections.Counter(vertices).items() if n > 1)
    if duplicates:
        raise GraphError(f"duplicate vertex ids: {duplicates}")
    known = set(vertices)
    edges = []
    for raw in spec.get("edges", []):
        edge_id = str(raw["id"])
        length = float(raw["length"])
        if not (math.isfinite(length) and length > 0):
            raise GraphError(f"edge '{edge_id}' has nonpositive or non-finite length {length}")
        tail, head = str(raw["tail"]), str(raw["head"])
        for end in (tail, head):
            if end not in known:
                raise GraphError(f"edge '{edge_id}' references unknown vertex '{end}'")
        edges.append(MetricEdge(edge_id, length, tail, head))
    duplicates = sorted(e for e, n in collections.Counter(e.id for e in edges).items() if n > 1)
    if duplicates:
        raise GraphError(f"duplicate edge ids: {duplicates}")
    graph = MetricGraph(tuple(sorted(vertices)), tuple(sorted(edges, key=lambda e: e.id)))
    if not nx.is_connected(graph.to_networkx()):
        components = [sorted(c) for c in nx.connected_components(graph.to_networkx())]
        raise GraphError(f"graph is disconnected: components {sorted(components)}")
    return graph


def cut_space_dimension(graph: MetricGraph) -> int:
    """Number of cuts turning the graph into a tree, |E| - |V| + 1"""
    return len(graph.edges) - len(graph.vertices) + 1


@dataclass(frozen=True)
class SpanningTree:
    """A spanning tree of the underlying multigraph.

    Attributes:
        edges: ids of the tree edges, sorted
        cut_edges: ids of the complement (the edges that must be cut), sorted
    """

    edges: t.Tuple[str, ...]
    cut_edges: t.Tuple[str, ...]

    def __contains__(self, edge_id: str) -> bool:
        return edge_id in self.edges


def _connects(vertices: t.Sequence[str], pairs: t.Iterable[t.Tuple[str, str]]) -> bool:
    forest = UnionFind(vertices)
    for a, b in pairs:
        forest.union(a, b)
    return len({forest[v] for v in vertices}) == 1


def spanning_trees(graph: MetricGraph) -> t.Tuple[SpanningTree, ...]:
    """Enumerate all spanning trees of the underlying multigraph.

    Enumeration is a contraction/deletion recursion over the non-loop edges
    in canonical order: an edge is contracted (kept) when it joins two
    components of the current forest and deleted when the remaining edges
    can still span. Parallel edges give distinct trees; loops never appear.

    Args:
        graph: connected metric graph

    Returns:
        spanning trees sorted by their edge ids
    """
    candidates = [e for e in graph.edges if not e.is_loop]
    target = len(graph.vertices) - 1
    found: t.List[t.Tuple[str, ...]] = []

    def search(index: int, chosen: t.List[MetricEdge]):
        if len(chosen) == target:
            found.append(tuple(e.id for e in chosen))
            return
        if index == len(candidates):
            return
        edge = candidates[index]
        forest = UnionFind(graph.vertices)
        for kept in chosen:
            forest.union(kept.tail, kept.head)
        if forest[edge.tail] != forest[edge.head]:
            search(index + 1, chosen + [edge])
        rest = [(e.tail, e.head) for e in chosen + candidates[index + 1:]]
        if _connects(graph.vertices, rest):
            search(index + 1, chosen)

    search(0, [])
    trees = tuple(
        SpanningTree(
            edges=tuple(sorted(ids)),
            cut_edges=tuple(sorted(set(graph.edge_ids) - set(ids))),
        )
        for ids in sorted(found)
    )
    logger.debug("enumerated %d spanning trees", len(trees))
    return trees


def kirchhoff_count(graph: MetricGraph) -> int:
    """Count spanning trees with the Laplacian-minor determinant.

    Loops cancel out of the Laplacian; parallel edges add up.
    """
    laplacian = nx.laplacian_matrix(graph.to_networkx(), nodelist=list(graph.vertices))
    minor = np.asarray(laplacian.todense(), dtype=float)[1:, 1:]
    if minor.size == 0:
        return 1
    return int(round(np.linalg.det(minor)))


@dataclass(frozen=True)
class CutSet:
    """Cut coordinates, one ``(edge id, y)`` pair per cut"""

    positions: t.Tuple[t.Tuple[str, float], ...] = ()

    @classmethod
    def of(cls, cuts: t.Union[t.Mapping[str, float], t.Iterable[t.Tuple[str, float]]]) -> "CutSet":
        pairs = cuts.items() if isinstance(cuts, t.Mapping) else cuts
        return cls(tuple((str(e), float(y)) for e, y in pairs))

    def as_dict(self) -> t.Dict[str, float]:
        return dict(self.positions)

    @property
    def edges(self) -> t.Tuple[str, ...]:
        return tuple(e for e, _ in self.positions)


def validate_cuts(graph: MetricGraph, cuts: CutSet, tree: t.Optional[SpanningTree] = None):
    """Check that cuts lie strictly inside distinct edges.

    Args:
        graph: metric graph
        cuts: proposed cuts
        tree: if given, the cut edges must be exactly its complement

    Raises:
        GraphError: on a cut at an endpoint, two cuts on one edge, or cuts not
            matching the tree complement
    """
    seen = set()
    for edge_id, y in cuts.positions:
        edge = graph.edge(edge_id)
        if edge_id in seen:
            raise GraphError(f"two cuts on edge '{edge_id}'")
        seen.add(edge_id)
        if not 0.0 < y < edge.length:
            raise GraphError(
                f"cut on edge '{edge_id}' at {y} is not strictly inside (0, {edge.length})"
            )
    if tree is not None and seen != set(tree.cut_edges):
        msg = f"cuts on {sorted(seen)} do not match the tree complement {list(tree.cut_edges)}"
        raise GraphError(msg)


def cut(graph: MetricGraph, cuts: CutSet) -> MetricGraph:
    """Cut the metric graph, producing a metric tree.

    Each cut edge ``e`` at ``y`` is replaced by ``e.lower`` (tail to a new leaf
    ``e.cut0``, length y) and ``e.upper`` (new leaf ``e.cut1`` to head, length
    length - y). The uncut edges must form a spanning tree.

    Args:
        graph: metric graph
        cuts: one cut per complement edge of some spanning tree

    Returns:
        the cut metric tree

    Raises:
        GraphError: on invalid cuts, or if the result is not a tree
    """
    validate_cuts(graph, cuts)
    positions = cuts.as_dict()
    kept = [e for e in graph.edges if e.id not in positions]
    if any(e.is_loop for e in kept) or len(kept) != len(graph.vertices) - 1:
        raise GraphError(
            f"cuts on {sorted(positions)} do not leave a spanning tree "
            f"(need {cut_space_dimension(graph)} cuts, loops included)"
        )
    vertices = list(graph.vertices)
    edges = [{"id": e.id, "length": e.length, "tail": e.tail, "head": e.head} for e in kept]
    for edge_id, y in sorted(positions.items()):
        edge = graph.edge(edge_id)
        lower, upper = f"{edge_id}.cut0", f"{edge_id}.cut1"
        vertices += [lower, upper]
        edges.append({"id": f"{edge_id}.lower", "length": y, "tail": edge.tail, "head": lower})
        edges.append(
            {"id": f"{edge_id}.upper", "length": edge.length - y, "tail": upper, "head": edge.head}
        )
    try:
        return build_graph({"vertices": vertices, "edges": edges})
    except GraphError as err:
        raise GraphError(f"cutting at {sorted(positions.items())} does not give a tree: {err}")


@dataclass(frozen=True)
class Segment:
    """A piece of an edge oriented from ``start`` to ``end`` (coordinates)"""

    edge: str
    start: float
    end: float

    @property
    def sign(self) -> int:
        return 1 if self.end > self.start else -1

    def covers(self, coordinate: float) -> bool:
        low, high = sorted((self.start, self.end))
        return low <= coordinate <= high


def _orient_toward(
    graph: MetricGraph,
    tree_edges: t.Iterable[str],
    sinks: t.Sequence[t.Tuple[str, Germ]],
) -> t.Tuple[t.Dict[str, Germ], t.List[Segment]]:
    """Breadth-first orientation of tree edges toward the sink vertices.

    Returns the exiting germ of every vertex and the oriented segments of
    the tree edges that were traversed.
    """
    adjacency: t.Dict[str, t.List[MetricEdge]] = {v: [] for v in graph.vertices}
    for edge_id in sorted(tree_edges):
        edge = graph.edge(edge_id)
        adjacency[edge.tail].append(edge)
        adjacency[edge.head].append(edge)
    exits = {vertex: germ for vertex, germ in sinks}
    segments = []
    queue = collections.deque(vertex for vertex, _ in sinks)
    while queue:
        here = queue.popleft()
        for edge in adjacency[here]:
            there = edge.head if edge.tail == here else edge.tail
            if there in exits:
                continue
            if there == edge.tail:
                exits[there] = Germ(there, edge.id, Side.TAIL)
                segments.append(Segment(edge.id, 0.0, edge.length))
            else:
                exits[there] = Germ(there, edge.id, Side.HEAD)
                segments.append(Segment(edge.id, edge.length, 0.0))
            queue.append(there)
    missing = sorted(set(graph.vertices) - set(exits))
    if missing:
        raise GraphError(f"tree edges {sorted(tree_edges)} do not reach vertices {missing}")
    return exits, segments


def _theta(graph: MetricGraph, exits: t.Mapping[str, Germ]) -> t.Dict[Germ, int]:
    return {g: (1 if exits[g.vertex] == g else -1) for g in graph.all_germs()}


@dataclass(frozen=True)
class Arborescence:
    """A metric arborescence: cut metric tree oriented toward a root point.

    Attributes:
        root: the root point (edge interior)
        tree: spanning tree whose complement was cut
        cuts: cut coordinates
        segments: every piece of every edge, oriented toward the root
        exits: the unique exiting germ at each vertex
        orientation: θ for every germ, +1 exiting and -1 entering
    """

    root: Point
    tree: SpanningTree
    cuts: CutSet
    segments: t.Tuple[Segment, ...]
    exits: t.Mapping[str, Germ]
    orientation: t.Mapping[Germ, int]

    def path_to_root(self, point: Point, graph: MetricGraph) -> t.List[Segment]:
        """Follow the orientation from ``point`` until the root is reached.

        Raises:
            GraphError: if the walk does not terminate at the root
        """
        current = next(
            (s for s in self.segments if s.edge == point.edge and s.covers(point.coordinate)),
            None,
        )
        path = []
        for _ in range(len(self.segments) + 1):
            if current is None:
                break
            path.append(current)
            if current.edge == self.root.edge and current.end == self.root.coordinate:
                return path
            edge = graph.edge(current.edge)
            if current.end not in (0.0, edge.length):
                break
            vertex = edge.tail if current.end == 0.0 else edge.head
            germ = self.exits[vertex]
            start = graph.germ_coordinate(germ)
            current = next(
                (s for s in self.segments if s.edge == germ.edge and s.start == start), None
            )
        raise GraphError(f"orientation from {point} does not lead to the root {self.root}")


def arborescence(
    graph: MetricGraph,
    tree: SpanningTree,
    cuts: CutSet,
    root: Point,
) -> Arborescence:
    """Cut the graph along the complement of ``tree`` and orient it toward ``root``.

    Uncut edges are oriented wholly toward the root. Both halves of a cut
    edge run from the cut point into their endpoint vertex. On the root's
    edge the two sides of the root run toward it.

    Args:
        graph: metric graph
        tree: spanning tree
        cuts: one cut per edge of the tree complement
        root: point strictly inside an edge, distinct from any cut point

    Returns:
        the oriented metric arborescence

    Raises:
        GraphError: on a root at a vertex or at a cut point, or cuts that do
            not match the tree
    """
    edge = graph.edge(root.edge)
    x = root.coordinate
    if not 0.0 < x < edge.length:
        raise GraphError(f"root {root} is not strictly inside edge '{edge.id}'")
    validate_cuts(graph, cuts, tree)
    positions = cuts.as_dict()
    segments = []
    if edge.id in positions:
        y = positions[edge.id]
        if y == x:
            raise GraphError(f"root {root} coincides with the cut on its edge")
        if y < x:
            sinks = [(edge.head, Germ(edge.head, edge.id, Side.HEAD))]
            segments += [Segment(edge.id, y, 0.0), Segment(edge.id, y, x),
                         Segment(edge.id, edge.length, x)]
        else:
            sinks = [(edge.tail, Germ(edge.tail, edge.id, Side.TAIL))]
            segments += [Segment(edge.id, 0.0, x), Segment(edge.id, y, x),
                         Segment(edge.id, y, edge.length)]
        tree_edges = list(tree.edges)
    else:
        sinks = [
            (edge.tail, Germ(edge.tail, edge.id, Side.TAIL)),
            (edge.head, Germ(edge.head, edge.id, Side.HEAD)),
        ]
        segments += [Segment(edge.id, 0.0, x), Segment(edge.id, edge.length, x)]
        tree_edges = [e for e in tree.edges if e != edge.id]
    exits, oriented = _orient_toward(graph, tree_edges, sinks)
    segments += oriented
    for cut_edge, y in sorted(positions.items()):
        if cut_edge == edge.id:
            continue
        length = graph.edge(cut_edge).length
        segments += [Segment(cut_edge, y, 0.0), Segment(cut_edge, y, length)]
    return Arborescence(
        root=root,
        tree=tree,
        cuts=cuts,
        segments=tuple(segments),
        exits=types.MappingProxyType(exits),
        orientation=types.MappingProxyType(_theta(graph, exits)),
    )


def fundamental_cycle(
    graph: MetricGraph, tree: SpanningTree, edge_id: str
) -> t.Tuple[t.Tuple[str, int], ...]:
    """The cycle closed by adding a non-tree edge to a spanning tree.

    The cycle is traversed so that ``edge_id`` goes tail to head; each entry
    is ``(edge id, +1)`` for an edge traversed canonically and ``-1``
    otherwise. A loop closes on itself.

    Raises:
        GraphError: if ``edge_id`` belongs to the tree
    """
    if edge_id in tree:
        raise GraphError(f"edge '{edge_id}' is part of the tree")
    edge = graph.edge(edge_id)
    cycle = [(edge_id, 1)]
    if edge.is_loop:
        return tuple(cycle)
    tree_graph = graph.to_networkx(tree.edges)
    walk = nx.shortest_path(tree_graph, edge.head, edge.tail)
    for here, there in zip(walk, walk[1:]):
        (key,) = tree_graph[here][there]
        step = graph.edge(key)
        cycle.append((key, 1 if step.tail == here else -1))
    return tuple(cycle)


@dataclass(frozen=True)
class UnicyclicSubgraph:
    """Spanning subgraph with one cycle through ``edge``, oriented.

    The subgraph is ``tree`` plus ``edge``. The cycle runs in direction
    ``theta`` relative to the canonical orientation of ``edge``; edges off
    the cycle run toward it; the remaining edges are cut at positions left
    to the caller.

    Attributes:
        edge: the distinguished cycle edge
        tree: the spanning tree obtained by removing ``edge``
        theta: +1 when the cycle runs along ``edge``, -1 against it
        cycle: ``(edge id, direction)`` for each cycle edge under ``theta``
        cut_edges: the k - 1 edges outside the subgraph
        segments: oriented cycle and off-cycle tree edges
        exits: the unique exiting germ at each vertex
        orientation: θ for every germ, +1 exiting and -1 entering
    """

    edge: str
    tree: SpanningTree
    theta: int
    cycle: t.Tuple[t.Tuple[str, int], ...]
    cut_edges: t.Tuple[str, ...]
    segments: t.Tuple[Segment, ...]
    exits: t.Mapping[str, Germ]
    orientation: t.Mapping[Germ, int]

    @property
    def edges(self) -> t.Tuple[str, ...]:
        return tuple(sorted(self.tree.edges + (self.edge,)))


def _orient_unicyclic(
    graph: MetricGraph, tree: SpanningTree, edge_id: str, theta: int
) -> UnicyclicSubgraph:
    cycle = tuple((e, d * theta) for e, d in fundamental_cycle(graph, tree, edge_id))
    sinks = []
    segments = []
    for cycle_edge, direction in cycle:
        step = graph.edge(cycle_edge)
        if direction > 0:
            sinks.append((step.tail, Germ(step.tail, step.id, Side.TAIL)))
            segments.append(Segment(step.id, 0.0, step.length))
        else:
            sinks.append((step.head, Germ(step.head, step.id, Side.HEAD)))
            segments.append(Segment(step.id, step.length, 0.0))
    on_cycle = {e for e, _ in cycle}
    exits, oriented = _orient_toward(graph, [e for e in tree.edges if e not in on_cycle], sinks)
    return UnicyclicSubgraph(
        edge=edge_id,
        tree=tree,
        theta=theta,
        cycle=cycle,
        cut_edges=tuple(e for e in tree.cut_edges if e != edge_id),
        segments=tuple(segments + oriented),
        exits=types.MappingProxyType(exits),
        orientation=types.MappingProxyType(_theta(graph, exits)),
    )


def unicyclic_subgraphs(graph: MetricGraph, edge_id: str) -> t.Tuple[UnicyclicSubgraph, ...]:
    """All oriented unicyclic spanning subgraphs whose cycle contains ``edge_id``.

    Removing ``edge_id`` from such a subgraph leaves a spanning tree, so the
    subgraphs correspond to the spanning trees avoiding ``edge_id``. Each
    comes in both cycle orientations, ``theta=+1`` first.

    Args:
        graph: metric graph
        edge_id: the edge that must lie on the cycle

    Returns:
        subgraphs in pairs (L, L̄); empty if ``edge_id`` is a bridge
    """
    graph.edge(edge_id)
    subgraphs = []
    for tree in spanning_trees(graph):
        if edge_id in tree:
            continue
        for theta in (1, -1):
            subgraphs.append(_orient_unicyclic(graph, tree, edge_id, theta))
    if not subgraphs:
        logger.debug("edge '%s' is a bridge: no cycles through it", edge_id)
    return tuple(subgraphs)

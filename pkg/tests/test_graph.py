#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

import itertools

import numpy as np
import pytest

from arborist.errors import GraphError
from arborist.graph import (
    CutSet,
    Germ,
    Point,
    Side,
    SpanningTree,
    arborescence,
    build_graph,
    cut,
    cut_space_dimension,
    fundamental_cycle,
    kirchhoff_count,
    spanning_trees,
    unicyclic_subgraphs,
)


def edges(*triples):
    return [
        {"id": e, "length": 1.0 + 0.25 * i, "tail": a, "head": b}
        for i, (e, a, b) in enumerate(triples)
    ]


def complete_graph(n):
    vertices = [f"v{i}" for i in range(n)]
    pairs = itertools.combinations(vertices, 2)
    return build_graph({
        "vertices": vertices,
        "edges": edges(*((f"e{i}", a, b) for i, (a, b) in enumerate(pairs))),
    })


RING = {"vertices": ["v"], "edges": edges(("e1", "v", "v"))}
PATH = {"vertices": ["a", "b", "c"], "edges": edges(("e1", "a", "b"), ("e2", "b", "c"))}
LOLLIPOP = {
    "vertices": ["a", "b"],
    "edges": edges(("e1", "a", "b"), ("e2", "b", "b")),
}
DOUBLE_TRIANGLE = {
    "vertices": ["a", "b", "c"],
    "edges": edges(
        ("e1", "a", "b"), ("e2", "b", "c"), ("e3", "c", "a"), ("e4", "a", "b"), ("e5", "b", "b")
    ),
}


class TestBuildGraph:
    def test_sorts_vertices_and_edges(self):
        graph = build_graph({
            "vertices": ["w", "v"],
            "edges": edges(("z", "v", "w"), ("a", "w", "v")),
        })
        assert graph.vertices == ("v", "w")
        assert graph.edge_ids == ("a", "z")

    def test_germs_of_a_loop(self):
        graph = build_graph(RING)
        assert graph.germs("v") == (Germ("v", "e1", Side.TAIL), Germ("v", "e1", Side.HEAD))
        assert graph.outgoing("v") == ("e1",)
        assert graph.incoming("v") == ("e1",)
        assert str(graph.germs("v")[0]) == "v:e1.tail"

    def test_other_end(self, theta_graph):
        germ = Germ("w", "e3", Side.TAIL)
        assert theta_graph.other_end(germ) == Germ("v", "e3", Side.HEAD)

    @pytest.mark.parametrize("spec,message", [
        ({"vertices": [], "edges": []}, "no vertices"),
        ({"vertices": ["v", "v"], "edges": []}, "duplicate vertex"),
        ({"vertices": ["v", "w"], "edges": [{"id": "e", "length": 0, "tail": "v", "head": "w"}]},
         "nonpositive"),
        ({"vertices": ["v", "w"], "edges": [{"id": "e", "length": -1, "tail": "v", "head": "w"}]},
         "nonpositive"),
        ({"vertices": ["v", "w"],
          "edges": [{"id": "e", "length": float("inf"), "tail": "v", "head": "w"}]},
         "non-finite"),
        ({"vertices": ["v"], "edges": [{"id": "e", "length": 1, "tail": "v", "head": "u"}]},
         "unknown vertex 'u'"),
        ({"vertices": ["v", "w"], "edges": edges(("e", "v", "w"), ("e", "w", "v"))},
         "duplicate edge"),
        ({"vertices": ["v", "w", "u"], "edges": edges(("e", "v", "w"))}, "disconnected"),
        ({"vertices": 5, "edges": []}, "vertices must be a list"),
        ({"vertices": ["v"], "edges": 5}, "edges must be a list"),
    ])
    def test_rejects(self, spec, message):
        with pytest.raises(GraphError, match=message):
            build_graph(spec)

    def test_unknown_lookups(self, theta_graph):
        with pytest.raises(GraphError):
            theta_graph.edge("nope")
        with pytest.raises(GraphError):
            theta_graph.germs("nope")

    def test_networkx_view_keeps_parallel_edges(self, theta_graph):
        nx_graph = theta_graph.to_networkx()
        assert nx_graph.number_of_edges("v", "w") == 3
        assert nx_graph.number_of_nodes() == 2


@pytest.mark.parametrize("spec,dimension", [
    (RING, 1),
    (PATH, 0),
    (LOLLIPOP, 1),
    (DOUBLE_TRIANGLE, 3),
])
def test_cut_space_dimension(spec, dimension):
    assert cut_space_dimension(build_graph(spec)) == dimension


@pytest.mark.parametrize("graph", [
    build_graph(RING),
    build_graph(PATH),
    build_graph(LOLLIPOP),
    build_graph(DOUBLE_TRIANGLE),
    complete_graph(4),
    complete_graph(5),
])
def test_tree_count_matches_kirchhoff(graph):
    trees = spanning_trees(graph)
    assert len(trees) == kirchhoff_count(graph)
    assert len(set(trees)) == len(trees)
    for tree in trees:
        assert len(tree.edges) == len(graph.vertices) - 1
        assert len(tree.cut_edges) == cut_space_dimension(graph)


@pytest.mark.parametrize("n,count", [(3, 3), (4, 16), (5, 125)])
def test_complete_graph_counts(n, count):
    assert len(spanning_trees(complete_graph(n))) == count


def test_theta_trees(theta_graph):
    trees = spanning_trees(theta_graph)
    assert [tree.edges for tree in trees] == [("e1",), ("e2",), ("e3",)]
    assert trees[0].cut_edges == ("e2", "e3")
    assert "e1" in trees[0]


def test_ring_has_the_empty_tree():
    (tree,) = spanning_trees(build_graph(RING))
    assert tree == SpanningTree((), ("e1",))


class TestCut:
    def test_theta_becomes_a_tree(self, theta_graph):
        tree_graph = cut(theta_graph, CutSet.of({"e2": 0.5, "e3": 0.3}))
        assert len(tree_graph.vertices) == 6
        assert len(tree_graph.edges) == 5
        assert cut_space_dimension(tree_graph) == 0
        assert tree_graph.edge("e2.lower").length == pytest.approx(0.5)
        assert tree_graph.edge("e2.upper").length == pytest.approx(1.0)

    def test_cutting_a_ring(self):
        tree_graph = cut(build_graph(RING), CutSet.of({"e1": 0.25}))
        assert set(tree_graph.vertices) == {"v", "e1.cut0", "e1.cut1"}

    @pytest.mark.parametrize("cuts,message", [
        ({"e2": 0.0, "e3": 0.3}, "strictly inside"),
        ({"e2": 1.5, "e3": 0.3}, "strictly inside"),
        ({"e2": 0.5}, "spanning tree"),
        ({"e1": 0.5, "e2": 0.5, "e3": 0.5}, "spanning tree"),
    ])
    def test_rejects(self, theta_graph, cuts, message):
        with pytest.raises(GraphError, match=message):
            cut(theta_graph, CutSet.of(cuts))

    def test_two_cuts_on_one_edge(self, theta_graph):
        with pytest.raises(GraphError, match="two cuts"):
            cut(theta_graph, CutSet.of([("e2", 0.2), ("e2", 0.4)]))


class TestArborescence:
    @pytest.mark.parametrize("root", [Point("e1", 0.3), Point("e2", 0.2), Point("e2", 1.2)])
    def test_orientation(self, theta_graph, root):
        for tree in spanning_trees(theta_graph):
            cuts = CutSet.of({c: theta_graph.edge(c).length * 0.6 for c in tree.cut_edges})
            tau = arborescence(theta_graph, tree, cuts, root)
            for vertex in theta_graph.vertices:
                germs = theta_graph.germs(vertex)
                assert sum(tau.orientation[g] == 1 for g in germs) == 1
                assert sum(tau.orientation[g] for g in germs) == 2 - len(germs)
            for segment in tau.segments:
                midpoint = Point(segment.edge, (segment.start + segment.end) / 2)
                path = tau.path_to_root(midpoint, theta_graph)
                assert path[-1].end == root.coordinate
                assert path[-1].edge == root.edge

    @pytest.mark.parametrize("root", [Point("e1", 0.3), Point("e2", 1.2), Point("e3", 0.5)])
    def test_random_points_reach_the_root(self, theta_graph, root):
        rng = np.random.default_rng(7)
        for tree in spanning_trees(theta_graph):
            cuts = CutSet.of({c: theta_graph.edge(c).length * 0.35 for c in tree.cut_edges})
            tau = arborescence(theta_graph, tree, cuts, root)
            for edge_id in rng.choice(theta_graph.edge_ids, size=256).tolist():
                point = Point(edge_id, rng.uniform(0.0, theta_graph.edge(edge_id).length))
                path = tau.path_to_root(point, theta_graph)
                assert (path[-1].edge, path[-1].end) == (root.edge, root.coordinate)

    def test_cut_root_edge_splits_in_three(self, theta_graph):
        tree = spanning_trees(theta_graph)[0]
        tau = arborescence(theta_graph, tree, CutSet.of({"e2": 0.4, "e3": 0.4}), Point("e2", 1.0))
        on_root = [s for s in tau.segments if s.edge == "e2"]
        assert len(on_root) == 3
        assert tau.exits["w"] == Germ("w", "e2", Side.HEAD)

    @pytest.mark.parametrize("root,cuts,message", [
        (Point("e1", 0.0), {"e2": 0.5, "e3": 0.5}, "strictly inside"),
        (Point("e1", 1.0), {"e2": 0.5, "e3": 0.5}, "strictly inside"),
        (Point("e2", 0.5), {"e2": 0.5, "e3": 0.5}, "coincides"),
        (Point("e1", 0.5), {"e2": 0.5}, "tree complement"),
    ])
    def test_rejects(self, theta_graph, root, cuts, message):
        tree = spanning_trees(theta_graph)[0]
        with pytest.raises(GraphError, match=message):
            arborescence(theta_graph, tree, CutSet.of(cuts), root)


class TestCycles:
    def test_fundamental_cycle(self, theta_graph):
        tree = spanning_trees(theta_graph)[0]
        assert fundamental_cycle(theta_graph, tree, "e2") == (("e2", 1), ("e1", -1))
        assert fundamental_cycle(theta_graph, tree, "e3") == (("e3", 1), ("e1", 1))

    def test_tree_edge_has_no_fundamental_cycle(self, theta_graph):
        tree = spanning_trees(theta_graph)[0]
        with pytest.raises(GraphError):
            fundamental_cycle(theta_graph, tree, "e1")

    def test_loop_closes_on_itself(self):
        graph = build_graph(LOLLIPOP)
        (tree,) = spanning_trees(graph)
        assert fundamental_cycle(graph, tree, "e2") == (("e2", 1),)

    def test_unicyclic_pairs(self, theta_graph):
        subgraphs = unicyclic_subgraphs(theta_graph, "e1")
        assert len(subgraphs) == 4
        assert [s.theta for s in subgraphs] == [1, -1, 1, -1]
        for forward, backward in zip(subgraphs[::2], subgraphs[1::2]):
            assert forward.tree == backward.tree
            assert forward.cycle == tuple((e, -d) for e, d in backward.cycle)
            assert "e1" in forward.edges
            assert len(forward.cut_edges) == cut_space_dimension(theta_graph) - 1

    def test_every_vertex_exits_once(self):
        graph = build_graph(DOUBLE_TRIANGLE)
        for subgraph in unicyclic_subgraphs(graph, "e1"):
            for vertex in graph.vertices:
                assert sum(subgraph.orientation[g] == 1 for g in graph.germs(vertex)) == 1

    def test_bridge_has_no_cycles(self):
        assert unicyclic_subgraphs(build_graph(PATH), "e1") == ()
        assert unicyclic_subgraphs(build_graph(LOLLIPOP), "e1") == ()

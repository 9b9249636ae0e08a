#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

import pytest

from arborist.coeffs import Numerics, VertexParams, build_diffusion
from arborist.config import load_example
from arborist.graph import build_graph


@pytest.fixture
def ring():
    return load_example("ring").diffusion


@pytest.fixture
def interval():
    return load_example("interval").diffusion


@pytest.fixture
def theta():
    return load_example("theta").diffusion


@pytest.fixture
def theta_reversible():
    return load_example("theta_reversible").diffusion


@pytest.fixture
def theta_graph():
    return build_graph({
        "vertices": ["v", "w"],
        "edges": [
            {"id": "e1", "length": 1.0, "tail": "v", "head": "w"},
            {"id": "e2", "length": 1.5, "tail": "v", "head": "w"},
            {"id": "e3", "length": 0.8, "tail": "w", "head": "v"},
        ],
    })


@pytest.fixture
def constant_ring():
    """Loop of length one with s = 0.7 everywhere"""
    graph = build_graph({
        "vertices": ["v"],
        "edges": [{"id": "e1", "length": 1.0, "tail": "v", "head": "v"}],
    })
    return build_diffusion(graph, {"e1": ("0.7", "1")})


@pytest.fixture
def two_loops():
    """Figure eight: two loops at one vertex, with a sojourn weight"""
    graph = build_graph({
        "vertices": ["v"],
        "edges": [
            {"id": "a", "length": 1.0, "tail": "v", "head": "v"},
            {"id": "b", "length": 0.5, "tail": "v", "head": "v"},
        ],
    })
    params = VertexParams.build(graph, alpha={"v": 0.25})
    return build_diffusion(
        graph, {"a": ("0.3", "1"), "b": ("-0.5 + x", "1 + 0.2*x")}, params, Numerics()
    )

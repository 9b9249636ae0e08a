#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

import dataclasses
import math

import numpy as np
import pytest

from arborist.coeffs import Numerics, VertexParams, build_diffusion, integrate
from arborist.errors import GraphError, MethodNotApplicableError
from arborist.graph import Point
from arborist.treemeasure import (
    TreeFormula,
    current_profile,
    invariant_measure,
    ring_density_closed_form,
)


def total_mass(measure, diffusion):
    edges = sum(
        integrate(lambda y, e=e: measure.density(e, y), 0.0, diffusion.graph.edge(e).length)
        for e in diffusion.graph.edge_ids
    )
    return edges + sum(measure.atoms.values())


def test_interval_density(interval):
    measure = invariant_measure(interval)
    x = measure.grids["e1"]
    exact = np.exp(-x ** 2) / (math.sqrt(math.pi) / 2 * math.erf(1.0))
    np.testing.assert_allclose(measure.densities["e1"], exact, rtol=1e-10)
    assert measure.atoms == {"a": 0.0, "b": 0.0}
    assert measure.currents["e1"] == 0.0
    assert measure.method == "tree"


def test_constant_ring_is_uniform(constant_ring):
    measure = invariant_measure(constant_ring)
    np.testing.assert_allclose(measure.densities["e1"], 1.0, rtol=1e-10)
    assert measure.currents["e1"] == pytest.approx(0.7, rel=1e-10)
    assert measure.normalization == pytest.approx(math.sinh(0.7) / 0.7, rel=1e-12)


def test_ring_matches_closed_form(ring):
    measure = invariant_measure(ring)
    x = np.linspace(0.0, 1.0, 41)
    np.testing.assert_allclose(
        measure.density("e1", x), ring_density_closed_form(ring, x), rtol=1e-8
    )


def test_closed_form_scalar(ring):
    value = ring_density_closed_form(ring, 0.25)
    assert isinstance(value, float)
    assert value == pytest.approx(float(invariant_measure(ring).density("e1", 0.25)), rel=1e-8)


def test_closed_form_needs_a_ring(theta):
    with pytest.raises(MethodNotApplicableError, match="single loop"):
        ring_density_closed_form(theta, 0.5)


def test_closed_form_warns_on_unequal_germ_weights(ring, caplog):
    germs = ring.graph.germs("v")
    params = VertexParams.build(ring.graph, germ_alpha={germs[0]: 2.0})
    ring_density_closed_form(dataclasses.replace(ring, params=params), 0.5)
    assert "transparent vertex" in caplog.text


def test_sticky_ring_keeps_the_closed_form_shape(ring, caplog):
    params = VertexParams.build(ring.graph, alpha={"v": 0.5})
    sticky = dataclasses.replace(ring, params=params)
    measure = invariant_measure(sticky)
    assert measure.atoms["v"] > 0
    x = np.linspace(0.0, 1.0, 41)
    closed = ring_density_closed_form(sticky, x, 1.0 - measure.atoms["v"])
    np.testing.assert_allclose(measure.density("e1", x), closed, rtol=1e-8)
    assert "transparent vertex" not in caplog.text


@pytest.mark.parametrize("fixture", ["ring", "interval", "theta", "theta_reversible", "two_loops"])
def test_total_mass_is_one(request, fixture):
    diffusion = request.getfixturevalue(fixture)
    measure = invariant_measure(diffusion)
    assert total_mass(measure, diffusion) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("fixture", ["ring", "theta", "theta_reversible", "two_loops"])
def test_densities_are_positive(request, fixture):
    measure = invariant_measure(request.getfixturevalue(fixture))
    for density in measure.densities.values():
        assert np.all(density > 0)


def test_atoms_follow_sojourn_weights(theta):
    measure = invariant_measure(theta)
    assert measure.atoms["v"] > 0
    assert measure.atoms["w"] == 0.0


def test_atoms_match_germ_limits(theta):
    formula = TreeFormula(theta)
    measure = formula.invariant_measure()
    scale = formula.vertex_atom_scale("v")
    assert measure.atoms["v"] == pytest.approx(0.5 * scale * 0.5 / measure.normalization, rel=1e-12)
    limits = formula.germ_limits("v")
    assert set(limits) == {"v:e1.tail", "v:e2.tail", "v:e3.head"}
    spread = max(limits.values()) - min(limits.values())
    assert spread <= 1e-6 * scale


def test_free_constants_cancel(theta):
    params = dataclasses.replace(theta.params, K={"v": 7.0, "w": 0.2})
    rescaled = dataclasses.replace(theta, params=params)
    first, second = invariant_measure(theta), invariant_measure(rescaled)
    for e in theta.graph.edge_ids:
        np.testing.assert_allclose(first.densities[e], second.densities[e], rtol=1e-11)
        assert first.currents[e] == pytest.approx(second.currents[e], rel=1e-10, abs=1e-14)
    assert first.atoms["v"] == pytest.approx(second.atoms["v"], rel=1e-12)


def test_gate(theta):
    formula = TreeFormula(theta)
    p = theta.profile("e3")
    exact = integrate(lambda y: np.exp(p.total_s - 2 * p.cumulative_s(y)), 0.0, p.length)
    assert formula.gate("e3") == pytest.approx(exact, rel=1e-10)


def test_factorizations_cover_every_tree(theta):
    formula = TreeFormula(theta)
    factors = formula.factorizations("e2")
    assert [f.tree.edges for f in factors] == [("e1",), ("e2",), ("e3",)]
    assert [f.cut_root for f in factors] == [True, False, True]
    assert [len(f.weights) for f in factors] == [2, 1, 2]
    assert formula.factorizations("e2") is factors


@pytest.mark.parametrize("point", [Point("e1", 0.37), Point("e3", 0.61)])
def test_density_matches_bruteforce(theta, point):
    formula = TreeFormula(theta)
    assert formula.density(point) == pytest.approx(formula.density_bruteforce(point), rel=1e-9)


@pytest.mark.slow
@pytest.mark.parametrize("fixture", ["theta", "theta_reversible", "two_loops"])
def test_density_matches_bruteforce_along_edges(request, fixture):
    diffusion = request.getfixturevalue(fixture)
    formula = TreeFormula(diffusion)
    for edge in diffusion.graph.edges:
        for fraction in (0.1, 0.5, 0.83):
            point = Point(edge.id, fraction * edge.length)
            assert formula.density(point) == pytest.approx(
                formula.density_bruteforce(point), rel=1e-9
            )


def test_bruteforce_dimension_limit(theta):
    limited = dataclasses.replace(theta, numerics=Numerics(max_bruteforce_dimension=1))
    with pytest.raises(MethodNotApplicableError, match="dimension"):
        TreeFormula(limited).density_bruteforce(Point("e1", 0.5))


@pytest.mark.parametrize("coordinate", [0.0, 1.0])
def test_density_rejects_vertices(theta, coordinate):
    with pytest.raises(GraphError):
        TreeFormula(theta).density(Point("e1", coordinate))


@pytest.mark.parametrize("fixture", ["theta", "two_loops"])
def test_currents_are_conserved(request, fixture):
    diffusion = request.getfixturevalue(fixture)
    measure = invariant_measure(diffusion)
    graph = diffusion.graph
    scale = max(abs(j) for j in measure.currents.values())
    for vertex in graph.vertices:
        net = sum(measure.currents[e] for e in graph.outgoing(vertex)) - sum(
            measure.currents[e] for e in graph.incoming(vertex)
        )
        assert abs(net) <= 1e-10 * scale


@pytest.mark.parametrize("fixture", ["ring", "theta", "two_loops"])
def test_currents_match_pointwise_flux(request, fixture):
    diffusion = request.getfixturevalue(fixture)
    measure = invariant_measure(diffusion)
    for edge_id in diffusion.graph.edge_ids:
        _, current = current_profile(measure, diffusion, edge_id)
        np.testing.assert_allclose(current, measure.currents[edge_id], atol=1e-6)


def test_flux_derivative_by_finite_differences(theta):
    measure = invariant_measure(theta)
    p = theta.profile("e3")
    h = 1e-5
    for y in (0.2, 0.4, 0.6):
        flux = [p.sigma2(z) * float(measure.density("e3", z)) for z in (y - h, y + h)]
        derivative = (flux[1] - flux[0]) / (2 * h)
        pointwise = -0.5 * derivative + p.drift(y) * float(measure.density("e3", y))
        assert pointwise == pytest.approx(measure.currents["e3"], abs=1e-8)


def test_bridge_carries_no_current(interval):
    assert TreeFormula(interval).edge_current_unicyclic("e1") == 0.0


def test_reversible_currents_vanish(theta_reversible):
    measure = invariant_measure(theta_reversible)
    for current in measure.currents.values():
        assert abs(current) <= 1e-12


def test_driftless_theta_is_uniform(theta_graph):
    plain = build_diffusion(theta_graph)
    measure = invariant_measure(plain)
    for e in theta_graph.edge_ids:
        np.testing.assert_allclose(measure.densities[e], 1 / 3.3, rtol=1e-10)

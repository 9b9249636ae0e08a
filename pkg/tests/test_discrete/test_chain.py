#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

import itertools

import numpy as np
import pytest

from arborist.discrete import (
    FiniteChain,
    arborescence_count,
    arborescence_weight,
    arborescences,
    mctt_stationary,
    random_chain,
    stationary_linear,
)
from arborist.errors import GraphError


THREE_STATES = {("a", "b"): 1.0, ("b", "c"): 2.0, ("c", "a"): 3.0, ("b", "a"): 0.5}


def complete_chain(n):
    return FiniteChain.build(
        {(i, j): 1.0 + i + 0.5 * j for i, j in itertools.permutations(range(n), 2)},
        states=range(n),
    )


class TestBuild:
    def test_state_order(self):
        chain = FiniteChain.build(THREE_STATES)
        assert chain.states == ("a", "b", "c")
        chain = FiniteChain.build(THREE_STATES, states=["c", "b", "a"])
        assert chain.states == ("c", "b", "a")

    @pytest.mark.parametrize("rates,states,message", [
        ({("a", "a"): 1.0}, None, "self-transition"),
        ({("a", "b"): 1.0, ("b", "a"): 1.0}, ["a"], "unknown state"),
        ({("a", "b"): 0.0, ("b", "a"): 1.0}, None, "positive"),
        ({("a", "b"): float("nan"), ("b", "a"): 1.0}, None, "positive"),
        ({("a", "b"): 1.0, ("b", "c"): 1.0}, None, "strongly connected"),
    ])
    def test_rejects(self, rates, states, message):
        with pytest.raises(GraphError, match=message):
            FiniteChain.build(rates, states=states)

    def test_generator_rows_sum_to_zero(self):
        generator = FiniteChain.build(THREE_STATES).generator()
        np.testing.assert_allclose(generator.sum(axis=1), 0.0, atol=1e-15)
        assert generator[0, 1] == 1.0
        assert generator[1, 1] == -2.5


def test_three_state_arborescences():
    chain = FiniteChain.build(THREE_STATES)
    trees = list(arborescences(chain, "a"))
    assert sorted(sorted(tree.items()) for tree in trees) == [
        [("b", "a"), ("c", "a")],
        [("b", "c"), ("c", "a")],
    ]
    assert sum(arborescence_weight(chain, tree) for tree in trees) == pytest.approx(7.5)


def test_three_state_stationary():
    chain = FiniteChain.build(THREE_STATES)
    np.testing.assert_allclose(mctt_stationary(chain), [0.6, 0.24, 0.16], rtol=1e-14)
    np.testing.assert_allclose(stationary_linear(chain), [0.6, 0.24, 0.16], rtol=1e-12)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_complete_chain_counts(n):
    chain = complete_chain(n)
    for root in chain.states:
        trees = list(arborescences(chain, root))
        assert len(trees) == n ** (n - 2) == arborescence_count(chain, root)


@pytest.mark.parametrize("seed", range(10))
def test_tree_count_matches_laplacian(seed):
    chain = random_chain(6, np.random.default_rng(seed))
    for root in chain.states:
        assert len(list(arborescences(chain, root))) == arborescence_count(chain, root)


@pytest.mark.parametrize("size,seed", [(size, seed) for size in (2, 3, 5, 7) for seed in range(5)])
def test_mctt_matches_linear_solve(size, seed):
    chain = random_chain(size, np.random.default_rng(seed))
    tree, linear = mctt_stationary(chain), stationary_linear(chain)
    np.testing.assert_allclose(tree, linear, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(tree @ chain.generator(), 0.0, atol=1e-12)


@pytest.mark.slow
def test_mctt_matches_linear_solve_on_fifty_chains():
    rng = np.random.default_rng(2024)
    sizes = [2 + i % 7 for i in range(50)]
    assert max(sizes) == 8
    for size in sizes:
        chain = random_chain(size, rng)
        np.testing.assert_allclose(mctt_stationary(chain), stationary_linear(chain),
                                   rtol=1e-12, atol=1e-12)


def test_every_arborescence_reaches_the_root():
    chain = random_chain(5, np.random.default_rng(42))
    for tree in arborescences(chain, 0):
        for state in chain.states:
            steps = 0
            while state != 0:
                state = tree[state]
                steps += 1
                assert steps < len(chain.states)


def test_single_state():
    chain = FiniteChain.build({}, states=["only"])
    np.testing.assert_array_equal(mctt_stationary(chain), [1.0])
    np.testing.assert_array_equal(stationary_linear(chain), [1.0])
    assert arborescence_count(chain, "only") == 1


def test_random_chain_is_reproducible():
    first = random_chain(5, np.random.default_rng(7))
    second = random_chain(5, np.random.default_rng(7))
    assert first == second
    assert all(0.2 <= rate <= 5.0 for rate in first.rates.values())

#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

"""
Finite continuous-time Markov chains and the Markov chain tree theorem.

Importable functions include:

* arborescences
* arborescence_count
* mctt_stationary
* stationary_linear
* random_chain

An arborescence rooted at ``x`` is a map sending every other state to the
target of its unique exiting transition, without cycles, so that every state
reaches ``x``. Its weight is the product of the chosen rates, and the
stationary probability of ``x`` is proportional to the total weight of the
arborescences rooted there.
"""

import logging
import math
import typing as t
from dataclasses import dataclass

import networkx as nx
import numpy as np
from scipy.linalg import lu_factor, lu_solve

from ..errors import GraphError, NumericalConsistencyError


logger = logging.getLogger(__name__)

State = t.Hashable


@dataclass(frozen=True)
class FiniteChain:
    """An irreducible chain given by its positive jump rates.

    Build instances with ``FiniteChain.build``.

    Attributes:
        states: states in a fixed order, used for every returned vector
        rates: ``(source, target) -> rate`` for the allowed transitions
    """

    states: t.Tuple[State, ...]
    rates: t.Mapping[t.Tuple[State, State], float]

    @classmethod
    def build(
        cls,
        rates: t.Mapping[t.Tuple[State, State], float],
        states: t.Optional[t.Sequence[State]] = None,
    ) -> "FiniteChain":
        """Validate rates and build a chain.

        Args:
            rates: positive rate per ordered pair of distinct states
            states: state order; defaults to the order of first appearance

        Raises:
            GraphError: nonpositive rates, self-transitions, unknown states,
                or a transition graph that is not strongly connected
        """
        if states is None:
            states = list(dict.fromkeys(s for pair in rates for s in pair))
        states = tuple(states)
        known = set(states)
        for (source, target), rate in rates.items():
            if source == target:
                raise GraphError(f"self-transition at state {source!r}")
            if source not in known or target not in known:
                raise GraphError(f"transition {source!r} -> {target!r} uses an unknown state")
            if not (rate > 0 and math.isfinite(rate)):
                raise GraphError(f"rate {source!r} -> {target!r} must be positive, got {rate}")
        chain = cls(states, dict(rates))
        if len(states) > 1 and not nx.is_strongly_connected(chain.transition_graph()):
            raise GraphError("transition graph is not strongly connected")
        return chain

    def transition_graph(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(self.states)
        graph.add_weighted_edges_from((s, t_, r) for (s, t_), r in self.rates.items())
        return graph

    def generator(self) -> np.ndarray:
        """Rate matrix with rows summing to zero"""
        index = {s: i for i, s in enumerate(self.states)}
        matrix = np.zeros((len(self.states), len(self.states)))
        for (source, target), rate in self.rates.items():
            matrix[index[source], index[target]] += rate
            matrix[index[source], index[source]] -= rate
        return matrix

    def successors(self, state: State) -> t.List[State]:
        return [target for (source, target) in self.rates if source == state]


def arborescences(chain: FiniteChain, root: State) -> t.Iterator[t.Dict[State, State]]:
    """Yield every arborescence rooted at ``root`` as a state -> next-state map.

    Depth-first over the non-root states in chain order, pruning as soon as
    the partial choice closes a cycle.
    """
    others = [s for s in chain.states if s != root]
    options = {s: chain.successors(s) for s in others}
    parent: t.Dict[State, State] = {}

    def closes_cycle(start: State) -> bool:
        seen = {start}
        current = parent[start]
        while current in parent:
            if current in seen:
                return True
            seen.add(current)
            current = parent[current]
        return False

    def extend(index: int) -> t.Iterator[t.Dict[State, State]]:
        if index == len(others):
            yield dict(parent)
            return
        state = others[index]
        for target in options[state]:
            parent[state] = target
            if not closes_cycle(state):
                yield from extend(index + 1)
            del parent[state]

    yield from extend(0)


def arborescence_weight(chain: FiniteChain, tree: t.Mapping[State, State]) -> float:
    return math.prod(chain.rates[source, target] for source, target in tree.items())


def arborescence_count(chain: FiniteChain, root: State) -> int:
    """Number of arborescences rooted at ``root`` (matrix-tree theorem, unit weights)"""
    index = {s: i for i, s in enumerate(chain.states)}
    laplacian = np.zeros((len(chain.states), len(chain.states)))
    for source, target in chain.rates:
        laplacian[index[source], index[source]] += 1
        laplacian[index[source], index[target]] -= 1
    keep = [i for i in range(len(chain.states)) if i != index[root]]
    minor = laplacian[np.ix_(keep, keep)]
    if minor.size == 0:
        return 1
    return int(round(np.linalg.det(minor)))


def mctt_stationary(chain: FiniteChain) -> np.ndarray:
    """Stationary distribution from arborescence weights.

    Returns:
        probabilities in ``chain.states`` order
    """
    weights = np.array([
        sum(arborescence_weight(chain, tree) for tree in arborescences(chain, root))
        for root in chain.states
    ])
    return weights / weights.sum()


def stationary_linear(chain: FiniteChain) -> np.ndarray:
    """Stationary distribution from the balance equations.

    The transposed generator with its last row replaced by ones is solved
    against the last unit vector.

    Returns:
        probabilities in ``chain.states`` order

    Raises:
        NumericalConsistencyError: the balance system is singular
    """
    size = len(chain.states)
    if size == 1:
        return np.ones(1)
    system = chain.generator().T
    system[-1, :] = 1.0
    rhs = np.zeros(size)
    rhs[-1] = 1.0
    lu, pivots = lu_factor(system)
    diagonal = np.abs(np.diag(lu))
    if diagonal.min() <= 1e-14 * diagonal.max():
        raise NumericalConsistencyError(f"balance equations of a {size}-state chain are singular")
    return lu_solve((lu, pivots), rhs)


def random_chain(
    size: int,
    rng: np.random.Generator,
    density: float = 0.4,
    low: float = 0.2,
    high: float = 5.0,
) -> FiniteChain:
    """A random irreducible chain for testing.

    A random cyclic permutation guarantees strong connectivity; every other
    ordered pair is added with probability ``density``. Rates are uniform on
    ``[low, high]``.
    """
    order = rng.permutation(size)
    pairs = {(int(order[i]), int(order[(i + 1) % size])) for i in range(size)} if size > 1 else set()
    for source in range(size):
        for target in range(size):
            if source != target and rng.random() < density:
                pairs.add((source, target))
    rates = {pair: float(rng.uniform(low, high)) for pair in sorted(pairs)}
    return FiniteChain.build(rates, states=range(size))

#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

"""
Discrete counterparts: finite chains, the Markov chain tree theorem and
lattice walks converging to diffusions on a ring or an interval.
"""

from .chain import (
    FiniteChain,
    arborescence_count,
    arborescence_weight,
    arborescences,
    mctt_stationary,
    random_chain,
    stationary_linear,
)
from .ring import (
    MicroTriple,
    admissible_field,
    convergence_table,
    interval_scaling_error,
    interval_walk,
    lattice_density,
    micro_from_macro,
    ring_walk,
    scaling_error,
)

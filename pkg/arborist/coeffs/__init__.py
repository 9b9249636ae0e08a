#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

"""
Coefficients of a diffusion on a metric graph: expressions, quadrature and
edge profiles.
"""

from .expression import Expression, evaluate, parse, pretty
from .profile import (
    Diffusion,
    EdgeProfile,
    Numerics,
    VertexParams,
    build_diffusion,
    cumulative_s,
    oriented_integral,
)
from .quadrature import CumulativeIntegral, integrate

"""Seeded random test data: Grassmann numbers, connections and gauges.

Bodies are drawn as cubes of rationals near 1.  Normalizing on a graph whose
vertex Laplacian has determinant k needs k-th roots of body products, and the
two-vertex graphs have k in {1, 3}, so cube bodies keep every step rational.
"""
from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

from .connection import GraphConnection
from .coords import EdgeCoords
from .fatgraph import Fatgraph
from .grassmann import GrassmannNumber

__all__ = ["CUBE_BODIES", "random_grassmann", "random_unit", "random_coords", "random_connection", "random_gauge"]

CUBE_BODIES = tuple(
    sorted({Fraction(p, q) ** 3 for p in range(1, 6) for q in range(1, 6) if Fraction(1, 3) <= Fraction(p, q) ** 3 <= 3})
)
_COEFFS = tuple(Fraction(p, q) for p in range(-3, 4) for q in (1, 2, 3) if p)


def _rng(rng) -> random.Random:
    return rng if isinstance(rng, random.Random) else random.Random(rng)


def random_grassmann(rng, n: int, parity: int, max_degree: int = 3, density: float = 0.5) -> GrassmannNumber:
    """Homogeneous element with soul terms of degree at most ``max_degree``."""
    rng = _rng(rng)
    terms = {}
    for k in range(1 if parity else 2, max_degree + 1, 2):
        for idx in combinations(range(n), k):
            if rng.random() < density / k:
                terms[sum(1 << i for i in idx)] = rng.choice(_COEFFS)
    return GrassmannNumber(n, terms)


def random_unit(rng, n: int, bodies=CUBE_BODIES, max_degree: int = 3) -> GrassmannNumber:
    rng = _rng(rng)
    return random_grassmann(rng, n, 0, max_degree) + rng.choice(bodies)


def random_coords(rng, n: int, bodies=CUBE_BODIES, fermions: bool = True, max_degree: int = 3) -> EdgeCoords:
    rng = _rng(rng)
    a = random_unit(rng, n, bodies, max_degree)
    b = random_unit(rng, n, bodies, max_degree)
    if fermions:
        al = random_grassmann(rng, n, 1, max_degree)
        be = random_grassmann(rng, n, 1, max_degree)
    else:
        al = be = GrassmannNumber.zero(n)
    return EdgeCoords(a, b, al, be)


def random_connection(graph: Fatgraph, rng, n: int = 6, **kw) -> GraphConnection:
    rng = _rng(rng)
    return GraphConnection(graph, {e: random_coords(rng, n, **kw) for e in sorted(graph.edges)}, n=n)


def random_gauge(graph: Fatgraph, rng, n: int = 6, **kw) -> dict[int, EdgeCoords]:
    rng = _rng(rng)
    return {v: random_coords(rng, n, **kw) for v in sorted(graph.vertices)}

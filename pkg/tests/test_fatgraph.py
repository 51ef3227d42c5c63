from __future__ import annotations

import random

import pytest

from gl11graph.fatgraph import (
    Fatgraph,
    FatgraphError,
    GraphFormatError,
    find_isomorphism,
    identify_flip_frame,
    standard_graph,
    surface_invariants,
    whitehead_flip,
)


def face_count(vertices: dict, edges: dict) -> int:
    """Orbits of (next dart around the vertex) after (other end of the edge)."""
    nxt = {}
    for ds in vertices.values():
        for i, d in enumerate(ds):
            nxt[d] = ds[(i + 1) % len(ds)]
    pair = {}
    for d1, d2 in edges.values():
        pair[d1], pair[d2] = d2, d1
    seen, count = set(), 0
    for d in pair:
        if d in seen:
            continue
        count += 1
        while d not in seen:
            seen.add(d)
            d = nxt[pair[d]]
    return count


def random_trivalent(rng: random.Random, v: int) -> Fatgraph:
    while True:
        darts = list(range(3 * v))
        rng.shuffle(darts)
        edges = {i: (darts[2 * i], darts[2 * i + 1]) for i in range(3 * v // 2)}
        vertices = {i: (3 * i, 3 * i + 1, 3 * i + 2) for i in range(v)}
        try:
            return Fatgraph(vertices, edges)
        except FatgraphError:
            continue


def test_standard_graph_invariants():
    assert surface_invariants(standard_graph("theta1")).as_tuple() == (1, 1, 2, 3)
    assert surface_invariants(standard_graph("theta0")).as_tuple() == (0, 3, 2, 3)
    assert surface_invariants(standard_graph("dumbbell")).as_tuple() == (0, 3, 2, 3)
    assert surface_invariants(standard_graph("k4")).as_tuple() == (0, 4, 4, 6)


def test_faces_match_independent_count():
    rng = random.Random(4)
    for _ in range(30):
        g = random_trivalent(rng, rng.choice((2, 4, 6)))
        inv = surface_invariants(g)
        assert inv.punctures == face_count(g.vertices, g.edges) == len(g.faces())
        assert inv.vertex_count == 2 * (2 * inv.genus - 2 + inv.punctures)


def test_flip_preserves_topology_and_double_flip_is_isomorphic():
    rng = random.Random(8)
    for _ in range(20):
        g = random_trivalent(rng, rng.choice((2, 4, 6)))
        e = rng.choice([e for e in g.edges if not g.is_loop(e)] or [None])
        if e is None:
            continue
        g1, record = whitehead_flip(g, e)
        assert surface_invariants(g1).as_tuple() == surface_invariants(g).as_tuple()
        g2, _ = whitehead_flip(g1, record["edges"][e])
        fr = identify_flip_frame(g, e)
        involved = set(g.vertices[fr.u]) | set(g.vertices[fr.v])
        fixed = {d: d for d in g.darts if d not in involved}
        assert find_isomorphism(g, g2, fixed) is not None


def test_flip_on_genus_one_graph():
    g = standard_graph("theta1")
    g1, _ = whitehead_flip(g, 0)
    assert g1.is_trivalent()
    assert surface_invariants(g1).as_tuple() == (1, 1, 2, 3)


def test_flip_frame_is_deterministic_and_dart_level():
    g = standard_graph("theta1")
    fr = identify_flip_frame(g, 0)
    assert fr == identify_flip_frame(g, 0)
    assert len(set(fr.labels().values())) == 4
    # a, b follow the head dart around v; c, d follow the tail dart around u
    assert (g.rotate(fr.head), g.rotate(g.rotate(fr.head))) == (fr.a, fr.b)
    assert (g.rotate(fr.tail), g.rotate(g.rotate(fr.tail))) == (fr.c, fr.d)


def test_loop_flip_rejected():
    g = standard_graph("dumbbell")
    loop = next(e for e in g.edges if g.is_loop(e))
    with pytest.raises(FatgraphError):
        whitehead_flip(g, loop)


def test_malformed_pairing_names_dart():
    with pytest.raises(FatgraphError, match="dart 4"):
        Fatgraph({0: (0, 2, 4), 1: (1, 3, 5)}, {0: (0, 1), 1: (2, 3), 2: (4, 4)})
    with pytest.raises(FatgraphError, match="dart 4 is not paired"):
        Fatgraph({0: (0, 2, 4), 1: (1, 3, 5)}, {0: (0, 1), 1: (2, 3)})
    with pytest.raises(FatgraphError, match="dart 2"):
        Fatgraph({0: (0, 2, 4), 1: (1, 2, 5)}, {0: (0, 1), 1: (2, 4)})


def test_text_round_trip_and_errors():
    g = standard_graph("k4")
    g2, gens = Fatgraph.from_text(g.to_text(5))
    assert g2 == g and gens == 5
    with pytest.raises(GraphFormatError):
        Fatgraph.from_text("v 0: 0,1\nbogus line\n")
    with pytest.raises(FatgraphError):
        Fatgraph.from_text("v 0: 0,1\ne 0: 0-1\n")


def test_ciliation():
    g = standard_graph("theta1")
    h = g.with_ciliation({0: 2})
    assert h.cilium(0) == 2 and h.cilium(1) == g.cilium(1)
    assert find_isomorphism(g, h) is not None
    with pytest.raises(FatgraphError):
        g.with_ciliation({0: 1})

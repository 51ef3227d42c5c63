from __future__ import annotations

import random
from fractions import Fraction

import pytest

from gl11graph.connection import GraphConnection, gauge_transform, identity_connection
from gl11graph.coords import EdgeCoords, identity_coords
from gl11graph.fatgraph import standard_graph
from gl11graph.grassmann import GrassmannNumber
from gl11graph.normalize import (
    NormalizationError,
    check_gauge_constraints,
    constraints_hold,
    incidence_matrix,
    is_gauge_equivalent,
    normal_form,
    normalize,
    residual_dimensions,
    solve_gauge,
)
from gl11graph.sampling import random_connection, random_gauge

N = 4


def test_constraint_examples():
    gr = standard_graph("theta1")
    c = identity_connection(gr, N)
    assert constraints_hold(c)
    one, zero = GrassmannNumber.one(N), GrassmannNumber.zero(N)
    bumped = c.replace({0: EdgeCoords(2 * one, one, zero, zero)})
    report = check_gauge_constraints(bumped)
    ends = {gr.vertex_of(d) for d in gr.edges[0]}
    assert {v for v, r in report.items() if not r.a_ok} == ends
    assert all(r.b_ok and r.alpha_ok and r.beta_ok for r in report.values())


def test_constrained_connection_is_fixed():
    nf = normal_form(identity_connection(standard_graph("k4"), N))
    assert nf.connection == identity_connection(standard_graph("k4"), N)
    assert all(h == identity_coords(N) for h in nf.gauge.values())


@pytest.mark.parametrize("name", ["theta1", "theta0", "dumbbell", "k4"])
def test_normal_form_properties(name):
    rng = random.Random(name)
    gr = standard_graph(name)
    # k4 has 16 spanning trees, so its bodies are drawn among 16th powers
    kw = {"bodies": (Fraction(1), Fraction(2) ** 16, Fraction(1, 3) ** 16)} if name == "k4" else {}
    for _ in range(3):
        c = random_connection(gr, rng, n=N, max_degree=2, **kw)
        h = random_gauge(gr, rng, n=N, max_degree=2)
        nf = normal_form(c)
        assert constraints_hold(nf.connection)
        assert gauge_transform(c, nf.gauge) == nf.connection
        assert normal_form(nf.connection).connection == nf.connection
        assert normal_form(gauge_transform(c, h)).connection == nf.connection


def test_degenerate_bodies_still_canonical():
    # with every b body equal no edge pins the odd steps; a shift direction survives
    rng = random.Random(12)
    gr = standard_graph("theta1")
    for _ in range(2):
        c = random_connection(gr, rng, n=N, max_degree=2, bodies=(Fraction(1),))
        h = random_gauge(gr, rng, n=N, max_degree=2)
        nf = normal_form(c)
        assert nf.pins["alpha"] is None and nf.canonical
        assert normal_form(gauge_transform(c, h)).connection == nf.connection


def test_normalize_returns_gauge():
    c = random_connection(standard_graph("theta0"), random.Random(2), n=N)
    conn, gauge = normalize(c)
    assert gauge_transform(c, gauge) == conn


def test_equivalence_examples():
    rng = random.Random(3)
    gr = standard_graph("theta1")
    c = random_connection(gr, rng, n=N)
    h = random_gauge(gr, rng, n=N)
    moved = gauge_transform(c, h)
    res = is_gauge_equivalent(c, moved)
    assert res and res.method == "normal-form"
    assert gauge_transform(c, res.witness) == moved
    same = is_gauge_equivalent(c, c)
    assert same and gauge_transform(c, same.witness) == c
    one, zero = GrassmannNumber.one(N), GrassmannNumber.zero(N)
    ident = identity_connection(gr, N)
    bumped = ident.replace({0: EdgeCoords(2 * one, one, zero, zero)})
    assert not is_gauge_equivalent(ident, bumped)


def test_linear_solve_agrees():
    rng = random.Random(4)
    gr = standard_graph("theta0")
    c = random_connection(gr, rng, n=3, max_degree=2)
    moved = gauge_transform(c, random_gauge(gr, rng, n=3, max_degree=2))
    h = solve_gauge(c, moved)
    assert h is not None and gauge_transform(c, h) == moved
    other = random_connection(gr, rng, n=3, max_degree=2)
    assert solve_gauge(c, other) is None or not is_gauge_equivalent(c, other)


def test_residual_dimensions():
    for name in ("theta1", "theta0"):
        d = residual_dimensions(standard_graph(name))
        assert (d.chart, d.moduli, d.fiber) == (6, 4, 2)
    d = residual_dimensions(standard_graph("k4"))
    assert (d.chart, d.moduli) == (12, 6)
    assert len(incidence_matrix(standard_graph("k4"))) == 4


def test_irrational_root_raises_and_equivalence_falls_back():
    gr = standard_graph("k4")
    one, zero = GrassmannNumber.one(N), GrassmannNumber.zero(N)
    c = identity_connection(gr, N).replace({0: EdgeCoords(one, 2 * one, zero, zero)})
    with pytest.raises(NormalizationError, match="irrational"):
        normal_form(c)
    res = is_gauge_equivalent(c, c)
    assert res and res.method == "linear-solve"


def test_errors():
    gr = standard_graph("theta1")
    with pytest.raises(NormalizationError):
        normal_form(identity_connection(gr, N), base=7)
    with pytest.raises(NormalizationError):
        is_gauge_equivalent(identity_connection(gr, N), identity_connection(standard_graph("k4"), N))

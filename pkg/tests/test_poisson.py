from __future__ import annotations

import random
from fractions import Fraction

import pytest

from gl11graph.connection import holonomy
from gl11graph.coords import EdgeCoords, from_matrix, to_matrix
from gl11graph.fatgraph import standard_graph
from gl11graph.grassmann import GrassmannNumber
from gl11graph.observables import Observable, super_bracket, sym
from gl11graph.observables import evaluate as evaluate_at
from gl11graph.poisson import (
    BASIS,
    TensorSquare,
    antisym_part,
    bracket,
    casimir,
    cybe_residual,
    edge_vector_fields,
    evaluate,
    flip,
    hatted_vector_fields,
    holonomy_observable,
    simplified_hatted_vector_fields,
    standard_r,
    structure_bracket,
    symmetric_part,
)
from gl11graph.sampling import random_connection, random_coords
from gl11graph.supermatrix import generators, identity, lie_bracket, smul, supertrace

HALF = Fraction(1, 2)


def test_structure_constants_match_matrices():
    e = generators(2)
    for x in BASIS:
        for y in BASIS:
            got = lie_bracket(e[x], e[y])
            want = None
            for k, q in structure_bracket(x, y).items():
                term = e[k].scale(q)
                want = term if want is None else want + term
            if want is None:
                assert got.is_zero()
            else:
                assert (got.a, got.alpha, got.beta, got.b) == (want.a, want.alpha, want.beta, want.b)


def test_r_matrix_parts():
    r = standard_r()
    assert symmetric_part(r) == casimir()
    assert antisym_part(casimir()).is_zero()
    assert antisym_part(r) == TensorSquare.from_dict({("Psi+", "Psi-"): -1, ("Psi-", "Psi+"): -1})
    assert flip(flip(r)) == r


def test_cybe():
    assert not any(cybe_residual(standard_r()).values())
    assert not any(cybe_residual(flip(standard_r())).values())
    assert not any(cybe_residual(TensorSquare.from_dict({})).values())
    # [Psi+, Psi+] = 0, so Psi+ (x) Psi+ solves the equation trivially
    assert not any(cybe_residual(TensorSquare.from_dict({("Psi+", "Psi+"): 1})).values())
    assert any(cybe_residual(TensorSquare.from_dict({("Psi+", "Psi-"): 1})).values())
    assert any(cybe_residual(casimir()).values())


def test_inbound_field_values():
    x = edge_vector_fields(0)
    a, b, al, be = (sym(k, 0) for k in ("a", "b", "alpha", "beta"))
    assert x["E"](a) == a and x["E"](b).is_zero()
    assert x["Psi+"](al) == Observable.constant(1)
    assert x["Psi+"](a) == (a * b * b * be).scale(-HALF)
    anti = super_bracket(x["Psi+"], x["Psi-"])
    assert anti == -x["E"]


@pytest.mark.parametrize("inbound", [True, False])
def test_fields_are_infinitesimal_group_actions(inbound):
    # inbound: (1 + t e) g = g + t X(g); outbound: g (1 - t e) = g + t X(g)
    n = 6
    rng = random.Random(3)
    point = random_coords(rng, 4, max_degree=2)
    lift = lambda x: GrassmannNumber(n, x.terms)  # noqa: E731
    g = EdgeCoords(*(lift(x) for x in point.astuple()))
    values = {("a", 0): g.a, ("b", 0): g.b, ("alpha", 0): g.alpha, ("beta", 0): g.beta}
    fields = edge_vector_fields(0, inbound)
    e = generators(n)
    for k in BASIS:
        t = GrassmannNumber.monomial((6,), n) if k.startswith("Psi") else GrassmannNumber.monomial((5, 6), n)
        step = e[k].left_multiply(t)
        m = smul(identity(n) + step, to_matrix(g)) if inbound else smul(to_matrix(g), identity(n) - step)
        moved = from_matrix(m)
        for kind, old, new in zip(("a", "b", "alpha", "beta"), g.astuple(), moved.astuple()):
            assert new - old == t * evaluate_at(fields[k](sym(kind, 0)), values, n), (k, kind)


def test_hatted_fields():
    hat, shown = hatted_vector_fields(0), simplified_hatted_vector_fields(0)
    ah, alh = sym("a_hat", 0), sym("alpha_hat", 0)
    assert hat["Psi+"](alh) == Observable.constant(1)
    assert hat["Psi+"](ah).is_zero()
    assert hat["E"](ah) == ah
    for k in BASIS:
        for s in ("a_hat", "b_hat", "alpha_hat", "beta_hat"):
            assert hat[k](sym(s, 0)) == shown[k](sym(s, 0))


def test_bracket_locality_and_antisymmetry():
    g = standard_graph("k4")
    # edges 0 (vertices 0, 1) and 5 (vertices 2, 3) share no vertex
    assert bracket(sym("a", 0), sym("b", 5), g).is_zero()
    f = sym("a", 0) * sym("b", 1) + sym("alpha", 0) * sym("beta", 2)
    assert bracket(f, f, g).is_zero()
    h = sym("alpha", 1) * sym("a", 2)
    assert bracket(f, h, g) == -bracket(h, f, g)


def test_split_and_wedge_forms_agree():
    g = standard_graph("theta1")
    c = random_connection(g, random.Random(5), n=4, max_degree=2)
    f = holonomy_observable(g, [0, 3])
    h = sym("a", 1) * sym("alpha", 2)
    split = bracket(f, h, g)
    assert split == bracket(f, h, g, form="wedge")
    assert evaluate(split, c) == evaluate(bracket(f, h, g, form="wedge"), c)


def test_reduced_bracket_independence():
    g = standard_graph("theta1")
    f1, f2 = holonomy_observable(g, [0, 3]), holonomy_observable(g, [0, 5])
    base = bracket(f1, f2, g)
    assert not base.is_zero()
    assert bracket(f1, f2, g, ciliation={0: 2, 1: 3}) == base
    assert bracket(f1, f2, g, r=casimir()) == base
    # boundary supertraces are Casimirs of the bracket
    t0 = standard_graph("theta0")
    faces = [holonomy_observable(t0, face) for face in t0.faces()]
    assert bracket(faces[0], faces[1], t0).is_zero()
    assert bracket(holonomy_observable(g, g.faces()[0]), f1, g).is_zero()


def test_holonomy_observable():
    g = standard_graph("dumbbell")
    assert holonomy_observable(g, []).is_zero()
    loop = holonomy_observable(g, [2])
    a, b = sym("a", 1), sym("b", 1)
    values = {("a", 1): GrassmannNumber.scalar(3, 2), ("b", 1): GrassmannNumber.scalar(2, 2)}
    for s in ("alpha", "beta"):
        values[(s, 1)] = GrassmannNumber.zero(2)
    assert evaluate_at(loop, values, 2) == evaluate_at(a / b - a * b, values, 2)
    c = random_connection(standard_graph("theta1"), random.Random(6), n=4)
    for cycle in ([0, 3], [0, 5], [0, 1, 2, 3, 4, 5]):
        try:
            obs = holonomy_observable(c.graph, cycle)
        except ValueError:
            continue
        assert evaluate(obs, c) == supertrace(holonomy(c, cycle))
    with pytest.raises(ValueError):
        holonomy_observable(standard_graph("theta1"), [0])


def test_evaluate_at_connection():
    c = random_connection(standard_graph("theta1"), random.Random(7), n=4)
    assert evaluate(sym("a", 1), c) == c.value(1).a
    assert evaluate(sym("alpha", 2) * sym("beta", 2), c) == c.value(2).alpha * c.value(2).beta
    with pytest.raises(ValueError):
        bracket(sym("a", 9), sym("a", 0), c.graph)

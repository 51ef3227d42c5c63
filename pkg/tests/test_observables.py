from __future__ import annotations

import random
from fractions import Fraction

import pytest

from gl11graph.grassmann import GrassmannNumber
from gl11graph.observables import (
    Derivation,
    Observable,
    ObservableError,
    edge_symbols,
    evaluate,
    substitute,
    super_bracket,
    sym,
)
from gl11graph.sampling import random_grassmann, random_unit

N = 5
SYMBOLS = [(k, e) for e in (0, 1) for k in ("a", "b", "alpha", "beta")]


def random_point(rng):
    return {
        s: random_unit(rng, N, max_degree=2) if s[0] in ("a", "b") else random_grassmann(rng, N, 1, max_degree=3)
        for s in SYMBOLS
    }


def random_observable(rng, parity=None):
    f = Observable()
    for _ in range(rng.randint(1, 3)):
        t = Observable.constant(Fraction(rng.randint(-3, 3), rng.randint(1, 3)))
        for _ in range(rng.randint(0, 2)):
            t = t * sym(rng.choice("ab"), rng.choice((0, 1))) ** rng.choice((1, -1, 2))
        odd = rng.sample([s for s in SYMBOLS if s[0] in ("alpha", "beta")], parity if parity is not None else rng.randint(0, 2))
        for s in odd:
            t = t * Observable.symbol(s)
        f = f + t
    return f


def test_evaluation_is_a_ring_homomorphism():
    rng = random.Random(1)
    for _ in range(40):
        point = random_point(rng)
        f, h = random_observable(rng), random_observable(rng)
        ev = lambda x: evaluate(x, point, N)  # noqa: E731
        assert ev(f * h) == ev(f) * ev(h)
        assert ev(f + h) == ev(f) + ev(h)
        assert ev(f - h.scale(3)) == ev(f) - ev(h).scale(3)


def test_odd_symbols_anticommute():
    al, be = sym("alpha", 0), sym("beta", 0)
    assert al * be == -(be * al)
    assert (al * al).is_zero()
    assert (al * be).is_even() and al.is_odd()


def test_inverse_and_powers():
    a, b, al, be = edge_symbols(0)
    u = a + al * be
    assert u * u.inverse() == Observable.constant(1)
    assert a ** -2 * a ** 2 == Observable.constant(1)
    with pytest.raises(ObservableError):
        al.inverse()


def test_substitute_matches_evaluation():
    rng = random.Random(2)
    a, b, al, be = edge_symbols(0)
    mapping = {("a", 0): a * b, ("alpha", 0): al + be * a}
    for _ in range(10):
        f = random_observable(rng)
        point = random_point(rng)
        image = {s: evaluate(m, point, N) for s, m in mapping.items()}
        moved = dict(point)
        moved.update(image)
        assert evaluate(substitute(f, mapping), point, N) == evaluate(f, moved, N)


def test_derivation_leibniz_rule():
    rng = random.Random(3)
    a, b, al, be = edge_symbols(0)
    d_even = Derivation(0, {("a", 0): a, ("alpha", 0): al})
    d_odd = Derivation(1, {("alpha", 0): Observable.constant(1), ("a", 0): a * b * be})
    for d in (d_even, d_odd):
        for _ in range(20):
            p = rng.randint(0, 1)
            f, h = random_observable(rng, p), random_observable(rng)
            sign = (-1) ** (d.parity * p)
            assert d(f * h) == d(f) * h + (f * d(h)).scale(sign)


def test_super_bracket_of_odd_fields():
    a, b, al, be = edge_symbols(0)
    x = Derivation(1, {("alpha", 0): Observable.constant(1)})
    y = Derivation(1, {("beta", 0): Observable.constant(1)})
    assert super_bracket(x, y).is_zero()
    z = Derivation(1, {("beta", 0): a})
    w = Derivation(0, {("a", 0): a})
    assert super_bracket(w, z) == Derivation(1, {("beta", 0): a})


def test_derivation_parity_check():
    with pytest.raises(ObservableError):
        Derivation(0, {("a", 0): sym("alpha", 0)})


def test_evaluate_errors_and_data():
    with pytest.raises(ObservableError):
        evaluate(sym("a", 3), {}, N)
    f = random_observable(random.Random(4))
    assert Observable.from_data(f.to_data()) == f
    assert evaluate(Observable.constant(Fraction(2, 3)), {}, N) == GrassmannNumber.scalar(Fraction(2, 3), N)

from __future__ import annotations

from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gl11graph.grassmann import (
    GrassmannError,
    GrassmannNumber,
    NotInvertibleError,
    body,
    gadd,
    ginv,
    gmul,
    gscale,
    gsqrt,
    koszul_sign,
    parity_of,
    rational_root,
    soul,
)

N = 4


def b(*idx, c=1, n=N):
    return GrassmannNumber.monomial(idx, n, c)


def one(n=N):
    return GrassmannNumber.one(n)


def oracle_product(x: dict, y: dict) -> dict:
    """Multiply index-tuple dicts by sorting concatenated words with a bubble sort."""
    out: dict = {}
    for (i, p), (j, q) in product(x.items(), y.items()):
        word = list(i) + list(j)
        if len(set(word)) < len(word):
            continue
        sign = 1
        for s in range(len(word)):
            for t in range(len(word) - 1 - s):
                if word[t] > word[t + 1]:
                    word[t], word[t + 1] = word[t + 1], word[t]
                    sign = -sign
        key = tuple(word)
        out[key] = out.get(key, 0) + sign * p * q
    return {k: v for k, v in out.items() if v}


subsets = st.lists(st.integers(1, N), unique=True, max_size=N).map(lambda xs: tuple(sorted(xs)))
coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=4)
elements = st.dictionaries(subsets, coeffs, max_size=6).map(
    lambda d: {k: v for k, v in d.items() if v}
)


def from_dict(d: dict) -> GrassmannNumber:
    x = GrassmannNumber.zero(N)
    for idx, q in d.items():
        x = x + b(*idx, c=q)
    return x


def homogeneous(parity: int):
    return elements.map(lambda d: {k: v for k, v in d.items() if len(k) % 2 == parity})


@settings(max_examples=150, deadline=None)
@given(elements, elements)
def test_product_matches_sorting_oracle(x, y):
    assert dict(gmul(from_dict(x), from_dict(y)).items()) == oracle_product(x, y)


@settings(max_examples=150, deadline=None)
@given(elements, elements, elements)
def test_associativity(x, y, z):
    x, y, z = map(from_dict, (x, y, z))
    assert (x * y) * z == x * (y * z)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 1), st.integers(0, 1), st.data())
def test_supercommutativity(p, q, data):
    x = from_dict(data.draw(homogeneous(p)))
    y = from_dict(data.draw(homogeneous(q)))
    assert x * y == (y * x).scale((-1) ** (p * q))


@settings(max_examples=100, deadline=None)
@given(elements)
def test_soul_nilpotent(x):
    s = soul(from_dict(x))
    assert s ** (N + 1) == GrassmannNumber.zero(N)


@settings(max_examples=100, deadline=None)
@given(elements, st.fractions(min_value=Fraction(1, 3), max_value=7, max_denominator=5))
def test_inverse_and_sqrt(x, q):
    u = soul(from_dict(x)) + q * q
    assert u * ginv(u) == one()
    assert gsqrt(u) ** 2 == u
    assert gsqrt(u).body > 0


def test_koszul_sign_of_generators():
    assert koszul_sign(0b01, 0b10) == 1
    assert koszul_sign(0b10, 0b01) == -1
    assert koszul_sign(0b011, 0b100) == 1
    assert koszul_sign(0b100, 0b011) == 1


def test_multiplication_examples():
    assert gmul(b(1), b(2)) == b(1, 2)
    assert gmul(b(2), b(1)) == -b(1, 2)
    assert gmul(b(1, 2), b(2)).is_zero()
    assert gmul(one() + b(1), one() + b(2)) == one() + b(1) + b(2) + b(1, 2)


def test_addition_examples():
    assert gadd(b(1), gscale(-1, b(1))).is_zero()
    assert gscale(2, one() + b(1, 2)) == 2 * one() + 2 * b(1, 2)
    assert gadd(one() + b(1), one() - b(1)) == 2 * one()


def test_body_and_soul():
    x = 2 * one() + 3 * b(1, 2)
    assert body(x) == 2
    assert soul(x) == 3 * b(1, 2)
    assert body(b(1)) == 0


def test_inverse_examples():
    assert ginv(2 * one() + b(1, 2)) == Fraction(1, 2) * one() - Fraction(1, 4) * b(1, 2)
    assert ginv(one()) == one()
    # (b1 + b2)^2 = 0, so the series stops after the linear term
    u = one() + b(1) + b(2)
    assert ginv(u) == one() - b(1) - b(2)
    assert u * ginv(u) == one()
    assert u * (one() - b(1) - b(2) + 2 * b(1, 2)) != one()
    with pytest.raises(NotInvertibleError):
        ginv(b(1))


def test_sqrt_examples():
    assert gsqrt(one() + b(1, 2)) == one() + Fraction(1, 2) * b(1, 2)
    assert gsqrt(4 * one()) == 2 * one()
    assert gsqrt(9 * one() + 6 * b(1, 2)) == 3 * one() + b(1, 2)
    with pytest.raises(GrassmannError):
        gsqrt(2 * one())
    with pytest.raises(GrassmannError):
        gsqrt(-one())


def test_parity():
    assert parity_of(b(1, 2)) == "even"
    assert parity_of(b(1) + b(1, 2, 3)) == "odd"
    assert parity_of(one() + b(1)) == "mixed"


def test_rational_root():
    assert rational_root(Fraction(27, 8), 3) == Fraction(3, 2)
    with pytest.raises(GrassmannError):
        rational_root(Fraction(2), 2)


def test_text_round_trip():
    x = Fraction(1, 3) * one() - Fraction(5, 2) * b(1, 3) + b(2)
    assert GrassmannNumber.from_text(x.to_text(), N) == x
    assert GrassmannNumber.from_text("[]", N).is_zero()
    for bad in ("1.2:3", "[2.1:1]", "[5:1]", "[1:x]", "[1]"):
        with pytest.raises(GrassmannError):
            GrassmannNumber.from_text(bad, N)


def test_generator_count_mismatch():
    with pytest.raises(GrassmannError):
        GrassmannNumber.one(3) * GrassmannNumber.one(4)

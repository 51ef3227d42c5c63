from __future__ import annotations

import random
from fractions import Fraction

import pytest

from gl11graph.coords import to_matrix
from gl11graph.grassmann import GrassmannNumber
from gl11graph.sampling import random_coords
from gl11graph.supermatrix import (
    Supermatrix,
    SupermatrixError,
    diag,
    gaussian_decompose,
    gaussian_recompose,
    generators,
    identity,
    is_gl11,
    lie_bracket,
    sinv,
    smul,
    supertrace,
)

N = 4
G = generators(N)


def g(q=1):
    return GrassmannNumber.scalar(q, N)


def b(*idx):
    return GrassmannNumber.monomial(idx, N)


def mat(a, alpha, beta, d, parity=0):
    return Supermatrix(a, alpha, beta, d, parity)


def entries_equal(x, y):
    return (x.a, x.alpha, x.beta, x.b) == (y.a, y.alpha, y.beta, y.b)


def test_anticommutator_of_odd_generators_is_identity():
    s = smul(G["Psi+"], G["Psi-"]) + smul(G["Psi-"], G["Psi+"])
    assert entries_equal(s, G["E"])


def test_gl11_relations():
    assert entries_equal(lie_bracket(G["N"], G["Psi+"]), G["Psi+"])
    assert entries_equal(lie_bracket(G["N"], G["Psi-"]), G["Psi-"].scale(-1))
    for x in G.values():
        assert lie_bracket(G["E"], x).is_zero()
    assert lie_bracket(G["Psi+"], G["Psi+"]).is_zero()
    assert smul(G["Psi+"], G["Psi+"]).is_zero()


def test_supertrace_examples():
    assert supertrace(G["E"]).is_zero()
    assert supertrace(G["N"]) == g(1)


def test_identity_and_inverse_examples():
    rng = random.Random(3)
    x = to_matrix(random_coords(rng, N))
    assert smul(identity(N), x) == x
    assert smul(x, sinv(x)) == identity(N)
    assert sinv(identity(N)) == identity(N)
    assert sinv(diag(g(2), g(3))) == diag(g(Fraction(1, 2)), g(Fraction(1, 3)))


def test_gaussian_examples():
    u, (d1, d2), l = gaussian_decompose(identity(N))
    assert u.is_zero() and l.is_zero() and d1 == g() and d2 == g()
    x = mat(g(), b(1), b(2), g())
    u, (d1, d2), l = gaussian_decompose(x)
    assert (u, d1, d2, l) == (b(1), g() + b(1, 2), g(), b(2))
    assert gaussian_recompose(u, (d1, d2), l) == x


def test_random_matrix_identities():
    rng = random.Random(11)
    for _ in range(25):
        x, y, z = (to_matrix(random_coords(rng, N)) for _ in range(3))
        assert smul(smul(x, y), z) == smul(x, smul(y, z))
        assert gaussian_recompose(*gaussian_decompose(x)) == x
        assert supertrace(smul(y, smul(x, sinv(y)))) == supertrace(x)
        assert is_gl11(x)


def test_parity_validation():
    with pytest.raises(SupermatrixError):
        mat(b(1), g(), g(), g())
    with pytest.raises(SupermatrixError):
        sinv(mat(g(-1), GrassmannNumber.zero(N), GrassmannNumber.zero(N), g()))

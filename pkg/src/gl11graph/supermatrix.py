"""2x2 supermatrices over a supercommutative ring and the group GL(1|1).

A supermatrix is stored as ``x11 E11 + x12 E12 + x21 E21 + x22 E22`` with the
coefficients on the left of odd basis elements E12, E21.  Multiplying
``(x E_ij)(y E_jk)`` picks up ``(-1)^{p(E_ij) |y|}``; for even (group-like)
matrices this gives

    [[a, al], [be, b]] [[c, ga], [de, d]]
        = [[ac - al de, a ga + d al], [c be + b de, bd - be ga]].

Entries may be :class:`GrassmannNumber` or symbolic observables; anything with
ring operators and ``is_even``/``is_odd`` works.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .grassmann import GrassmannError, GrassmannNumber

__all__ = [
    "Supermatrix",
    "SupermatrixError",
    "AlgebraElement",
    "smul",
    "sinv",
    "supertrace",
    "lie_bracket",
    "gaussian_decompose",
    "gaussian_recompose",
    "identity",
    "diag",
    "upper",
    "lower",
    "generators",
    "is_gl11",
]

# parity of the basis element E_ij, indexed (row, col) with 0-based positions
_BASIS_PARITY = ((0, 1), (1, 0))


class SupermatrixError(ValueError):
    pass


def _parity_ok(x: Any, parity: int) -> bool:
    return x.is_odd() if parity else x.is_even()


@dataclass(frozen=True)
class Supermatrix:
    """Homogeneous 2x2 supermatrix; ``parity`` 0 for group-like matrices."""

    a: Any
    alpha: Any
    beta: Any
    b: Any
    parity: int = 0

    def __post_init__(self):
        for name, (i, j) in (("a", (0, 0)), ("alpha", (0, 1)), ("beta", (1, 0)), ("b", (1, 1))):
            want = (self.parity + _BASIS_PARITY[i][j]) % 2
            if not _parity_ok(getattr(self, name), want):
                kind = "odd" if want else "even"
                raise SupermatrixError(
                    f"entry {name} of a parity-{self.parity} supermatrix must be {kind}"
                )

    def entry(self, i: int, j: int):
        return ((self.a, self.alpha), (self.beta, self.b))[i][j]

    def entries(self) -> tuple:
        return (self.a, self.alpha, self.beta, self.b)

    def __matmul__(self, other: "Supermatrix") -> "Supermatrix":
        return smul(self, other)

    def __add__(self, other: "Supermatrix") -> "Supermatrix":
        if self.parity != other.parity:
            raise SupermatrixError("cannot add supermatrices of different parity")
        return Supermatrix(
            self.a + other.a, self.alpha + other.alpha, self.beta + other.beta,
            self.b + other.b, self.parity,
        )

    def __sub__(self, other: "Supermatrix") -> "Supermatrix":
        return self + other.scale(-1)

    def scale(self, q) -> "Supermatrix":
        return Supermatrix(self.a * q, self.alpha * q, self.beta * q, self.b * q, self.parity)

    def left_multiply(self, x) -> "Supermatrix":
        """x * M for a homogeneous ring element x (coefficients multiplied on the left)."""
        px = 1 if x.is_odd() and not x.is_zero() else 0
        return Supermatrix(
            x * self.a, x * self.alpha, x * self.beta, x * self.b, (self.parity + px) % 2
        )

    def is_zero(self) -> bool:
        return all(e.is_zero() for e in self.entries())

    def __str__(self) -> str:
        return f"[[{self.a}, {self.alpha}], [{self.beta}, {self.b}]]"


def smul(x: Supermatrix, y: Supermatrix) -> Supermatrix:
    """Product of homogeneous supermatrices with the super sign rule."""
    out = [[None, None], [None, None]]
    for i in range(2):
        for k in range(2):
            acc = None
            for j in range(2):
                yc = y.entry(j, k)
                term = x.entry(i, j) * yc
                if _BASIS_PARITY[i][j] and (y.parity + _BASIS_PARITY[j][k]) % 2:
                    term = -term
                acc = term if acc is None else acc + term
            out[i][k] = acc
    return Supermatrix(out[0][0], out[0][1], out[1][0], out[1][1], (x.parity + y.parity) % 2)


def supertrace(x: Supermatrix):
    return x.a - x.b


def lie_bracket(x: Supermatrix, y: Supermatrix) -> Supermatrix:
    """Super commutator XY - (-1)^{|X||Y|} YX."""
    xy = smul(x, y)
    yx = smul(y, x)
    if x.parity and y.parity:
        return xy + yx
    return xy - yx


def _one_like(x):
    if isinstance(x, GrassmannNumber):
        return GrassmannNumber.one(x.n)
    return x.one_like()


def _zero_like(x):
    return x - x


def identity(n: int) -> Supermatrix:
    one = GrassmannNumber.one(n)
    zero = GrassmannNumber.zero(n)
    return Supermatrix(one, zero, zero, one)


def diag(x, y) -> Supermatrix:
    z = _zero_like(x)
    return Supermatrix(x, z, z, y)


def upper(t) -> Supermatrix:
    """Unipotent [[1, t], [0, 1]] for odd t."""
    one = _one_like(t)
    z = _zero_like(t)
    return Supermatrix(one, t, z, one)


def lower(t) -> Supermatrix:
    """Unipotent [[1, 0], [t, 1]] for odd t."""
    one = _one_like(t)
    z = _zero_like(t)
    return Supermatrix(one, z, t, one)


def is_gl11(x: Supermatrix) -> bool:
    """Even supermatrix in the identity component (positive diagonal bodies)."""
    return x.parity == 0 and x.a.body > 0 and x.b.body > 0


def _require_gl11(x: Supermatrix) -> None:
    if x.parity != 0:
        raise SupermatrixError("group elements must be even supermatrices")
    if x.a.body <= 0 or x.b.body <= 0:
        raise SupermatrixError(
            f"not in the identity component: diagonal bodies {x.a.body}, {x.b.body}"
        )


def gaussian_decompose(x: Supermatrix):
    """X = upper(al/b) . diag(a + al be / b, b) . lower(be/b).

    Returns ``(upper_param, (d1, d2), lower_param)``.
    """
    if x.parity != 0:
        raise SupermatrixError("Gaussian factorization needs an even supermatrix")
    if x.b.body == 0:
        raise SupermatrixError("bottom-right entry is not invertible")
    binv = x.b.inverse()
    return (x.alpha * binv, (x.a + x.alpha * x.beta * binv, x.b), x.beta * binv)


def gaussian_recompose(upper_param, diagonal, lower_param) -> Supermatrix:
    d1, d2 = diagonal
    return smul(smul(upper(upper_param), diag(d1, d2)), lower(lower_param))


def sinv(x: Supermatrix) -> Supermatrix:
    """Group inverse, assembled from the inverted Gaussian factors."""
    _require_gl11(x)
    u, (d1, d2), l = gaussian_decompose(x)
    return smul(smul(lower(-l), diag(d1.inverse(), d2.inverse())), upper(-u))


@dataclass(frozen=True)
class AlgebraElement:
    """R = e E + n N + psi_plus Psi+ + psi_minus Psi- with ring coefficients.

    ``parity`` is the total parity: 0 means e, n even and psi odd.
    """

    e: Any
    n: Any
    psi_plus: Any
    psi_minus: Any
    parity: int = 0

    def __post_init__(self):
        for name, slot in (("e", 0), ("n", 0), ("psi_plus", 1), ("psi_minus", 1)):
            want = (self.parity + slot) % 2
            if not _parity_ok(getattr(self, name), want):
                raise SupermatrixError(f"coefficient {name} has the wrong parity")

    def to_matrix(self) -> Supermatrix:
        half = Fraction(1, 2)
        return Supermatrix(
            self.e + self.n * half,
            self.psi_plus,
            self.psi_minus,
            self.e - self.n * half,
            self.parity,
        )


def generators(n: int) -> dict[str, Supermatrix]:
    """E, N, Psi+, Psi- in the defining representation (Grassmann scalars)."""
    one = GrassmannNumber.one(n)
    zero = GrassmannNumber.zero(n)
    half = GrassmannNumber.scalar(Fraction(1, 2), n)
    return {
        "E": Supermatrix(one, zero, zero, one, 0),
        "N": Supermatrix(half, zero, zero, -half, 0),
        "Psi+": Supermatrix(zero, one, zero, zero, 1),
        "Psi-": Supermatrix(zero, zero, one, zero, 1),
    }


def matrix_to_data(x: Supermatrix) -> dict:
    return {k: getattr(x, k).to_data() for k in ("a", "alpha", "beta", "b")}


def matrix_from_data(data) -> Supermatrix:
    try:
        return Supermatrix(*(GrassmannNumber.from_data(data[k]) for k in ("a", "alpha", "beta", "b")))
    except KeyError as exc:
        raise GrassmannError(f"supermatrix record lacks field {exc}") from None

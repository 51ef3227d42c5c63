"""(a, b; alpha, beta) coordinates on GL(1|1).

    g(a, b; al, be) = a (1 + b^2 al be / 2) . upper(al) . diag(1/b, b) . lower(be)
                    = [[a/b (1 - b^2 al be / 2), a b al], [a b be, a b (1 + b^2 al be / 2)]]

The hatted chart rearranges the one-parameter subgroups:
``g = a_hat . upper(al_hat) . lower(be_hat) . diag(1/b_hat, b_hat)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .grassmann import GrassmannError, GrassmannNumber
from .supermatrix import Supermatrix

__all__ = [
    "EdgeCoords",
    "HatCoords",
    "CoordsError",
    "to_matrix",
    "from_matrix",
    "compose",
    "cinv",
    "to_hat",
    "from_hat",
    "identity_coords",
]

HALF = Fraction(1, 2)


class CoordsError(ValueError):
    pass


def _check_quad(a, b, alpha, beta, what: str) -> None:
    if not (a.is_even() and b.is_even()):
        raise CoordsError(f"{what}: a and b must be even")
    if not (alpha.is_odd() and beta.is_odd()):
        raise CoordsError(f"{what}: alpha and beta must be odd")
    if isinstance(a, GrassmannNumber):
        if a.body <= 0 or b.body <= 0:
            raise CoordsError(f"{what}: a and b need positive body, got {a.body}, {b.body}")


@dataclass(frozen=True)
class EdgeCoords:
    a: Any
    b: Any
    alpha: Any
    beta: Any

    def __post_init__(self):
        _check_quad(self.a, self.b, self.alpha, self.beta, "EdgeCoords")

    def astuple(self) -> tuple:
        return (self.a, self.b, self.alpha, self.beta)

    @property
    def n(self) -> int:
        return self.a.n

    def is_fermion_free(self) -> bool:
        return self.alpha.is_zero() and self.beta.is_zero()

    def __str__(self) -> str:
        return f"({self.a}, {self.b}; {self.alpha}, {self.beta})"

    def to_data(self) -> dict:
        return {k: getattr(self, k).to_data() for k in ("a", "b", "alpha", "beta")}

    @classmethod
    def from_data(cls, data) -> "EdgeCoords":
        try:
            return cls(*(GrassmannNumber.from_data(data[k]) for k in ("a", "b", "alpha", "beta")))
        except KeyError as exc:
            raise CoordsError(f"coordinate record lacks field {exc}") from None


@dataclass(frozen=True)
class HatCoords:
    a_hat: Any
    b_hat: Any
    alpha_hat: Any
    beta_hat: Any

    def __post_init__(self):
        _check_quad(self.a_hat, self.b_hat, self.alpha_hat, self.beta_hat, "HatCoords")

    def astuple(self) -> tuple:
        return (self.a_hat, self.b_hat, self.alpha_hat, self.beta_hat)


def identity_coords(n: int) -> EdgeCoords:
    one = GrassmannNumber.one(n)
    zero = GrassmannNumber.zero(n)
    return EdgeCoords(one, one, zero, zero)


def to_matrix(c: EdgeCoords) -> Supermatrix:
    a, b, al, be = c.astuple()
    binv = b.inverse()
    t = b * b * al * be * HALF
    ab = a * b
    return Supermatrix(a * binv * (1 - t), ab * al, ab * be, ab * (1 + t))


def from_matrix(m: Supermatrix) -> EdgeCoords:
    """Inverse of :func:`to_matrix`; needs a rational square for body(a)^2."""
    if m.parity != 0:
        raise CoordsError("from_matrix needs an even supermatrix")
    if m.a.body <= 0 or m.b.body <= 0:
        raise CoordsError(
            f"matrix outside the identity component (diagonal bodies {m.a.body}, {m.b.body})"
        )
    try:
        a = (m.a * m.b).sqrt()
    except GrassmannError as exc:
        raise CoordsError(f"cannot recover a exactly: {exc}") from None
    ainv = a.inverse()
    b = m.b * (a + ainv * m.alpha * m.beta * HALF).inverse()
    pinv = (a * b).inverse()
    return EdgeCoords(a, b, m.alpha * pinv, m.beta * pinv)


def compose(x: EdgeCoords, y: EdgeCoords) -> EdgeCoords:
    """Group product in coordinates."""
    a, b, al, be = x.astuple()
    c, d, ga, de = y.astuple()
    even = a * c * (1 - be * ga * HALF) * (1 - b * b * d * d * al * de * HALF)
    return EdgeCoords(
        even,
        b * d,
        al + b.inverse() ** 2 * ga,
        d.inverse() ** 2 * be + de,
    )


def cinv(x: EdgeCoords) -> EdgeCoords:
    a, b, al, be = x.astuple()
    b2 = b * b
    return EdgeCoords(a.inverse(), b.inverse(), -(b2 * al), -(b2 * be))


def from_hat(h: HatCoords) -> EdgeCoords:
    ah, bh, alh, beh = h.astuple()
    return EdgeCoords(ah * (1 - alh * beh * HALF), bh, alh, bh.inverse() ** 2 * beh)


def to_hat(x: EdgeCoords) -> HatCoords:
    a, b, al, be = x.astuple()
    b2 = b * b
    return HatCoords(a * (1 - al * b2 * be * HALF).inverse(), b, al, b2 * be)


def coords_from_text(a: str, b: str, alpha: str, beta: str, n: int) -> EdgeCoords:
    return EdgeCoords(*(GrassmannNumber.from_text(t, n) for t in (a, b, alpha, beta)))

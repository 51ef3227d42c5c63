"""Exact real Grassmann algebra on N generators with rational coefficients.

A monomial beta_[i1] ... beta_[ik] with i1 < ... < ik is stored as a bitmask
(bit ``i - 1`` set for generator ``i``).  Elements are immutable.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import isqrt
from numbers import Rational
from typing import Iterable, Iterator, Mapping

__all__ = [
    "GrassmannNumber",
    "GrassmannError",
    "NotInvertibleError",
    "gmul",
    "gadd",
    "gscale",
    "body",
    "soul",
    "ginv",
    "gsqrt",
    "parity_of",
    "rational_root",
    "EVEN",
    "ODD",
    "MIXED",
]

MAX_GENERATORS = 64

EVEN = "even"
ODD = "odd"
MIXED = "mixed"


class GrassmannError(ValueError):
    """Usage error in Grassmann arithmetic (mismatched algebras, bad input)."""


class NotInvertibleError(GrassmannError):
    pass


@lru_cache(maxsize=1 << 16)
def koszul_sign(left: int, right: int) -> int:
    """Sign of reordering beta_[left] beta_[right] into increasing order.

    Both masks must be disjoint.  Counts pairs (i in left, j in right) with i > j.
    """
    count = 0
    r = right
    while r:
        low = r & -r
        j = low.bit_length() - 1
        count += bin(left >> (j + 1)).count("1")
        r ^= low
    return -1 if count & 1 else 1


def _as_fraction(q) -> Fraction:
    if isinstance(q, Fraction):
        return q
    if isinstance(q, (int, Rational)):
        return Fraction(q)
    if isinstance(q, str):
        return Fraction(q)
    raise GrassmannError(f"coefficients must be exact rationals, got {q!r}")


def rational_root(q, k: int) -> Fraction:
    """Exact positive k-th root of a positive rational; raises if irrational."""
    q = _as_fraction(q)
    if q <= 0:
        raise GrassmannError(f"root of non-positive rational {q}")
    if k == 1:
        return q
    num = _int_root(q.numerator, k)
    den = _int_root(q.denominator, k)
    if num is None or den is None:
        raise GrassmannError(f"{q} has no rational {k}-th root")
    return Fraction(num, den)


def _int_root(n: int, k: int) -> int | None:
    if k == 2:
        r = isqrt(n)
        return r if r * r == n else None
    r = round(n ** (1.0 / k))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**k == n:
            return cand
    # float guess may be off for huge integers; fall back to bisection
    lo, hi = 0, 1 << (n.bit_length() // k + 2)
    while lo < hi:
        mid = (lo + hi) // 2
        if mid**k < n:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo**k == n else None


class GrassmannNumber:
    """Element of the Grassmann algebra R^{S[N]} with exact rational coefficients."""

    __slots__ = ("n", "_terms", "_hash")

    def __init__(self, n: int, terms: Mapping[int, object] | None = None):
        if not 0 <= n <= MAX_GENERATORS:
            raise GrassmannError(f"generator count must lie in 0..{MAX_GENERATORS}, got {n}")
        self.n = n
        clean: dict[int, Fraction] = {}
        if terms:
            limit = 1 << n
            for mask, c in terms.items():
                if not 0 <= mask < limit:
                    raise GrassmannError(f"monomial {mask:#b} uses a generator above {n}")
                c = _as_fraction(c)
                if c:
                    clean[mask] = c
        self._terms = clean
        self._hash = None

    # -- construction -------------------------------------------------------
    @classmethod
    def _raw(cls, n: int, terms: dict[int, Fraction]) -> "GrassmannNumber":
        obj = cls.__new__(cls)
        obj.n = n
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def scalar(cls, q, n: int) -> "GrassmannNumber":
        return cls(n, {0: q})

    @classmethod
    def zero(cls, n: int) -> "GrassmannNumber":
        return cls._raw(n, {})

    @classmethod
    def one(cls, n: int) -> "GrassmannNumber":
        return cls._raw(n, {0: Fraction(1)})

    @classmethod
    def generator(cls, i: int, n: int) -> "GrassmannNumber":
        """The generator beta_[i], 1 <= i <= n."""
        if not 1 <= i <= n:
            raise GrassmannError(f"generator index {i} outside 1..{n}")
        return cls._raw(n, {1 << (i - 1): Fraction(1)})

    @classmethod
    def monomial(cls, indices: Iterable[int], n: int, coeff=1) -> "GrassmannNumber":
        """coeff * beta_[i1] beta_[i2] ... in the given (not necessarily sorted) order."""
        result = cls.scalar(coeff, n)
        for i in indices:
            result = result * cls.generator(i, n)
        return result

    # -- inspection -----------------------------------------------------------
    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[tuple[int, ...], Fraction]]:
        """(sorted index tuple, coefficient) pairs in canonical order."""
        for mask in sorted(self._terms, key=lambda m: (bin(m).count("1"), _indices(m))):
            yield _indices(mask), self._terms[mask]

    def coefficient(self, indices: Iterable[int] = ()) -> Fraction:
        mask = 0
        for i in indices:
            mask |= 1 << (i - 1)
        return self._terms.get(mask, Fraction(0))

    @property
    def body(self) -> Fraction:
        return self._terms.get(0, Fraction(0))

    @property
    def soul(self) -> "GrassmannNumber":
        return GrassmannNumber._raw(self.n, {m: c for m, c in self._terms.items() if m})

    @property
    def parity(self) -> str:
        parities = {bin(m).count("1") & 1 for m in self._terms}
        if parities == {1}:
            return ODD
        if len(parities) <= 1:
            return EVEN
        return MIXED

    def is_even(self) -> bool:
        return all(not bin(m).count("1") & 1 for m in self._terms)

    def is_odd(self) -> bool:
        return all(bin(m).count("1") & 1 for m in self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_scalar(self) -> bool:
        return all(m == 0 for m in self._terms)

    def max_degree(self) -> int:
        return max((bin(m).count("1") for m in self._terms), default=0)

    def even_part(self) -> "GrassmannNumber":
        return GrassmannNumber._raw(
            self.n, {m: c for m, c in self._terms.items() if not bin(m).count("1") & 1}
        )

    def odd_part(self) -> "GrassmannNumber":
        return GrassmannNumber._raw(
            self.n, {m: c for m, c in self._terms.items() if bin(m).count("1") & 1}
        )

    # -- arithmetic -------------------------------------------------------------
    def _check(self, other: "GrassmannNumber") -> None:
        if self.n != other.n:
            raise GrassmannError(
                f"generator counts differ: {self.n} vs {other.n}"
            )

    def _coerce(self, other) -> "GrassmannNumber":
        if isinstance(other, GrassmannNumber):
            self._check(other)
            return other
        if isinstance(other, (int, Rational)):
            return GrassmannNumber.scalar(other, self.n)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self._terms)
        for m, c in other._terms.items():
            s = terms.get(m, 0) + c
            if s:
                terms[m] = s
            else:
                terms.pop(m, None)
        return GrassmannNumber._raw(self.n, terms)

    __radd__ = __add__

    def __neg__(self) -> "GrassmannNumber":
        return GrassmannNumber._raw(self.n, {m: -c for m, c in self._terms.items()})

    def __pos__(self) -> "GrassmannNumber":
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def scale(self, q) -> "GrassmannNumber":
        q = _as_fraction(q)
        if not q:
            return GrassmannNumber._raw(self.n, {})
        return GrassmannNumber._raw(self.n, {m: c * q for m, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Rational)):
            return self.scale(other)
        if not isinstance(other, GrassmannNumber):
            return NotImplemented
        self._check(other)
        terms: dict[int, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                if m1 & m2:
                    continue
                m = m1 | m2
                c = c1 * c2
                if koszul_sign(m1, m2) < 0:
                    c = -c
                s = terms.get(m, 0) + c
                if s:
                    terms[m] = s
                else:
                    terms.pop(m, None)
        return GrassmannNumber._raw(self.n, terms)

    def __rmul__(self, other):
        if isinstance(other, (int, Rational)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)):
            return self.scale(Fraction(1) / _as_fraction(other))
        if isinstance(other, GrassmannNumber):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Rational)):
            return self.inverse().scale(other)
        return NotImplemented

    def __pow__(self, k: int) -> "GrassmannNumber":
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = GrassmannNumber.one(self.n)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse(self) -> "GrassmannNumber":
        """Inverse via the terminating geometric series in soul/body."""
        b = self.body
        if not b:
            raise NotInvertibleError("element with zero body is not invertible")
        if self.is_scalar():
            return GrassmannNumber.scalar(1 / b, self.n)
        t = self.soul.scale(1 / b)
        acc = GrassmannNumber.one(self.n)
        power = GrassmannNumber.one(self.n)
        for k in range(1, self.n + 1):
            power = power * t
            if power.is_zero():
                break
            acc = acc + (power if k % 2 == 0 else -power)
        return acc.scale(1 / b)

    def sqrt(self) -> "GrassmannNumber":
        """Square root with positive body, by the terminating binomial series."""
        b = self.body
        if b <= 0:
            raise GrassmannError(f"square root needs positive body, got {b}")
        root = rational_root(b, 2)
        t = self.soul.scale(1 / b)
        acc = GrassmannNumber.one(self.n)
        power = GrassmannNumber.one(self.n)
        binom = Fraction(1)
        for k in range(1, self.n + 1):
            power = power * t
            if power.is_zero():
                break
            binom = binom * (Fraction(1, 2) - (k - 1)) / k
            acc = acc + power.scale(binom)
        return acc.scale(root)

    def root(self, k: int) -> "GrassmannNumber":
        """Positive-body k-th root of an even element with rational-power body."""
        b = self.body
        if b <= 0:
            raise GrassmannError(f"root needs positive body, got {b}")
        r = rational_root(b, k)
        unit = self.scale(1 / b)
        return unit.log_unipotent().scale(Fraction(1, k)).exp_nilpotent().scale(r)

    def log_unipotent(self) -> "GrassmannNumber":
        """log(x) for x = 1 + nilpotent; the series terminates."""
        if self.body != 1:
            raise GrassmannError("log_unipotent needs body 1")
        t = self.soul
        acc = GrassmannNumber.zero(self.n)
        power = GrassmannNumber.one(self.n)
        for k in range(1, self.n + 1):
            power = power * t
            if power.is_zero():
                break
            term = power.scale(Fraction(1, k))
            acc = acc + (term if k % 2 else -term)
        return acc

    def exp_nilpotent(self) -> "GrassmannNumber":
        """exp(x) for nilpotent even x."""
        if self.body:
            raise GrassmannError("exp_nilpotent needs zero body")
        acc = GrassmannNumber.one(self.n)
        power = GrassmannNumber.one(self.n)
        fact = 1
        for k in range(1, self.n + 1):
            power = power * self
            if power.is_zero():
                break
            fact *= k
            acc = acc + power.scale(Fraction(1, fact))
        return acc

    # -- comparison / misc -------------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, GrassmannNumber):
            return self.n == other.n and self._terms == other._terms
        if isinstance(other, (int, Rational)):
            return self._terms == ({0: Fraction(other)} if other else {})
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self._terms.items())))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __repr__(self) -> str:
        return f"GrassmannNumber({self.n}, {self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for idx, c in self.items():
            mono = "*".join(f"b{i}" for i in idx)
            if not idx:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    # -- serialization -------------------------------------------------------------
    def to_data(self) -> dict:
        return {
            "generator_count": self.n,
            "terms": [[list(idx), _fmt(c)] for idx, c in self.items()],
        }

    @classmethod
    def from_data(cls, data: Mapping) -> "GrassmannNumber":
        n = int(data["generator_count"])
        terms: dict[int, Fraction] = {}
        for idx, c in data["terms"]:
            idx = [int(i) for i in idx]
            if list(idx) != sorted(set(idx)):
                raise GrassmannError(f"multi-index {idx} is not strictly increasing")
            mask = 0
            for i in idx:
                if not 1 <= i <= n:
                    raise GrassmannError(f"index {i} outside 1..{n}")
                mask |= 1 << (i - 1)
            if mask in terms:
                raise GrassmannError(f"duplicate multi-index {idx}")
            terms[mask] = Fraction(c)
        return cls(n, terms)

    def to_text(self) -> str:
        """Compact one-token form: ``[idx.idx:p/q;...]``, e.g. ``[:2;1.2:-1/4]``."""
        return "[" + ";".join(
            ".".join(map(str, idx)) + ":" + _fmt(c) for idx, c in self.items()
        ) + "]"

    @classmethod
    def from_text(cls, text: str, n: int) -> "GrassmannNumber":
        text = text.strip()
        if not (text.startswith("[") and text.endswith("]")):
            raise GrassmannError(f"grassmann literal must be bracketed: {text!r}")
        body_text = text[1:-1].strip()
        terms: dict[int, Fraction] = {}
        if body_text:
            for chunk in body_text.split(";"):
                if ":" not in chunk:
                    raise GrassmannError(f"term {chunk!r} lacks ':'")
                idx_text, c_text = chunk.split(":", 1)
                idx = [int(i) for i in idx_text.split(".")] if idx_text.strip() else []
                if idx != sorted(set(idx)):
                    raise GrassmannError(f"multi-index {idx} is not strictly increasing")
                mask = 0
                for i in idx:
                    if not 1 <= i <= n:
                        raise GrassmannError(f"index {i} outside 1..{n}")
                    mask |= 1 << (i - 1)
                if mask in terms:
                    raise GrassmannError(f"duplicate multi-index {idx}")
                try:
                    terms[mask] = Fraction(c_text.strip())
                except (ValueError, ZeroDivisionError) as exc:
                    raise GrassmannError(f"bad rational {c_text!r}") from exc
        return cls(n, terms)


def _indices(mask: int) -> tuple[int, ...]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def _fmt(c: Fraction) -> str:
    return str(c)


def gmul(x: GrassmannNumber, y: GrassmannNumber) -> GrassmannNumber:
    if x.n != y.n:
        raise GrassmannError(f"generator counts differ: {x.n} vs {y.n}")
    return x * y


def gadd(x: GrassmannNumber, y: GrassmannNumber) -> GrassmannNumber:
    if x.n != y.n:
        raise GrassmannError(f"generator counts differ: {x.n} vs {y.n}")
    return x + y


def gscale(q, x: GrassmannNumber) -> GrassmannNumber:
    return x.scale(q)


def body(x: GrassmannNumber) -> Fraction:
    return x.body


def soul(x: GrassmannNumber) -> GrassmannNumber:
    return x.soul


def ginv(x: GrassmannNumber) -> GrassmannNumber:
    return x.inverse()


def gsqrt(x: GrassmannNumber) -> GrassmannNumber:
    return x.sqrt()


def parity_of(x: GrassmannNumber) -> str:
    return x.parity

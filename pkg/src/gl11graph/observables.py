"""Symbolic functions on the coordinate chart and derivations acting on them.

An :class:`Observable` is a finite sum of terms

    coeff * prod(even_symbol ** k) * odd_1 odd_2 ... odd_m

with integer (possibly negative) exponents on the even symbols and distinct
odd symbols kept in a fixed global order, the reordering sign absorbed into
the coefficient.  Symbols are ``(kind, edge)`` pairs; kinds ``a``, ``b`` (and
their hatted versions) are even, ``alpha``, ``beta`` (and hatted) are odd.

Observables implement enough of the ring interface (``+``, ``*``,
``inverse``, ``**``, ``is_even``) to be used as supermatrix entries and as
coordinates, so the same matrix and coordinate code runs symbolically.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .grassmann import GrassmannNumber

__all__ = [
    "ObservableError",
    "Symbol",
    "Observable",
    "Derivation",
    "EVEN_KINDS",
    "ODD_KINDS",
    "sym",
    "edge_symbols",
    "substitute",
    "evaluate",
    "super_bracket",
]

Symbol = tuple  # (kind, edge)

EVEN_KINDS = ("a", "b", "a_hat", "b_hat")
ODD_KINDS = ("alpha", "beta", "alpha_hat", "beta_hat")
_KIND_RANK = {k: i for i, k in enumerate(EVEN_KINDS + ODD_KINDS)}


class ObservableError(ValueError):
    pass


def is_odd_symbol(s: Symbol) -> bool:
    return s[0] in ODD_KINDS


def _check_symbol(s) -> Symbol:
    if not (isinstance(s, tuple) and len(s) == 2 and s[0] in _KIND_RANK):
        raise ObservableError(f"not a chart symbol: {s!r}")
    return s


def _order_key(s: Symbol):
    return (s[1], _KIND_RANK[s[0]])


def _merge_odd(x: tuple, y: tuple) -> tuple[int, tuple] | None:
    """Sign and sorted concatenation of two sorted odd-symbol tuples (None if a symbol repeats)."""
    if not x:
        return 1, y
    if not y:
        return 1, x
    if set(x) & set(y):
        return None
    out = []
    sign = 1
    i = j = 0
    while i < len(x) and j < len(y):
        if _order_key(x[i]) < _order_key(y[j]):
            out.append(x[i])
            i += 1
        else:
            out.append(y[j])
            # y[j] jumps over the remaining len(x) - i symbols of x
            if (len(x) - i) % 2:
                sign = -sign
            j += 1
    out.extend(x[i:])
    out.extend(y[j:])
    return sign, tuple(out)


def _merge_even(x: tuple, y: tuple) -> tuple:
    if not x:
        return y
    if not y:
        return x
    acc = dict(x)
    for s, k in y:
        nk = acc.get(s, 0) + k
        if nk:
            acc[s] = nk
        else:
            del acc[s]
    return tuple(sorted(acc.items(), key=lambda t: _order_key(t[0])))


class Observable:
    """Polynomial in odd symbols with Laurent-monomial coefficients in even symbols."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[tuple, object] | None = None):
        clean = {}
        for key, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                clean[key] = c
        self._terms = clean

    @classmethod
    def _raw(cls, terms: dict) -> "Observable":
        obj = cls.__new__(cls)
        obj._terms = terms
        return obj

    @classmethod
    def constant(cls, q) -> "Observable":
        return cls({((), ()): q})

    @classmethod
    def symbol(cls, s: Symbol) -> "Observable":
        s = _check_symbol(s)
        if is_odd_symbol(s):
            return cls({((), (s,)): 1})
        return cls({(((s, 1),), ()): 1})

    # -- structure ----------------------------------------------------------------

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[tuple, Fraction]]:
        return iter(sorted(self._terms.items(), key=_term_sort_key))

    def symbols(self) -> set:
        out = set()
        for even, odd in self._terms:
            out.update(s for s, _ in even)
            out.update(odd)
        return out

    def is_zero(self) -> bool:
        return not self._terms

    def is_even(self) -> bool:
        return all(len(odd) % 2 == 0 for _, odd in self._terms)

    def is_odd(self) -> bool:
        return all(len(odd) % 2 == 1 for _, odd in self._terms)

    @property
    def parity(self) -> int:
        if self.is_even():
            return 0
        if self.is_odd():
            return 1
        raise ObservableError("observable is not homogeneous")

    def one_like(self) -> "Observable":
        return Observable.constant(1)

    def is_constant(self) -> bool:
        return all(key == ((), ()) for key in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get(((), ()), Fraction(0))

    def max_odd_degree(self) -> int:
        return max((len(odd) for _, odd in self._terms), default=0)

    # -- arithmetic ----------------------------------------------------------------

    @staticmethod
    def _coerce(x) -> "Observable":
        if isinstance(x, Observable):
            return x
        if isinstance(x, (int, Fraction)):
            return Observable.constant(x)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for k, c in other._terms.items():
            nc = out.get(k, 0) + c
            if nc:
                out[k] = nc
            else:
                out.pop(k, None)
        return Observable._raw(out)

    __radd__ = __add__

    def __neg__(self) -> "Observable":
        return Observable._raw({k: -c for k, c in self._terms.items()})

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

    def scale(self, q) -> "Observable":
        q = Fraction(q)
        if not q:
            return Observable()
        return Observable._raw({k: c * q for k, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Observable):
            return NotImplemented
        out: dict = {}
        for (e1, o1), c1 in self._terms.items():
            for (e2, o2), c2 in other._terms.items():
                merged = _merge_odd(o1, o2)
                if merged is None:
                    continue
                sign, odd = merged
                key = (_merge_even(e1, e2), odd)
                nc = out.get(key, 0) + sign * c1 * c2
                if nc:
                    out[key] = nc
                else:
                    out.pop(key, None)
        return Observable._raw(out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def inverse(self) -> "Observable":
        """Inverse when the odd-free part is a single nonzero term."""
        pure = {k: c for k, c in self._terms.items() if not k[1]}
        if len(pure) != 1:
            raise ObservableError("only observables whose odd-free part is one monomial are invertible")
        (even, _), c = next(iter(pure.items()))
        lead_inv = Observable._raw({(tuple((s, -k) for s, k in even), ()): 1 / c})
        rest = Observable._raw({k: v for k, v in self._terms.items() if k[1]})
        if rest.is_zero():
            return lead_inv
        step = -(rest * lead_inv)
        acc = Observable.constant(1)
        power = Observable.constant(1)
        while True:
            power = power * step
            if power.is_zero():
                break
            acc = acc + power
        return acc * lead_inv

    def __pow__(self, k: int) -> "Observable":
        if not isinstance(k, int):
            return NotImplemented
        base = self if k >= 0 else self.inverse()
        acc = Observable.constant(1)
        for _ in range(abs(k)):
            acc = acc * base
        return acc

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / Fraction(other))
        if isinstance(other, Observable):
            return self * other.inverse()
        return NotImplemented

    # -- comparison / display --------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Observable.constant(other)
        if not isinstance(other, Observable):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __repr__(self) -> str:
        return f"Observable({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for (even, odd), c in self.items():
            factors = [_fmt_sym(s) + (f"^{k}" if k != 1 else "") for s, k in even]
            factors += [_fmt_sym(s) for s in odd]
            mono = "*".join(factors)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_data(self) -> list:
        out = []
        for (even, odd), c in self.items():
            out.append(
                {
                    "even": [[s[0], s[1], k] for s, k in even],
                    "odd": [[s[0], s[1]] for s in odd],
                    "coeff": str(c),
                }
            )
        return out

    @classmethod
    def from_data(cls, data: Iterable) -> "Observable":
        acc = Observable()
        for term in data:
            t = Observable.constant(Fraction(term["coeff"]))
            for kind, edge, k in term.get("even", []):
                t = t * Observable.symbol((kind, edge)) ** int(k)
            for kind, edge in term.get("odd", []):
                t = t * Observable.symbol((kind, edge))
            acc = acc + t
        return acc


def _fmt_sym(s: Symbol) -> str:
    return f"{s[0]}{s[1]}"


def _term_sort_key(item):
    (even, odd), _ = item
    return (
        len(odd),
        [_order_key(s) for s in odd],
        [(_order_key(s), k) for s, k in even],
    )


def sym(kind: str, edge: int) -> Observable:
    return Observable.symbol((kind, edge))


def edge_symbols(edge: int, hatted: bool = False) -> tuple[Observable, Observable, Observable, Observable]:
    suffix = "_hat" if hatted else ""
    return tuple(sym(k + suffix, edge) for k in ("a", "b", "alpha", "beta"))


# -- substitution and evaluation ---------------------------------------------------------


def substitute(f: Observable, mapping: Mapping[Symbol, Observable]) -> Observable:
    """Replace symbols by observables of the same parity (a superalgebra map)."""
    acc = Observable()
    cache: dict = {}

    def image(s: Symbol) -> Observable:
        if s in mapping:
            return mapping[s]
        return Observable.symbol(s)

    def power(s: Symbol, k: int) -> Observable:
        key = (s, k)
        if key not in cache:
            cache[key] = image(s) ** k
        return cache[key]

    for (even, odd), c in f._terms.items():
        t = Observable.constant(c)
        for s, k in even:
            t = t * power(s, k)
        for s in odd:
            t = t * image(s)
        acc = acc + t
    return acc


def evaluate(f: Observable, values: Mapping[Symbol, GrassmannNumber], n: int | None = None) -> GrassmannNumber:
    """Substitute Grassmann values for all symbols."""
    if n is None:
        n = next(iter(values.values())).n if values else 0
    acc = GrassmannNumber.zero(n)
    for (even, odd), c in f._terms.items():
        t = GrassmannNumber.scalar(c, n)
        for s, k in even:
            if s not in values:
                raise ObservableError(f"no value for symbol {_fmt_sym(s)}")
            v = values[s]
            if not v.is_even():
                raise ObservableError(f"symbol {_fmt_sym(s)} is even but its value is not")
            t = t * (v ** k)
        for s in odd:
            if s not in values:
                raise ObservableError(f"no value for symbol {_fmt_sym(s)}")
            v = values[s]
            if not v.is_odd():
                raise ObservableError(f"symbol {_fmt_sym(s)} is odd but its value is not")
            t = t * v
        acc = acc + t
    return acc


# -- derivations ------------------------------------------------------------------------------


class Derivation:
    """Graded derivation given by its values on symbols (zero elsewhere).

    Acts from the left: D(xy) = D(x) y + (-1)^{|D||x|} x D(y).
    """

    __slots__ = ("parity", "images")

    def __init__(self, parity: int, images: Mapping[Symbol, Observable]):
        self.parity = parity % 2
        imgs = {}
        for s, img in images.items():
            _check_symbol(s)
            img = Observable._coerce(img)
            if img.is_zero():
                continue
            want = (self.parity + (1 if is_odd_symbol(s) else 0)) % 2
            if (want == 0 and not img.is_even()) or (want == 1 and not img.is_odd()):
                raise ObservableError(f"image of {_fmt_sym(s)} has the wrong parity for a parity-{parity} derivation")
            imgs[s] = img
        self.images = imgs

    def __call__(self, f: Observable) -> Observable:
        if not isinstance(f, Observable):
            f = Observable._coerce(f)
        out = Observable()
        for (even, odd), c in f._terms.items():
            if not any(s in self.images for s, _ in even) and not any(s in self.images for s in odd):
                continue
            odd_part = Observable._raw({((), odd): Fraction(1)})
            even_mono = Observable._raw({(even, ()): Fraction(1)})
            if any(s in self.images for s, _ in even):
                d_even = Observable()
                for s, k in even:
                    if s in self.images:
                        rest = Observable._raw({(_merge_even(even, ((s, -1),)), ()): Fraction(k)})
                        d_even = d_even + rest * self.images[s]
                out = out + (d_even * odd_part).scale(c)
            for j, s in enumerate(odd):
                if s not in self.images:
                    continue
                sign = -1 if (self.parity and j % 2) else 1
                left = Observable._raw({((), odd[:j]): Fraction(1)})
                right = Observable._raw({((), odd[j + 1:]): Fraction(1)})
                out = out + (even_mono * left * self.images[s] * right).scale(c * sign)
        return out

    def __add__(self, other: "Derivation") -> "Derivation":
        if self.parity != other.parity:
            raise ObservableError("cannot add derivations of different parity")
        keys = set(self.images) | set(other.images)
        return Derivation(self.parity, {s: self.images.get(s, Observable()) + other.images.get(s, Observable()) for s in keys})

    def scale(self, q) -> "Derivation":
        return Derivation(self.parity, {s: img.scale(q) for s, img in self.images.items()})

    def left_multiply(self, f: Observable) -> "Derivation":
        """The derivation f * D (f homogeneous)."""
        return Derivation((self.parity + f.parity) % 2, {s: f * img for s, img in self.images.items()})

    def __neg__(self) -> "Derivation":
        return self.scale(-1)

    def __sub__(self, other: "Derivation") -> "Derivation":
        return self + (-other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Derivation):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return True
        return self.parity == other.parity and self.images == other.images

    def is_zero(self) -> bool:
        return not self.images

    def __repr__(self) -> str:
        body = ", ".join(f"{_fmt_sym(s)}: {img}" for s, img in sorted(self.images.items(), key=lambda t: _order_key(t[0])))
        return f"Derivation(parity={self.parity}, {{{body}}})"


def super_bracket(x: Derivation, y: Derivation, symbols: Iterable[Symbol] | None = None) -> Derivation:
    """[X, Y] = XY - (-1)^{|X||Y|} YX as a derivation, read off on symbols."""
    if symbols is None:
        symbols = set(x.images) | set(y.images)
        for img in list(x.images.values()) + list(y.images.values()):
            symbols |= img.symbols()
    sign = -1 if (x.parity and y.parity) else 1
    images = {}
    for s in symbols:
        f = Observable.symbol(s)
        val = x(y(f)) - (y(x(f))).scale(sign)
        if not val.is_zero():
            images[s] = val
    return Derivation((x.parity + y.parity) % 2, images)

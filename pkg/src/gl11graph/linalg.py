"""Exact linear algebra over Q and over the even Grassmann subring."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .grassmann import GrassmannNumber

__all__ = [
    "LinearAlgebraError",
    "rref",
    "rank",
    "nullspace",
    "inverse",
    "solve_square",
    "solve_grassmann",
    "determinant",
    "SparseSolver",
]


class LinearAlgebraError(ValueError):
    pass


def _frac_matrix(a: Sequence[Sequence]) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in a]


def rref(a: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    m = _frac_matrix(a)
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        prow = m[r] = [x * inv if x else x for x in m[r]]
        nz = [j for j in range(c, cols) if prow[j]]
        for i in range(rows):
            row = m[i]
            if i != r and row[c]:
                f = row[c]
                for j in nz:
                    row[j] -= f * prow[j]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(a: Sequence[Sequence]) -> int:
    if not a:
        return 0
    return len(rref(a)[1])


def nullspace(a: Sequence[Sequence], cols: int | None = None) -> list[list[Fraction]]:
    """Basis of {x : A x = 0}."""
    if not a:
        return [[Fraction(int(i == j)) for j in range(cols or 0)] for i in range(cols or 0)]
    m, pivots = rref(a)
    n = len(m[0])
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, pc in zip(m, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def determinant(a: Sequence[Sequence]) -> Fraction:
    m = _frac_matrix(a)
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        det *= m[c][c]
        for i in range(c + 1, n):
            if m[i][c]:
                f = m[i][c] / m[c][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return det


def inverse(a: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(a)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(_frac_matrix(a))]
    m, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise LinearAlgebraError("matrix is singular")
    return [row[n:] for row in m]


def solve_square(a: Sequence[Sequence], b: Sequence) -> list[Fraction]:
    inv = inverse(a)
    bb = [Fraction(x) for x in b]
    return [sum((x * y for x, y in zip(row, bb)), Fraction(0)) for row in inv]


def solve_grassmann(
    matrix: Sequence[Sequence[GrassmannNumber]], rhs: Sequence[GrassmannNumber]
) -> list[GrassmannNumber]:
    """Solve M x = r for a square M with even entries and invertible body determinant.

    Entries of x may have any parity; even coefficients commute with them.
    """
    n = len(matrix)
    m = [list(row) for row in matrix]
    r = list(rhs)
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c].body != 0), None)
        if p is None:
            raise LinearAlgebraError("system is singular at body level")
        m[c], m[p] = m[p], m[c]
        r[c], r[p] = r[p], r[c]
        inv = m[c][c].inverse()
        m[c] = [inv * x for x in m[c]]
        r[c] = inv * r[c]
        for i in range(n):
            if i != c and not m[i][c].is_zero():
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
                r[i] = r[i] - f * r[c]
    return r


class SparseSolver:
    """Incremental sparse Gaussian elimination over Q.

    Rows are dicts ``{var: coeff}`` with a constant under key ``None``.
    ``add`` reduces a new equation against the stored pivots and reports
    inconsistency; ``solution`` back-substitutes with free variables set to 0.
    """

    def __init__(self):
        self._pivots: dict = {}
        self._order: list = []
        self.consistent = True

    def reduce(self, row: dict) -> dict:
        """Row reduced against the stored pivots."""
        row = {k: Fraction(v) for k, v in row.items() if v}
        for var in self._order:
            c = row.get(var)
            if c:
                prow = self._pivots[var]
                for k, v in prow.items():
                    nv = row.get(k, 0) - c * v
                    if nv:
                        row[k] = nv
                    else:
                        row.pop(k, None)
        return row

    def add(self, row: dict) -> bool:
        row = self.reduce(row)
        vars_ = [k for k in row if k is not None]
        if not vars_:
            if row.get(None):
                self.consistent = False
                return False
            return True
        piv = min(vars_, key=_sort_key)
        inv = 1 / row[piv]
        row = {k: v * inv for k, v in row.items()}
        # keep stored pivot rows reduced against the new pivot
        for var, prow in self._pivots.items():
            c = prow.get(piv)
            if c:
                for k, v in row.items():
                    nv = prow.get(k, 0) - c * v
                    if nv:
                        prow[k] = nv
                    else:
                        prow.pop(k, None)
        self._pivots[piv] = row
        self._order.append(piv)
        return True

    def solution(self) -> dict:
        """Particular solution with all free variables 0 (rows are fully reduced)."""
        out = {}
        for var, row in self._pivots.items():
            out[var] = -row.get(None, Fraction(0))
        return out

    def is_pivot(self, var) -> bool:
        return var in self._pivots


def _sort_key(k):
    return repr(k)

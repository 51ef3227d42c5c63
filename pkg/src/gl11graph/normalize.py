"""Gauge constraints, canonical normal forms and gauge-equivalence decisions.

The vertex constraints read, with ``x^v`` equal to x for an edge pointing into
v and to x^-1 (even) or -x (odd) for an edge leaving v,

    prod a^v = prod b^v = 1,    sum alpha^v = sum beta^v = 0.

They cut each gauge orbit down to a small residual family: a global diagonal
gauge acting as (alpha, beta) -> (lam alpha, lam^-1 beta), plus one odd
direction for alpha and one for beta.  :func:`normalize` removes these too,
so equal normal forms are equivalent to gauge equivalence:

1. b: diagonal gauges, a Laplacian system in log b (base vertex pinned);
2. alpha: upper unipotent gauges, the vertex constraints plus ``alpha_e0 = 0``
   for the first edge e0 that makes the system invertible;
3. beta: lower unipotent gauges, likewise;
4. lam: fixed by an echelon reduction of the alpha tuple modulo its nilpotent
   multiples, then of beta modulo the leftover stabilizer;
5. a: scalar gauges, the same Laplacian as step 1.

Steps 1 and 5 take k-th roots of body products, k being the number of
spanning trees; a :class:`NormalizationError` is raised when such a root is
irrational.  If no edge gives an invertible system in steps 2 or 3 (for
instance when all b bodies are 1), an odd shift direction survives.  The odd
tuple is then reduced modulo that direction together with step 4, and log a
is reduced modulo the span of what the surviving gauges do to it, so the
result is still canonical.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

from .connection import (
    GaugeElement,
    GraphConnection,
    _as_matrix,
    compose_gauges,
    gauge_transform,
)
from .coords import CoordsError, EdgeCoords, cinv, from_matrix, to_matrix
from .fatgraph import Fatgraph
from .grassmann import GrassmannError, GrassmannNumber, rational_root
from .linalg import LinearAlgebraError, SparseSolver, determinant, inverse, nullspace, rank, rref, solve_grassmann
from .supermatrix import _BASIS_PARITY, Supermatrix, sinv

__all__ = [
    "NormalizationError",
    "VertexReport",
    "NormalForm",
    "EquivalenceResult",
    "vertex_darts",
    "check_gauge_constraints",
    "constraints_hold",
    "normalize",
    "normal_form",
    "is_gauge_equivalent",
    "solve_gauge",
    "residual_dimensions",
    "incidence_matrix",
]


class NormalizationError(ValueError):
    pass


def vertex_darts(c: GraphConnection | Fatgraph) -> dict[int, list[tuple[int, int]]]:
    """For each vertex, ``(edge, sign)`` per dart: +1 if the edge points into v."""
    g = c.graph if isinstance(c, GraphConnection) else c
    out: dict[int, list[tuple[int, int]]] = {}
    for v, darts in g.vertices.items():
        out[v] = [(g.edge_of(d), 1 if d == max(g.edges[g.edge_of(d)]) else -1) for d in darts]
    return out


@dataclass(frozen=True)
class VertexReport:
    vertex: int
    a_product: GrassmannNumber
    b_product: GrassmannNumber
    alpha_sum: GrassmannNumber
    beta_sum: GrassmannNumber

    @property
    def a_ok(self) -> bool:
        return self.a_product == 1

    @property
    def b_ok(self) -> bool:
        return self.b_product == 1

    @property
    def alpha_ok(self) -> bool:
        return self.alpha_sum.is_zero()

    @property
    def beta_ok(self) -> bool:
        return self.beta_sum.is_zero()

    @property
    def ok(self) -> bool:
        return self.a_ok and self.b_ok and self.alpha_ok and self.beta_ok


def check_gauge_constraints(c: GraphConnection) -> dict[int, VertexReport]:
    reports = {}
    n = c.n
    for v, darts in vertex_darts(c).items():
        ap = GrassmannNumber.one(n)
        bp = GrassmannNumber.one(n)
        asum = GrassmannNumber.zero(n)
        bsum = GrassmannNumber.zero(n)
        for e, s in darts:
            val = c.value(e)
            ap = ap * (val.a if s > 0 else val.a.inverse())
            bp = bp * (val.b if s > 0 else val.b.inverse())
            asum = asum + val.alpha.scale(s)
            bsum = bsum + val.beta.scale(s)
        reports[v] = VertexReport(v, ap, bp, asum, bsum)
    return reports


def constraints_hold(c: GraphConnection) -> bool:
    return all(r.ok for r in check_gauge_constraints(c).values())


# -- multiplicative Laplacian step -------------------------------------------------


def _laplacian(c: GraphConnection, order: list[int]) -> list[list[int]]:
    g = c.graph
    idx = {v: i for i, v in enumerate(order)}
    lap = [[0] * len(order) for _ in order]
    for v in order:
        for d in g.vertices[v]:
            other = g.vertex_of(g.pair(d))
            lap[idx[v]][idx[v]] += 1
            lap[idx[v]][idx[other]] -= 1
    return lap


def _root_product(bases: list[Fraction], exponents: list[Fraction]) -> Fraction:
    """prod bases[i]**exponents[i] for rational exponents, exactly or raise."""
    den = math.lcm(*(q.denominator for q in exponents)) if exponents else 1
    acc = Fraction(1)
    for base, q in zip(bases, exponents):
        acc *= base ** int(q * den)
    try:
        return rational_root(acc, den)
    except GrassmannError:
        raise NormalizationError(
            f"normalization needs the {den}-th root of {acc}, which is irrational; "
            "edge bodies must multiply to perfect powers around the graph"
        ) from None


def _solve_multiplicative(c: GraphConnection, products: dict[int, GrassmannNumber], base: int) -> dict[int, GrassmannNumber]:
    """Find units y_v with y_base = 1 and products_v * prod_darts y_other / y_v = 1."""
    order = [base] + sorted(v for v in c.graph.vertices if v != base)
    n = c.n
    if len(order) == 1:
        return {base: GrassmannNumber.one(n)}
    lap = _laplacian(c, order)
    red = [row[1:] for row in lap[1:]]
    minv = inverse(red)
    bodies = [products[v].body for v in order[1:]]
    logs = [(products[v].scale(1 / products[v].body)).log_unipotent() for v in order[1:]]
    out = {base: GrassmannNumber.one(n)}
    for i, v in enumerate(order[1:]):
        body = _root_product(bodies, minv[i])
        soul = GrassmannNumber.zero(n)
        for q, lg in zip(minv[i], logs):
            if q:
                soul = soul + lg.scale(q)
        out[v] = soul.exp_nilpotent().scale(body)
    return out


def _step_b(c: GraphConnection, base: int) -> dict[int, EdgeCoords]:
    reps = check_gauge_constraints(c)
    y = _solve_multiplicative(c, {v: r.b_product for v, r in reps.items()}, base)
    one = GrassmannNumber.one(c.n)
    zero = GrassmannNumber.zero(c.n)
    return {v: EdgeCoords(one, yv, zero, zero) for v, yv in y.items()}


def _step_a(c: GraphConnection, base: int) -> dict[int, EdgeCoords]:
    reps = check_gauge_constraints(c)
    x = _solve_multiplicative(c, {v: r.a_product for v, r in reps.items()}, base)
    one = GrassmannNumber.one(c.n)
    zero = GrassmannNumber.zero(c.n)
    return {v: EdgeCoords(xv, one, zero, zero) for v, xv in x.items()}


# -- odd steps ------------------------------------------------------------------------


def _odd_system(c: GraphConnection, which: str, order: list[int]):
    """Rows of the linearized odd constraints.

    For alpha with upper gauges gamma: alpha_e -> alpha_e - gamma_h + b_e^-2 gamma_t.
    For beta with lower gauges eta:  beta_e -> beta_e + eta_t - b_e^-2 eta_h.
    Returns ``(rows, edge_rows)``: rows are ``(vertex, coefficients, rhs)`` and
    edge_rows[e] is the coefficient row for pinning e.
    """
    g = c.graph
    n = c.n
    idx = {v: i for i, v in enumerate(order)}
    zero = GrassmannNumber.zero(n)

    def edge_row(e: int) -> list[GrassmannNumber]:
        row = [zero] * len(order)
        val = c.value(e)
        binv2 = val.b.inverse() ** 2
        h = idx[g.vertex_of(c.head(e))]
        t = idx[g.vertex_of(c.tail(e))]
        if which == "alpha":
            row[h] = row[h] - 1
            row[t] = row[t] + binv2
        else:
            row[t] = row[t] + 1
            row[h] = row[h] - binv2
        return row

    erows = {e: edge_row(e) for e in g.edges}
    rows, rhs = [], []
    for v, darts in vertex_darts(c).items():
        row = [zero] * len(order)
        acc = zero
        for e, s in darts:
            row = [x + y.scale(s) for x, y in zip(row, erows[e])]
            acc = acc + getattr(c.value(e), which).scale(s)
        rows.append((v, row, -acc))
    return rows, erows


def _body_det(rows: list[list[GrassmannNumber]]) -> Fraction:
    return determinant([[x.body for x in row] for row in rows])


def _step_odd(c: GraphConnection, which: str, base: int):
    """Solve the odd vertex constraints with unipotent gauges.

    Returns ``(gauge, pin, residual)``.  With a pin the solution is unique.
    Without one, ``residual`` is ``(k, w)``: the gauge ``t k`` (t odd) keeps
    every constraint and moves the odd coordinates by ``t w_e``.
    """
    order = [base] + sorted(v for v in c.graph.vertices if v != base)
    n = c.n
    one = GrassmannNumber.one(n)
    zero = GrassmannNumber.zero(n)
    rows, erows = _odd_system(c, which, order)
    kept = [(row, r) for v, row, r in rows if v != base]
    pin = None
    residual = None
    for e in sorted(c.graph.edges):
        if _body_det([row for row, _ in kept] + [erows[e]]) != 0:
            pin = e
            break
    if pin is not None:
        mat = [row for row, _ in kept] + [erows[pin]]
        rhs = [r for _, r in kept] + [-getattr(c.value(pin), which)]
        sol = solve_grassmann(mat, rhs)
    else:
        mat = [row[1:] for row, _ in kept]
        rhs = [r for _, r in kept]
        try:
            sol = [zero] + (solve_grassmann(mat, rhs) if mat else [])
            k = [one] + (solve_grassmann(mat, [-row[0] for row, _ in kept]) if mat else [])
        except LinearAlgebraError as exc:  # pragma: no cover - reduced weighted Laplacians are invertible
            raise NormalizationError(f"{which} constraints: {exc}") from None
        w = []
        for e in sorted(c.graph.edges):
            acc = zero
            for x, y in zip(erows[e], k):
                acc = acc + x * y
            w.append(acc)
        residual = (dict(zip(order, k)), w)
    return _unipotent_gauge(which, dict(zip(order, sol))), pin, residual


def _unipotent_gauge(which: str, params: Mapping[int, GrassmannNumber]) -> dict[int, EdgeCoords]:
    n = next(iter(params.values())).n
    one = GrassmannNumber.one(n)
    zero = GrassmannNumber.zero(n)
    if which == "alpha":
        return {v: EdgeCoords(one, one, s, zero) for v, s in params.items()}
    return {v: EdgeCoords(one, one, zero, s) for v, s in params.items()}


def _odd_masks(n: int) -> list[int]:
    return [m for m in range(1, 1 << n) if bin(m).count("1") % 2 == 1]


def _shift_generators(residual, n: int, track: bool = False) -> list:
    """Spanning set {theta_S w} of the odd residual moves, as reduction generators."""
    if residual is None:
        return []
    _, w = residual
    zero = GrassmannNumber.zero(n)
    gens = []
    for mask in _odd_masks(n):
        mono = GrassmannNumber(n, {mask: 1})
        prod = [mono * x for x in w]
        if any(not p.is_zero() for p in prod):
            gens.append((mono if track else zero, prod))
    return gens


def _residual_shift(c: GraphConnection, which: str, residual) -> dict[int, EdgeCoords] | None:
    """Unipotent gauge moving the odd coordinates to their reduced representative."""
    n = c.n
    gens = _shift_generators(residual, n, track=True)
    if not gens:
        return None
    vals = [getattr(c.value(e), which) for e in sorted(c.graph.edges)]
    _, mult = _reduce_modulo(vals, gens)
    if mult.is_zero():
        return None
    k, _ = residual
    return _unipotent_gauge(which, {v: -(mult * kv) for v, kv in k.items()})


# -- global scaling ---------------------------------------------------------------------


def _even_nilpotent_masks(n: int) -> list[int]:
    return [m for m in range(1, 1 << n) if bin(m).count("1") % 2 == 0]


def _vec(values: list[GrassmannNumber]) -> dict:
    out = {}
    for i, x in enumerate(values):
        for mask, q in x.terms.items():
            out[(i, mask)] = q
    return out


@lru_cache(maxsize=128)
def _echelon(vecs: tuple) -> tuple[list, list, dict]:
    """Row-reduced ``[vectors | identity]`` for a tuple of sparse vectors."""
    keys = sorted({k for v in vecs for k, _ in v})
    col = {k: i for i, k in enumerate(keys)}
    m = len(vecs)
    # the identity block tracks the combinations
    mat = []
    for j, v in enumerate(vecs):
        row = [Fraction(0)] * (len(keys) + m)
        for k, q in v:
            row[col[k]] = q
        row[len(keys) + j] = Fraction(1)
        mat.append(row)
    red, pivots = rref(mat)
    return red, pivots, col


def _reduce_combo(target: list[GrassmannNumber], vectors: list[list[GrassmannNumber]]):
    """Reduce ``target`` modulo span(vectors) to its echelon-reduced representative.

    Returns ``(reduced, combo)`` with reduced = target - sum combo[j] * vectors[j].
    """
    if not vectors:
        return list(target), []
    n = target[0].n
    red, pivots, col = _echelon(tuple(tuple(sorted(_vec(v).items())) for v in vectors))
    width = len(col)
    tvec = [Fraction(0)] * width
    rest = [dict(x.terms) for x in target]
    for i, x in enumerate(target):
        for mask, q in x.terms.items():
            if (i, mask) in col:
                tvec[col[(i, mask)]] = q
                del rest[i][mask]
    combo = [Fraction(0)] * len(vectors)
    for row, pc in zip(red, pivots):
        if pc >= width:
            break
        f = tvec[pc]
        if f:
            tvec = [x - f * y for x, y in zip(tvec, row[:width])]
            combo = [x + f * y for x, y in zip(combo, row[width:])]
    for (i, mask), c in col.items():
        if tvec[c]:
            rest[i][mask] = tvec[c]
    return [GrassmannNumber(n, terms) for terms in rest], combo


def _reduce_modulo(target: list[GrassmannNumber], generators: list[tuple[GrassmannNumber, list[GrassmannNumber]]]):
    """Reduce ``target`` modulo span{vec(list)} canonically.

    ``generators`` pairs a multiplier with each spanning vector.  Returns
    ``(reduced, multiplier)`` where reduced = target - sum q_j vector_j and
    multiplier = sum q_j multiplier_j.
    """
    n = target[0].n if target else 0
    reduced, combo = _reduce_combo(target, [v for _, v in generators])
    multiplier = GrassmannNumber.zero(n)
    for q, (mult, _) in zip(combo, generators):
        if q:
            multiplier = multiplier + mult.scale(q)
    return reduced, multiplier


def _leading(values: list[GrassmannNumber]) -> Fraction:
    for x in values:
        for _, q in x.items():
            return q
    return Fraction(0)


def _unit_canonicalizer(vals: list[GrassmannNumber], n: int, extra=()) -> GrassmannNumber:
    """Even unit u with positive body making u*vals canonical modulo ``extra``."""
    masks = _even_nilpotent_masks(n)
    gens = list(extra)
    for mask in masks:
        mono = GrassmannNumber(n, {mask: 1})
        prod = [mono * x for x in vals]
        if any(not p.is_zero() for p in prod):
            gens.append((mono, prod))
    reduced, mult = _reduce_modulo(vals, gens)
    lead = _leading(reduced)
    if lead == 0:
        return GrassmannNumber.one(n)
    return (1 - mult).scale(1 / abs(lead))


def _stabilizer_canonicalizer(
    alphas: list[GrassmannNumber], betas: list[GrassmannNumber], n: int, shifts_a=(), shifts_b=()
) -> GrassmannNumber:
    """Element 1 + k (k alpha a residual shift) making (1 + k) beta canonical."""
    masks = _even_nilpotent_masks(n)
    # kernel of kappa -> (kappa alpha_e)_e modulo the alpha shifts, on even nilpotent kappa
    cols = []
    for mask in masks:
        mono = GrassmannNumber(n, {mask: 1})
        cols.append(_vec([mono * x for x in alphas]))
    cols += [_vec(vals) for _, vals in shifts_a]
    keys = sorted({k for v in cols for k in v})
    if keys:
        mat = [[v.get(k, Fraction(0)) for v in cols] for k in keys]
        kernel = nullspace(mat)
    else:
        kernel = [[Fraction(int(i == j)) for j in range(len(cols))] for i in range(len(cols))]
    gens = list(shifts_b)
    seen = set()
    for vec in kernel:
        kappa = GrassmannNumber(n, {mask: q for mask, q in zip(masks, vec) if q})
        if kappa.is_zero() or kappa in seen:
            continue
        seen.add(kappa)
        prod = [kappa * x for x in betas]
        if any(not p.is_zero() for p in prod):
            gens.append((kappa, prod))
    _, mult = _reduce_modulo(betas, gens)
    return 1 - mult


def _step_scale(c: GraphConnection, res_a=None, res_b=None) -> GrassmannNumber:
    """Constant diagonal gauge diag(1, lam): alpha -> lam alpha, beta -> lam^-1 beta.

    ``res_a`` and ``res_b`` are the odd residual directions left by steps 2
    and 3 (None when pinned); lam is chosen modulo those shifts.
    """
    n = c.n
    edges = sorted(c.graph.edges)
    alphas = [c.value(e).alpha for e in edges]
    betas = [c.value(e).beta for e in edges]
    shifts_a = _shift_generators(res_a, n)
    shifts_b = _shift_generators(res_b, n)
    if any(not x.is_zero() for x in alphas):
        lam = _unit_canonicalizer(alphas, n, shifts_a)
        scaled_b = [lam.inverse() * x for x in betas]
        stab = _stabilizer_canonicalizer([lam * x for x in alphas], scaled_b, n, shifts_a, shifts_b)
        lam = lam * stab.inverse()
    elif any(not x.is_zero() for x in betas):
        lam = _unit_canonicalizer(betas, n, shifts_b).inverse()
    else:
        lam = GrassmannNumber.one(n)
    return lam


def _log_a(c: GraphConnection) -> list[GrassmannNumber]:
    out = []
    for e in sorted(c.graph.edges):
        a = c.value(e).a
        out.append(a.scale(1 / a.body).log_unipotent())
    return out


def _odd_annihilator(w: list[GrassmannNumber], n: int) -> list[GrassmannNumber]:
    """Basis of the odd t with t w_e = 0 for every e."""
    masks = _odd_masks(n)
    cols = [_vec([GrassmannNumber(n, {m: 1}) * x for x in w]) for m in masks]
    keys = sorted({k for v in cols for k in v})
    if not keys:
        kernel = [[Fraction(int(i == j)) for j in range(len(masks))] for i in range(len(masks))]
    else:
        kernel = nullspace([[v.get(k, Fraction(0)) for v in cols] for k in keys])
    return [GrassmannNumber(n, {m: q for m, q in zip(masks, vec) if q}) for vec in kernel]


def _joint_kappas(c: GraphConnection, res_a, res_b) -> list[GrassmannNumber]:
    """Even nilpotent kappa with kappa alpha and kappa beta residual shifts.

    Returned modulo those with kappa alpha = kappa beta = 0, which fix the
    connection outright.
    """
    n = c.n
    edges = sorted(c.graph.edges)
    masks = _even_nilpotent_masks(n)
    alphas = [c.value(e).alpha for e in edges]
    betas = [c.value(e).beta for e in edges]
    cols = []
    for m in masks:
        mono = GrassmannNumber(n, {m: 1})
        col = {("a",) + k: q for k, q in _vec([mono * x for x in alphas]).items()}
        col.update({("b",) + k: q for k, q in _vec([mono * x for x in betas]).items()})
        cols.append(col)
    shift_cols = [{("a",) + k: q for k, q in _vec(v).items()} for _, v in _shift_generators(res_a, n)]
    shift_cols += [{("b",) + k: q for k, q in _vec(v).items()} for _, v in _shift_generators(res_b, n)]

    def kernel(columns):
        keys = sorted({k for v in columns for k in v})
        if not keys:
            return [[Fraction(int(i == j)) for j in range(len(columns))] for i in range(len(columns))]
        return nullspace([[v.get(k, Fraction(0)) for v in columns] for k in keys])

    fixed = [vec[: len(masks)] for vec in kernel(cols)]
    basis = list(fixed)
    out = []
    for vec in kernel(cols + shift_cols):
        kv = vec[: len(masks)]
        if rank(basis + [kv]) > len(basis):
            basis.append(kv)
            out.append(GrassmannNumber(n, {m: q for m, q in zip(masks, kv) if q}))
    return out


def _restore_odd(c: GraphConnection, target: GraphConnection, which: str, residual):
    """Move ``which`` back to the values of ``target`` along the residual shifts."""
    edges = sorted(c.graph.edges)
    diff = [getattr(c.value(e), which) - getattr(target.value(e), which) for e in edges]
    if all(x.is_zero() for x in diff):
        return c, {}
    gens = _shift_generators(residual, c.n, track=True)
    reduced, mult = _reduce_modulo(diff, gens)
    if any(not x.is_zero() for x in reduced):  # pragma: no cover - guarded by the kappa conditions
        raise NormalizationError(f"cannot restore {which} along the residual directions")
    k, _ = residual
    h = _unipotent_gauge(which, {v: -(mult * kv) for v, kv in k.items()})
    return gauge_transform(c, h), h


def _residual_moves(c: GraphConnection, res_a, res_b) -> list:
    """One-parameter families of gauges fixing b, alpha and beta of ``c``.

    Each entry maps ``(connection, q)`` to ``(moved connection, gauge)``.
    """
    n = c.n
    moves = []
    for which, res in (("alpha", res_a), ("beta", res_b)):
        if res is None:
            continue
        k, w = res
        for t in _odd_annihilator(w, n):
            def shift(d, q, t=t, k=k, which=which):
                h = _unipotent_gauge(which, {v: (t * kv).scale(q) for v, kv in k.items()})
                return gauge_transform(d, h), h
            moves.append(shift)
    for kappa in _joint_kappas(c, res_a, res_b):
        def rescale(d, q, kappa=kappa):
            lam = kappa.scale(q).exp_nilpotent()
            h = _scale_gauge(lam, d.graph.vertices)
            d = _apply_scale(d, lam)
            for which, res in (("alpha", res_a), ("beta", res_b)):
                if res is not None:
                    d, h2 = _restore_odd(d, c, which, res)
                    h = compose_gauges(h, h2)
            return d, h
        moves.append(rescale)
    return moves


def _a_residual(c: GraphConnection, res_a, res_b, base: int):
    """Canonical a values modulo the gauges that fix b, alpha and beta.

    Such gauges exist only when step 2 or 3 had no pin.  Their effect on log a
    (after re-solving the a constraints) spans a rational subspace, and log a
    is reduced modulo it.  Returns ``(connection, gauge)`` or None when
    nothing moves.
    """
    if res_a is None and res_b is None:
        return None
    n = c.n
    base_log = _log_a(c)
    moves, phis = [], []
    for mv in _residual_moves(c, res_a, res_b):
        d, _ = mv(c, 1)
        d = gauge_transform(d, _step_a(d, base))
        if any(d.value(e).astuple()[1:] != c.value(e).astuple()[1:] for e in c.graph.edges):
            raise NormalizationError("residual gauge moved b, alpha or beta")  # pragma: no cover
        phi = [x - y for x, y in zip(_log_a(d), base_log)]
        if any(not x.is_zero() for x in phi):
            moves.append(mv)
            phis.append(phi)
    if not moves:
        return None
    cur, total = c, {}
    for _ in range(n + 2):
        ell = _log_a(cur)
        reduced, combo = _reduce_combo(ell, phis)
        if reduced == ell:
            return (cur, total) if total else None
        for q, mv in zip(combo, moves):
            if q:
                cur, h = mv(cur, -q)
                total = compose_gauges(total, h)
        h = _step_a(cur, base)
        cur = gauge_transform(cur, h)
        total = compose_gauges(total, h)
    raise NormalizationError("reduction of a did not settle")  # pragma: no cover


def _scale_gauge(lam: GrassmannNumber, vertices) -> dict[int, GaugeElement]:
    n = lam.n
    zero = GrassmannNumber.zero(n)
    try:
        s = lam.sqrt()
        h: GaugeElement = EdgeCoords(s, s, zero, zero)
    except GrassmannError:
        h = Supermatrix(GrassmannNumber.one(n), zero, zero, lam)
    return {v: h for v in vertices}


def _apply_scale(c: GraphConnection, lam: GrassmannNumber) -> GraphConnection:
    inv = lam.inverse()
    vals = {e: EdgeCoords(v.a, v.b, lam * v.alpha, inv * v.beta) for e, v in c.items()}
    return GraphConnection(c.graph, vals, n=c.n)


# -- normalize --------------------------------------------------------------------------


@dataclass(frozen=True)
class NormalForm:
    connection: GraphConnection
    gauge: dict
    canonical: bool
    pins: dict = field(default_factory=dict)


def normal_form(c: GraphConnection, base: int | None = None) -> NormalForm:
    g = c.graph
    if not g.is_connected():
        raise NormalizationError("normalization needs a connected graph")
    if base is None:
        base = min(g.vertices)
    if base not in g.vertices:
        raise NormalizationError(f"base vertex {base} is not a vertex")
    gauge: dict = {}
    cur = c

    def apply(h):
        nonlocal cur, gauge
        cur = gauge_transform(cur, h)
        gauge = compose_gauges(gauge, h)

    apply(_step_b(cur, base))
    ha, pin_a, res_a = _step_odd(cur, "alpha", base)
    apply(ha)
    hb, pin_b, res_b = _step_odd(cur, "beta", base)
    apply(hb)
    lam = _step_scale(cur, res_a, res_b)
    if lam != 1:
        cur = _apply_scale(cur, lam)
        gauge = compose_gauges(gauge, _scale_gauge(lam, g.vertices))
    for which, res in (("alpha", res_a), ("beta", res_b)):
        h = _residual_shift(cur, which, res)
        if h is not None:
            apply(h)
    canonical = True
    apply(_step_a(cur, base))
    adjusted = _a_residual(cur, res_a, res_b, base)
    if adjusted is not None:
        cur, h = adjusted
        gauge = compose_gauges(gauge, h)
    bad = [v for v, r in check_gauge_constraints(cur).items() if not r.ok]
    if bad:  # pragma: no cover - each step solves its constraints exactly
        raise NormalizationError(f"constraints still fail at vertices {bad}")
    return NormalForm(cur, gauge, canonical, {"alpha": pin_a, "beta": pin_b, "base": base})


def normalize(c: GraphConnection, base: int | None = None) -> tuple[GraphConnection, dict]:
    """Gauge-equivalent connection satisfying all vertex constraints, and the gauge used."""
    nf = normal_form(c, base)
    return nf.connection, nf.gauge


# -- equivalence -------------------------------------------------------------------------


@dataclass(frozen=True)
class EquivalenceResult:
    equivalent: bool
    witness: dict | None
    method: str

    def __bool__(self) -> bool:
        return self.equivalent


def _invert_gauge(h: Mapping[int, GaugeElement]) -> dict:
    return {v: cinv(x) if isinstance(x, EdgeCoords) else sinv(_as_matrix(x)) for v, x in h.items()}


def is_gauge_equivalent(c1: GraphConnection, c2: GraphConnection, base: int | None = None) -> EquivalenceResult:
    """Decide gauge equivalence; the witness h satisfies gauge_transform(c1, h) == c2."""
    if c1.graph != c2.graph:
        raise NormalizationError("connections live on different fatgraphs")
    if c1.n != c2.n:
        raise NormalizationError("connections use different Grassmann algebras")
    try:
        n1 = normal_form(c1, base)
        n2 = normal_form(c2, base)
    except NormalizationError:
        # irrational roots: decide by the direct linear solve instead
        h = solve_gauge(c1, c2, base)
        return EquivalenceResult(h is not None, h, "linear-solve")
    if n1.connection == n2.connection:
        witness = compose_gauges(n1.gauge, _invert_gauge(n2.gauge))
        return EquivalenceResult(True, witness, "normal-form")
    if n1.canonical and n2.canonical:
        return EquivalenceResult(False, None, "normal-form")
    h = solve_gauge(c1, c2)
    return EquivalenceResult(h is not None, h, "linear-solve")


# -- direct linear solve -------------------------------------------------------------------


_ENTRY_NAMES = ("a", "alpha", "beta", "b")


def _entry(i: int, j: int) -> str:
    return _ENTRY_NAMES[2 * i + j]


def solve_gauge(c1: GraphConnection, c2: GraphConnection, base: int | None = None) -> dict | None:
    """Solve h_head M2_e = M1_e h_tail for all edges as one exact linear system.

    The unknowns are the Grassmann coefficients of every vertex matrix.  The
    diagonal bodies at the base vertex are pinned to 1 where they are free
    (constant scalars act trivially); a solution is accepted only if all its
    diagonal bodies are positive.  Returns the gauge or None.
    """
    g = c1.graph
    n = c1.n
    base = min(g.vertices) if base is None else base
    masks_by_parity = {
        0: [m for m in range(1 << n) if bin(m).count("1") % 2 == 0],
        1: [m for m in range(1 << n) if bin(m).count("1") % 2 == 1],
    }
    solver = SparseSolver()

    def unknowns(v: int, i: int, j: int):
        return [((v, i, j, m), m) for m in masks_by_parity[_BASIS_PARITY[i][j]]]

    for e in sorted(g.edges):
        m1 = to_matrix(c1.value(e))
        m2 = to_matrix(c2.value(e))
        h = g.vertex_of(c1.head(e))
        t = g.vertex_of(c1.tail(e))
        for i in range(2):
            for k in range(2):
                rows: dict[int, dict] = {}

                def add(product: GrassmannNumber, var, sign: int):
                    for mask, q in product.terms.items():
                        rows.setdefault(mask, {})
                        rows[mask][var] = rows[mask].get(var, 0) + sign * q

                for j in range(2):
                    # X_h M2
                    sign = -1 if (_BASIS_PARITY[i][j] and _BASIS_PARITY[j][k]) else 1
                    known = m2.entry(j, k)
                    for var, mask in unknowns(h, i, j):
                        add(GrassmannNumber(n, {mask: 1}) * known, var, sign)
                    # - M1 X_t
                    known = m1.entry(i, j)
                    for var, mask in unknowns(t, j, k):
                        add(known * GrassmannNumber(n, {mask: 1}), var, -sign)
                for row in rows.values():
                    if not solver.add(row):
                        return None
    solver.add({(base, 0, 0, 0): 1, None: -1})
    if not solver.consistent:
        return None
    probe = solver.reduce({(base, 1, 1, 0): 1})
    if any(k is not None for k in probe):
        if not solver.add({(base, 1, 1, 0): 1, None: -1}):
            return None
    sol = solver.solution()
    gauge = {}
    for v in g.vertices:
        ent = {}
        for i in range(2):
            for j in range(2):
                terms = {mask: sol.get(var, Fraction(0)) for var, mask in unknowns(v, i, j)}
                ent[_entry(i, j)] = GrassmannNumber(n, terms)
        m = Supermatrix(ent["a"], ent["alpha"], ent["beta"], ent["b"])
        if m.a.body <= 0 or m.b.body <= 0:
            return None
        try:
            gauge[v] = from_matrix(m)
        except CoordsError:
            gauge[v] = m
    if gauge_transform(c1, gauge) != c2:  # pragma: no cover - the system encodes exactly this
        raise NormalizationError("linear gauge solve produced a non-witness")
    return gauge


# -- dimension count --------------------------------------------------------------------------


def incidence_matrix(g: Fatgraph) -> list[list[int]]:
    """Linearized constraint matrix of one coordinate family (vertices x edges)."""
    order = sorted(g.vertices)
    edges = sorted(g.edges)
    col = {e: i for i, e in enumerate(edges)}
    mat = [[0] * len(edges) for _ in order]
    for r, v in enumerate(order):
        for d in g.vertices[v]:
            e = g.edge_of(d)
            mat[r][col[e]] += 1 if d == max(g.edges[e]) else -1
    return mat


@dataclass(frozen=True)
class Dimensions:
    chart: int
    constraint_rank: int
    moduli: int
    fiber: int


def residual_dimensions(g: Fatgraph) -> Dimensions:
    """Per-parity counts: chart 2E, constraints, and what is left after them."""
    r = rank(incidence_matrix(g))
    chart = 2 * len(g.edges)
    return Dimensions(chart, 2 * r, chart - 2 * r, 2 * r)

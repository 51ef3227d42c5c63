"""The gl(1|1) r-matrix, coordinate vector fields and the Fock-Rosly bracket.

Basis of gl(1|1): E (central), N, Psi+ and Psi- with
[N, Psi+-] = +-Psi+-, {Psi+, Psi-} = E and all other brackets zero.

Vector fields.  For an edge pointing into v with coordinates (a, b; al, be)
the fields X_i generate left multiplication g -> (1 + t e_i) g:

    X_E = a d_a,                 X_N = -b/2 d_b + al d_al,
    X_Psi+ = -a b^2 be/2 d_a + d_al,   X_Psi- = -al a/2 d_a + b^-2 d_be.

They satisfy [X_i, X_j] = -X_[e_i, e_j].  For an edge leaving v the fields
are transported through the reversal (a, b, al, be) -> (1/a, 1/b, -b^2 al, -b^2 be).

Bracket.  Per vertex, with half-edges ordered by the ciliation,

    P_v = sum_{s<t} r^{ij} X_i^s ^ X_j^t + 1/2 sum_s r^{ij} X_i^s ^ X_i^s,

where A ^ B = A (x) B - (-1)^{|A||B|} B (x) A and (A (x) B)(f, g) =
(-1)^{|B||f|} A(f) B(g).  Splitting r = Omega + r_a gives the equivalent form

    P_v = r_a(X^v, X^v) + sum_{s != t} sign(t - s) Omega(X^s, X^t),

with X^v the sum over the half-edges at v (the gauge generator).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .connection import GraphConnection, _check_path
from .coords import EdgeCoords, HatCoords, cinv, from_hat, to_hat, to_matrix
from .fatgraph import Fatgraph
from .grassmann import GrassmannNumber
from .observables import Derivation, Observable, Symbol, edge_symbols, substitute
from .observables import evaluate as _evaluate
from .supermatrix import smul

__all__ = [
    "BASIS",
    "PARITY",
    "TensorSquare",
    "structure_bracket",
    "standard_r",
    "casimir",
    "flip",
    "symmetric_part",
    "antisym_part",
    "cybe_residual",
    "edge_vector_fields",
    "inbound_vector_fields",
    "hatted_vector_fields",
    "simplified_hatted_vector_fields",
    "half_edge_fields",
    "bracket",
    "holonomy_observable",
    "connection_values",
    "evaluate",
    "pushforward",
]

BASIS = ("E", "N", "Psi+", "Psi-")
PARITY = {"E": 0, "N": 0, "Psi+": 1, "Psi-": 1}
HALF = Fraction(1, 2)

# nonzero super brackets [x, y] as {basis: coeff}
_BRACKETS = {
    ("N", "Psi+"): {"Psi+": 1},
    ("Psi+", "N"): {"Psi+": -1},
    ("N", "Psi-"): {"Psi-": -1},
    ("Psi-", "N"): {"Psi-": 1},
    ("Psi+", "Psi-"): {"E": 1},
    ("Psi-", "Psi+"): {"E": 1},
}


def structure_bracket(x: str, y: str) -> dict[str, Fraction]:
    return {k: Fraction(v) for k, v in _BRACKETS.get((x, y), {}).items()}


@dataclass(frozen=True)
class TensorSquare:
    """Element of gl(1|1) (x) gl(1|1) with rational coefficients."""

    coeffs: tuple  # sorted ((i, j), q) pairs with q != 0

    @classmethod
    def from_dict(cls, d: Mapping[tuple[str, str], object]) -> "TensorSquare":
        for i, j in d:
            if i not in PARITY or j not in PARITY:
                raise ValueError(f"unknown basis pair {(i, j)}")
        items = tuple(sorted(((k, Fraction(v)) for k, v in d.items() if Fraction(v)), key=lambda t: _pair_key(t[0])))
        return cls(items)

    def as_dict(self) -> dict[tuple[str, str], Fraction]:
        return dict(self.coeffs)

    def __getitem__(self, pair: tuple[str, str]) -> Fraction:
        return self.as_dict().get(pair, Fraction(0))

    def __add__(self, other: "TensorSquare") -> "TensorSquare":
        d = self.as_dict()
        for k, v in other.coeffs:
            d[k] = d.get(k, 0) + v
        return TensorSquare.from_dict(d)

    def scale(self, q) -> "TensorSquare":
        return TensorSquare.from_dict({k: v * Fraction(q) for k, v in self.coeffs})

    def __sub__(self, other: "TensorSquare") -> "TensorSquare":
        return self + other.scale(-1)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        return " + ".join(f"{q}*{i}(x){j}" for (i, j), q in self.coeffs).replace("+ -", "- ")


def _pair_key(pair):
    return (BASIS.index(pair[0]), BASIS.index(pair[1]))


def standard_r() -> TensorSquare:
    return TensorSquare.from_dict({("E", "N"): 1, ("N", "E"): 1, ("Psi+", "Psi-"): -2})


def casimir() -> TensorSquare:
    return TensorSquare.from_dict({("E", "N"): 1, ("N", "E"): 1, ("Psi+", "Psi-"): -1, ("Psi-", "Psi+"): 1})


def flip(t: TensorSquare) -> TensorSquare:
    """r^21: swap the factors with the super sign."""
    return TensorSquare.from_dict(
        {(j, i): (-q if PARITY[i] and PARITY[j] else q) for (i, j), q in t.coeffs}
    )


def symmetric_part(t: TensorSquare) -> TensorSquare:
    return (t + flip(t)).scale(HALF)


def antisym_part(t: TensorSquare) -> TensorSquare:
    return (t - flip(t)).scale(HALF)


def cybe_residual(r: TensorSquare) -> dict[tuple[str, str, str], Fraction]:
    """[r12, r13] + [r12, r23] + [r13, r23] as a full 64-entry tensor.

    Slot embeddings in U(g)^(x)3 follow the super tensor product rule; for
    even r this gives, with p the parity of the first tensor's factors and q
    that of the second,

        [r12, r13] = sum (-1)^{pq} [e_i, e_k] (x) e_j (x) e_l
        [r12, r23] = sum e_i (x) [e_j, e_k] (x) e_l
        [r13, r23] = sum (-1)^{pq} e_i (x) e_k (x) [e_j, e_l].
    """
    out = {(x, y, z): Fraction(0) for x in BASIS for y in BASIS for z in BASIS}
    for (i, j), q1 in r.coeffs:
        for (k, l), q2 in r.coeffs:
            c = q1 * q2
            sign = -1 if (PARITY[j] and PARITY[k]) else 1
            for m, s in structure_bracket(i, k).items():
                out[(m, j, l)] += sign * c * s
            for m, s in structure_bracket(j, k).items():
                out[(i, m, l)] += c * s
            sign2 = -1 if (PARITY[j] and PARITY[k]) else 1
            for m, s in structure_bracket(j, l).items():
                out[(i, k, m)] += sign2 * c * s
    return out


# -- vector fields ------------------------------------------------------------------------


def inbound_vector_fields(edge: int, hatted: bool = False) -> dict[str, Derivation]:
    """Fields on an edge pointing into the vertex, in its own coordinates."""
    a, b, al, be = edge_symbols(edge, hatted)
    sa, sb, sal, sbe = (next(iter(x.symbols())) for x in (a, b, al, be))
    return {
        "E": Derivation(0, {sa: a}),
        "N": Derivation(0, {sb: b.scale(-HALF), sal: al}),
        "Psi+": Derivation(1, {sa: (a * b * b * be).scale(-HALF), sal: Observable.constant(1)}),
        "Psi-": Derivation(1, {sa: (al * a).scale(-HALF), sbe: b ** -2}),
    }


def _reversal(edge: int) -> dict[Symbol, Observable]:
    a, b, al, be = edge_symbols(edge)
    rev = cinv(EdgeCoords(a, b, al, be))
    return {("a", edge): rev.a, ("b", edge): rev.b, ("alpha", edge): rev.alpha, ("beta", edge): rev.beta}


def pushforward(d: Derivation, forward: Mapping[Symbol, Observable], backward: Mapping[Symbol, Observable]) -> Derivation:
    """Transport a derivation through a change of variables.

    ``forward`` expresses the new symbols through the old ones and
    ``backward`` the old through the new; the result acts on the new symbols.
    """
    images = {}
    for s, expr in forward.items():
        images[s] = substitute(d(expr), backward)
    return Derivation(d.parity, images)


def edge_vector_fields(edge: int, inbound: bool = True) -> dict[str, Derivation]:
    """X_E, X_N, X_Psi+, X_Psi- on one edge, seen from its head (inbound) or tail."""
    fields = inbound_vector_fields(edge)
    if inbound:
        return fields
    rev = _reversal(edge)
    return {k: pushforward(x, rev, rev) for k, x in fields.items()}


def _hat_maps(edge: int):
    a, b, al, be = edge_symbols(edge)
    ah, bh, alh, beh = edge_symbols(edge, hatted=True)
    fwd = to_hat(EdgeCoords(a, b, al, be))
    back = from_hat(HatCoords(ah, bh, alh, beh))
    forward = {("a_hat", edge): fwd.a_hat, ("b_hat", edge): fwd.b_hat, ("alpha_hat", edge): fwd.alpha_hat, ("beta_hat", edge): fwd.beta_hat}
    backward = {("a", edge): back.a, ("b", edge): back.b, ("alpha", edge): back.alpha, ("beta", edge): back.beta}
    return forward, backward


def hatted_vector_fields(edge: int) -> dict[str, Derivation]:
    """Inbound fields rewritten in the hatted chart by change of variables."""
    forward, backward = _hat_maps(edge)
    return {k: pushforward(x, forward, backward) for k, x in inbound_vector_fields(edge).items()}


def simplified_hatted_vector_fields(edge: int) -> dict[str, Derivation]:
    """The simplified hatted fields as displayed in closed form."""
    ah, bh, alh, beh = edge_symbols(edge, hatted=True)
    one = Observable.constant(1)
    return {
        "E": Derivation(0, {("a_hat", edge): ah}),
        "N": Derivation(0, {("b_hat", edge): bh.scale(-HALF), ("alpha_hat", edge): alh, ("beta_hat", edge): -beh}),
        "Psi+": Derivation(1, {("alpha_hat", edge): one}),
        "Psi-": Derivation(1, {("a_hat", edge): -(alh * ah), ("beta_hat", edge): one}),
    }


# -- bracket --------------------------------------------------------------------------------


def half_edge_fields(graph: Fatgraph, dart: int) -> dict[str, Derivation]:
    """Fields of the half-edge ``dart`` at its vertex (edge stored low dart -> high dart)."""
    e = graph.edge_of(dart)
    return edge_vector_fields(e, inbound=dart == max(graph.edges[e]))


def _apply_pair(a_f: Observable, b_g: Observable, b_parity: int, f_parity: int) -> Observable:
    out = a_f * b_g
    if b_parity and f_parity:
        out = -out
    return out


def _tensor_eval(t: TensorSquare, xf: dict, xg: dict, f_par: int) -> Observable:
    """sum t^{ij} (X_i (x) Y_j)(f, g) given X_i(f) in xf and Y_j(g) in xg."""
    acc = Observable()
    for (i, j), q in t.coeffs:
        left = xf[i]
        right = xg[j]
        if left.is_zero() or right.is_zero():
            continue
        acc = acc + _apply_pair(left, right, PARITY[j], f_par).scale(q)
    return acc


def bracket(
    f: Observable,
    g: Observable,
    graph: Fatgraph,
    r: TensorSquare | Mapping[int, TensorSquare] | None = None,
    ciliation: Mapping[int, int] | None = None,
    form: str = "split",
) -> Observable:
    """Poisson bracket {f, g} on the chart of ``graph``.

    ``r`` is one r-matrix or one per vertex (default: :func:`standard_r`);
    ``ciliation`` maps vertices to the dart that comes first (default: the
    graph's own cilia).  ``form`` selects the wedge form of P_v or the
    equivalent split form r_a(X^v, X^v) + Omega part.
    """
    if form not in ("split", "wedge"):
        raise ValueError("form must be 'split' or 'wedge'")
    r_default = standard_r()
    f_par = f.parity
    g_par = g.parity
    known = {("a", e) for e in graph.edges} | {("b", e) for e in graph.edges}
    known |= {("alpha", e) for e in graph.edges} | {("beta", e) for e in graph.edges}
    stray = (f.symbols() | g.symbols()) - known
    if stray:
        raise ValueError(f"observables use symbols outside this chart: {sorted(stray)}")
    active = {s[1] for s in f.symbols()} | {s[1] for s in g.symbols()}
    acc = Observable()
    for v, darts in graph.vertices.items():
        if not any(graph.edge_of(d) in active for d in darts):
            continue
        rv = r.get(v, r_default) if isinstance(r, Mapping) else (r or r_default)
        order = list(darts)
        if ciliation and v in ciliation:
            k = order.index(ciliation[v])
            order = order[k:] + order[:k]
        fields = [half_edge_fields(graph, d) for d in order]
        xf = [{i: x(f) for i, x in fl.items()} for fl in fields]
        xg = [{i: x(g) for i, x in fl.items()} for fl in fields]
        if form == "wedge":
            acc = acc + _wedge_vertex(rv, xf, xg, f_par, g_par)
        else:
            acc = acc + _split_vertex(rv, xf, xg, f_par)
    return acc


def _wedge_vertex(r: TensorSquare, xf, xg, f_par: int, g_par: int) -> Observable:
    r21 = flip(r)
    acc = Observable()
    k = len(xf)
    for s in range(k):
        for t in range(k):
            if s < t:
                # r^{ij} X_i^s ^ X_j^t = r(X^s (x) X^t) - r21(X^t (x) X^s)
                acc = acc + _tensor_eval(r, xf[s], xg[t], f_par) - _tensor_eval(r21, xf[t], xg[s], f_par)
            elif s == t:
                acc = acc + (_tensor_eval(r, xf[s], xg[s], f_par) - _tensor_eval(r21, xf[s], xg[s], f_par)).scale(HALF)
    return acc


def _split_vertex(r: TensorSquare, xf, xg, f_par: int) -> Observable:
    omega = symmetric_part(r)
    ra = antisym_part(r)
    tot_f = {i: sum((x[i] for x in xf), Observable()) for i in BASIS}
    tot_g = {i: sum((x[i] for x in xg), Observable()) for i in BASIS}
    acc = _tensor_eval(ra, tot_f, tot_g, f_par)
    k = len(xf)
    for s in range(k):
        for t in range(k):
            if s != t:
                term = _tensor_eval(omega, xf[s], xg[t], f_par)
                acc = acc + (term if s < t else -term)
    return acc


# -- holonomy observables -------------------------------------------------------------------


def _symbolic_along(graph: Fatgraph, d: int) -> EdgeCoords:
    e = graph.edge_of(d)
    a, b, al, be = edge_symbols(e)
    val = EdgeCoords(a, b, al, be)
    return val if graph.pair(d) == max(graph.edges[e]) else cinv(val)


def holonomy_observable(graph: Fatgraph, cycle: Iterable[int]) -> Observable:
    """Supertrace of the symbolic holonomy along a closed dart path."""
    cycle = list(cycle)
    if not cycle:
        return Observable()
    _check_path(graph, cycle)
    if graph.vertex_of(graph.pair(cycle[-1])) != graph.vertex_of(cycle[0]):
        raise ValueError("holonomy observables need a closed path")
    acc = to_matrix(_symbolic_along(graph, cycle[0]))
    for d in cycle[1:]:
        acc = smul(to_matrix(_symbolic_along(graph, d)), acc)
    return acc.a - acc.b


def connection_values(c: GraphConnection) -> dict[Symbol, object]:
    """Symbol -> GrassmannNumber map for evaluating observables at c."""
    out = {}
    for e, v in c.items():
        out[("a", e)] = v.a
        out[("b", e)] = v.b
        out[("alpha", e)] = v.alpha
        out[("beta", e)] = v.beta
    return out


def evaluate(f: Observable, c: GraphConnection) -> GrassmannNumber:
    """Value of an observable at a concrete connection."""
    return _evaluate(f, connection_values(c), c.n)

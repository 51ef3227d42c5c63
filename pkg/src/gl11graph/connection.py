"""Flat GL(1|1) connections on ciliated fatgraphs.

A connection assigns to every edge a group element transporting the fiber at
its tail to the fiber at its head.  Values are stored in (a, b; alpha, beta)
coordinates for the orientation from the lower dart id to the higher one;
traversing an edge the other way uses the coordinate inverse.

Conventions:

* gauge by ``h`` (one group element per vertex): ``g_e -> h_head^-1 g_e h_tail``;
* holonomy of a path ``e1, ..., ek`` is the transport ``g_ek ... g_e1``.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .coords import CoordsError, EdgeCoords, cinv, compose, from_matrix, identity_coords, to_matrix
from .fatgraph import Fatgraph, FatgraphError, find_isomorphism, identify_flip_frame, whitehead_flip
from .grassmann import GrassmannError, GrassmannNumber
from .supermatrix import Supermatrix, sinv, smul

__all__ = [
    "ConnectionError",
    "GraphConnection",
    "parse_connection",
    "GaugeElement",
    "holonomy",
    "holonomy_coords",
    "face_path",
    "boundary_holonomies",
    "gauge_transform",
    "vertex_rescale",
    "gauge_element",
    "compose_gauges",
    "identity_connection",
    "rescale_element",
    "flip_general",
    "flip_minimal",
    "flip_minimal_closed_form",
    "pull_back",
    "double_flip_pullback",
    "flip_monodromy_equations",
    "boundary_supertraces",
]

GaugeElement = Union[EdgeCoords, Supermatrix]
HALF = Fraction(1, 2)


class ConnectionError(ValueError):
    pass


class GraphConnection:
    """Edge values of a connection on ``graph`` with ``n`` Grassmann generators."""

    __slots__ = ("graph", "n", "_values")

    def __init__(
        self,
        graph: Fatgraph,
        values: Mapping[int, EdgeCoords],
        heads: Mapping[int, int] | None = None,
        n: int | None = None,
    ):
        heads = dict(heads or {})
        missing = set(graph.edges) - set(values)
        if missing:
            raise ConnectionError(f"no value for edges {sorted(missing)}")
        extra = set(values) - set(graph.edges)
        if extra:
            raise ConnectionError(f"values given for unknown edges {sorted(extra)}")
        if n is None:
            n = next(iter(values.values())).n if values else 0
        stored = {}
        for e, val in values.items():
            if not isinstance(val, EdgeCoords):
                raise ConnectionError(f"edge {e}: expected EdgeCoords, got {type(val).__name__}")
            if val.n != n:
                raise ConnectionError(f"edge {e}: value uses {val.n} generators, expected {n}")
            lo, hi = sorted(graph.edges[e])
            head = heads.get(e, hi)
            if head not in (lo, hi):
                raise ConnectionError(f"edge {e}: dart {head} is not one of its darts {lo}, {hi}")
            stored[e] = val if head == hi else cinv(val)
        self.graph = graph
        self.n = n
        self._values = stored

    # -- access ------------------------------------------------------------------

    def value(self, e: int) -> EdgeCoords:
        """Coordinates of edge e oriented from its lower dart to its higher dart."""
        return self._values[e]

    def head(self, e: int) -> int:
        return max(self.graph.edges[e])

    def tail(self, e: int) -> int:
        return min(self.graph.edges[e])

    def oriented(self, e: int, head: int) -> EdgeCoords:
        """Value of edge e with the given head dart."""
        if head == self.head(e):
            return self._values[e]
        if head == self.tail(e):
            return cinv(self._values[e])
        raise ConnectionError(f"dart {head} does not belong to edge {e}")

    def along(self, d: int) -> EdgeCoords:
        """Transport leaving through dart d (tail d, head pair(d))."""
        g = self.graph
        return self.oriented(g.edge_of(d), g.pair(d))

    def items(self):
        return sorted(self._values.items())

    def values(self) -> dict[int, EdgeCoords]:
        return dict(self._values)

    def replace(self, updates: Mapping[int, EdgeCoords], heads: Mapping[int, int] | None = None):
        vals = dict(self._values)
        heads = dict(heads or {})
        for e, val in updates.items():
            h = heads.get(e, self.head(e))
            vals[e] = val if h == self.head(e) else cinv(val)
        return GraphConnection(self.graph, vals, n=self.n)

    def is_fermion_free(self) -> bool:
        return all(v.is_fermion_free() for v in self._values.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, GraphConnection):
            return NotImplemented
        return self.graph == other.graph and self._values == other._values

    def __hash__(self):
        return hash(tuple(sorted(self._values.items(), key=lambda kv: kv[0])))

    def __repr__(self) -> str:
        return f"GraphConnection(edges={len(self._values)}, n={self.n})"

    # -- text format -----------------------------------------------------------

    def to_text(self, graph_ref: str | None = None) -> str:
        lines = []
        if graph_ref:
            lines.append(f"graph {graph_ref}")
        lines.append(f"generators {self.n}")
        for e, v in self.items():
            lines.append(
                f"g {e} head={self.head(e)} a={v.a.to_text()} b={v.b.to_text()} "
                f"alpha={v.alpha.to_text()} beta={v.beta.to_text()}"
            )
        return "\n".join(lines) + "\n"


_G_RECORD = re.compile(
    r"^g\s+(-?\d+)\s+head=(-?\d+)\s+a=(\S+)\s+b=(\S+)\s+alpha=(\S+)\s+beta=(\S+)$"
)


def parse_connection(text: str, graph: Fatgraph | None = None):
    """Parse a connection file.

    Returns ``(records, graph_ref, n)`` when ``graph`` is None, where records
    maps edge id to ``(head, EdgeCoords)``; otherwise the GraphConnection on
    ``graph`` together with the graph reference.
    """
    records: dict[int, tuple[int, EdgeCoords]] = {}
    graph_ref = None
    n = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("graph "):
            graph_ref = line[6:].strip()
            continue
        if line.startswith("generators"):
            parts = line.split()
            if len(parts) != 2 or not parts[1].isdigit():
                raise ConnectionError(f"line {lineno}: expected 'generators <N>'")
            n = int(parts[1])
            continue
        m = _G_RECORD.match(line)
        if not m:
            raise ConnectionError(f"line {lineno}: unrecognized record {line!r}")
        if n is None:
            raise ConnectionError(f"line {lineno}: 'generators' must precede edge records")
        e, head = int(m.group(1)), int(m.group(2))
        if e in records:
            raise ConnectionError(f"line {lineno}: edge {e} given twice")
        try:
            val = EdgeCoords(*(GrassmannNumber.from_text(t, n) for t in m.groups()[2:]))
        except (GrassmannError, CoordsError) as exc:
            raise ConnectionError(f"line {lineno}: {exc}") from None
        records[e] = (head, val)
    if n is None:
        raise ConnectionError("missing 'generators' line")
    if graph is None:
        return records, graph_ref, n
    for e, (head, _) in records.items():
        if e in graph.edges and head not in graph.edges[e]:
            raise ConnectionError(f"edge {e}: head dart {head} is not one of {graph.edges[e]}")
    conn = GraphConnection(
        graph, {e: v for e, (_, v) in records.items()}, heads={e: h for e, (h, _) in records.items()}, n=n
    )
    return conn, graph_ref


def identity_connection(graph: Fatgraph, n: int) -> GraphConnection:
    return GraphConnection(graph, {e: identity_coords(n) for e in graph.edges}, n=n)


# -- holonomy -------------------------------------------------------------------


def _check_path(graph: Fatgraph, path: Iterable[int]) -> list[int]:
    path = list(path)
    if not path:
        raise ConnectionError("empty path")
    for d in path:
        if d not in graph._dart_vertex:
            raise ConnectionError(f"path uses unknown dart {d}")
    for d0, d1 in zip(path, path[1:]):
        if graph.vertex_of(graph.pair(d0)) != graph.vertex_of(d1):
            raise ConnectionError(
                f"path breaks between dart {d0} (arrives at vertex "
                f"{graph.vertex_of(graph.pair(d0))}) and dart {d1} (leaves vertex {graph.vertex_of(d1)})"
            )
    return path


def holonomy_coords(c: GraphConnection, path: Iterable[int]) -> EdgeCoords:
    """Transport along a dart path; each dart d crosses its edge from d to pair(d)."""
    path = _check_path(c.graph, path)
    acc = c.along(path[0])
    for d in path[1:]:
        acc = compose(c.along(d), acc)
    return acc


def holonomy(c: GraphConnection, path: Iterable[int]) -> Supermatrix:
    """Holonomy as a supermatrix, multiplied directly in GL(1|1)."""
    path = _check_path(c.graph, path)
    acc = to_matrix(c.along(path[0]))
    for d in path[1:]:
        acc = smul(to_matrix(c.along(d)), acc)
    return acc


def face_path(graph: Fatgraph, d: int) -> list[int]:
    """Boundary cycle starting with dart d."""
    path = [d]
    nxt = graph.face_next(d)
    while nxt != d:
        path.append(nxt)
        nxt = graph.face_next(nxt)
    return path


def boundary_holonomies(c: GraphConnection) -> dict[int, EdgeCoords]:
    """Holonomy around each boundary cycle, keyed by its smallest dart."""
    return {face[0]: holonomy_coords(c, face) for face in c.graph.faces()}


# -- gauge ----------------------------------------------------------------------


def _as_matrix(h: GaugeElement) -> Supermatrix:
    return to_matrix(h) if isinstance(h, EdgeCoords) else h


def gauge_element(h: GaugeElement) -> GaugeElement:
    if isinstance(h, Supermatrix):
        if h.parity != 0 or h.a.body <= 0 or h.b.body <= 0:
            raise ConnectionError("gauge elements must lie in the identity component of GL(1|1)")
    elif not isinstance(h, EdgeCoords):
        raise ConnectionError(f"unsupported gauge element {type(h).__name__}")
    return h


def _gauged_edge(g: EdgeCoords, h_head: GaugeElement | None, h_tail: GaugeElement | None) -> EdgeCoords:
    if h_head is None and h_tail is None:
        return g
    if isinstance(h_head, (EdgeCoords, type(None))) and isinstance(h_tail, (EdgeCoords, type(None))):
        out = g
        if h_tail is not None:
            out = compose(out, h_tail)
        if h_head is not None:
            out = compose(cinv(h_head), out)
        return out
    m = to_matrix(g)
    if h_tail is not None:
        m = smul(m, _as_matrix(h_tail))
    if h_head is not None:
        m = smul(sinv(_as_matrix(h_head)), m)
    try:
        return from_matrix(m)
    except CoordsError as exc:
        raise ConnectionError(f"gauged value has no exact coordinates: {exc}") from None


def gauge_transform(c: GraphConnection, h: Mapping[int, GaugeElement]) -> GraphConnection:
    """Apply ``g_e -> h_head^-1 g_e h_tail``; vertices missing from h are untouched."""
    g = c.graph
    for v in h:
        if v not in g.vertices:
            raise ConnectionError(f"gauge given at unknown vertex {v}")
        gauge_element(h[v])
    new = {}
    for e, val in c.items():
        hv = h.get(g.vertex_of(c.head(e)))
        tv = h.get(g.vertex_of(c.tail(e)))
        new[e] = _gauged_edge(val, hv, tv)
    return GraphConnection(g, new, n=c.n)


def compose_gauges(first: Mapping[int, GaugeElement], second: Mapping[int, GaugeElement]) -> dict:
    """Gauge equal to applying ``first`` and then ``second``: h = h_first h_second."""
    out: dict = {}
    for v in set(first) | set(second):
        x, y = first.get(v), second.get(v)
        if x is None:
            out[v] = y
        elif y is None:
            out[v] = x
        elif isinstance(x, EdgeCoords) and isinstance(y, EdgeCoords):
            out[v] = compose(x, y)
        else:
            out[v] = smul(_as_matrix(x), _as_matrix(y))
    return out


def rescale_element(kind: int, param: GrassmannNumber) -> EdgeCoords:
    """Group element used by each vertex rescaling.

    kind 1: scalar c;  kind 2: diag(1/c, c);  kind 3: upper(gamma);  kind 4: lower(gamma).
    """
    n = param.n
    one = GrassmannNumber.one(n)
    zero = GrassmannNumber.zero(n)
    if kind in (1, 2):
        if not param.is_even() or param.body <= 0:
            raise ConnectionError(f"rescaling kind {kind} needs an even parameter with positive body")
        return EdgeCoords(param, one, zero, zero) if kind == 1 else EdgeCoords(one, param, zero, zero)
    if kind in (3, 4):
        if not param.is_odd():
            raise ConnectionError(f"rescaling kind {kind} needs an odd parameter")
        return EdgeCoords(one, one, param, zero) if kind == 3 else EdgeCoords(one, one, zero, param)
    raise ConnectionError(f"rescaling kind must be 1, 2, 3 or 4, got {kind}")


def _rescale_inbound(g: EdgeCoords, kind: int, p: GrassmannNumber) -> EdgeCoords:
    a, b, al, be = g.astuple()
    if kind == 1:
        return EdgeCoords(a * p.inverse(), b, al, be)
    if kind == 2:
        return EdgeCoords(a, b * p.inverse(), p * p * al, be)
    if kind == 3:
        return EdgeCoords(a * (1 - b * b * be * p * HALF), b, al - p, be)
    raise AssertionError(kind)


def _rescale_outbound(g: EdgeCoords, p: GrassmannNumber) -> EdgeCoords:
    a, b, al, be = g.astuple()
    return EdgeCoords(a * (1 - b * b * al * p * HALF), b, al, be + p)


def vertex_rescale(c: GraphConnection, v: int, kind: int, param: GrassmannNumber) -> GraphConnection:
    """Vertex rescaling in closed form.

    Kinds 1 to 3 act on the edges read as pointing into v, kind 4 on the edges
    read as leaving v; edges are re-oriented as needed and stored back.  The
    result equals the gauge transform by :func:`rescale_element` at v alone.
    A loop at v meets v at both ends; it is handled by the gauge formula.
    """
    g = c.graph
    if v not in g.vertices:
        raise ConnectionError(f"no vertex {v}")
    h = rescale_element(kind, param)
    updates = {}
    heads = {}
    for d in g.vertices[v]:
        e = g.edge_of(d)
        if g.is_loop(e):
            updates[e] = _gauged_edge(c.value(e), h, h)
            heads[e] = c.head(e)
            continue
        if kind == 4:
            val = c.oriented(e, g.pair(d))
            updates[e] = _rescale_outbound(val, param)
            heads[e] = g.pair(d)
        else:
            val = c.oriented(e, d)
            updates[e] = _rescale_inbound(val, kind, param)
            heads[e] = d
    return c.replace(updates, heads)


# -- flips ----------------------------------------------------------------------

def flip_general(c: GraphConnection, e: int):
    """Connection on the flipped graph with f carrying g_e.

    Each dart that changes vertex transports its edge value through g_e: the
    dart b moves from v to u' = u, the dart d from u to v' = v.  Returns
    ``(connection, record)`` with the record of :func:`whitehead_flip`.
    """
    g = c.graph
    new_graph, record = whitehead_flip(g, e)
    fr = record["frame"]
    g5 = c.oriented(e, fr.head)
    g5inv = cinv(g5)
    vals = {}
    for x, val in c.items():
        if x == e:
            continue
        tail, head = c.tail(x), c.head(x)
        out = val
        if tail == fr.b:
            out = compose(out, g5)
        elif tail == fr.d:
            out = compose(out, g5inv)
        if head == fr.b:
            out = compose(g5inv, out)
        elif head == fr.d:
            out = compose(g5, out)
        vals[x] = out
    vals[e] = g5
    heads = {x: max(g.edges[x]) for x in vals}
    heads[e] = fr.head
    return GraphConnection(new_graph, vals, heads=heads, n=c.n), record


def flip_minimal(c: GraphConnection, e: int):
    """General flip followed by the vertex gauge that clears f's fermions.

    At u' the gauge is upper(-b5^2 alpha5) and at v' it is lower(b5^2 beta5),
    where (a5, b5; alpha5, beta5) is g_e read from u to v.  Afterwards f
    carries (a5 (1 - b5^2 alpha5 beta5 / 2), b5; 0, 0).
    """
    flipped, record = flip_general(c, e)
    fr = record["frame"]
    a5, b5, al5, be5 = c.oriented(e, fr.head).astuple()
    b52 = b5 * b5
    one = GrassmannNumber.one(c.n)
    zero = GrassmannNumber.zero(c.n)
    h = {
        fr.u: EdgeCoords(one, one, -(b52 * al5), zero),
        fr.v: EdgeCoords(one, one, zero, b52 * be5),
    }
    return gauge_transform(flipped, h), record


def flip_minimal_closed_form(c: GraphConnection, e: int):
    """Minimal flip from explicit per-edge formulas (five distinct edges only).

    Labels: edges 1 (a) and 2 (b) leave v, edges 3 (c) and 4 (d) enter u and
    edge 5 runs from u to v.  After the flip 1 leaves v', 2 leaves u', 3 enters
    u', 4 enters v' and the new edge runs from u' to v'.
    """
    g = c.graph
    new_graph, record = whitehead_flip(g, e)
    fr = record["frame"]
    labels = record["labels"]
    edges = [labels[k] for k in "abcd"] + [e]
    if len(set(edges)) != 5:
        raise ConnectionError(
            f"closed-form minimal flip needs five distinct edges around {e}, got {edges}"
        )
    a1, b1, al1, be1 = c.oriented(labels["a"], g.pair(fr.a)).astuple()
    a2, b2, al2, be2 = c.oriented(labels["b"], g.pair(fr.b)).astuple()
    a3, b3, al3, be3 = c.oriented(labels["c"], fr.c).astuple()
    a4, b4, al4, be4 = c.oriented(labels["d"], fr.d).astuple()
    a5, b5, al5, be5 = c.oriented(e, fr.head).astuple()
    b52 = b5 * b5
    zero = GrassmannNumber.zero(c.n)
    w = 1 - b52 * al5 * be5 * HALF
    new = {
        labels["a"]: EdgeCoords(a1 * (1 - b1 * b1 * b52 * al1 * be5 * HALF), b1, al1, be1 + b52 * be5),
        labels["b"]: EdgeCoords(
            a2 * a5 * (1 - b2 * b2 * b52 * al2 * be5 * HALF) * w, b2 * b5, al2, be5 + b52.inverse() * be2
        ),
        labels["c"]: EdgeCoords(a3 * (1 - b3 * b3 * b52 * al5 * be3 * HALF), b3, al3 + b52 * al5, be3),
        labels["d"]: EdgeCoords(
            a4 * a5 * (1 - b4 * b4 * b52 * al5 * be4 * HALF) * w, b4 * b5, b52.inverse() * al4 + al5, be4
        ),
        e: EdgeCoords(a5 * w, b5, zero, zero),
    }
    heads = {
        labels["a"]: g.pair(fr.a),
        labels["b"]: g.pair(fr.b),
        labels["c"]: fr.c,
        labels["d"]: fr.d,
        e: fr.head,
    }
    vals = {x: c.value(x) for x in g.edges if x not in new}
    vals.update(new)
    heads.update({x: c.head(x) for x in g.edges if x not in new})
    return GraphConnection(new_graph, vals, heads=heads, n=c.n), record


# -- transport along graph isomorphisms -------------------------------------------


def pull_back(c2: GraphConnection, graph1: Fatgraph, phi: Mapping[int, int]) -> GraphConnection:
    """Connection on graph1 induced by a dart isomorphism phi: graph1 -> c2.graph."""
    vals = {}
    heads = {}
    for e, (d1, d2) in graph1.edges.items():
        vals[e] = c2.oriented(c2.graph.edge_of(phi[d2]), phi[d2])
        heads[e] = d2
    return GraphConnection(graph1, vals, heads=heads, n=c2.n)


def double_flip_pullback(c: GraphConnection, e: int, flip=None) -> GraphConnection:
    """Flip e twice and bring the result back to the original graph.

    The double flip returns the original fatgraph up to exchanging the two
    darts of e; the exchange is found as an isomorphism fixing all other darts.
    """
    flip = flip or flip_minimal
    once, _ = flip(c, e)
    twice, _ = flip(once, e)
    g = c.graph
    d1, d2 = g.edges[e]
    fixed = {d: d for d in g.darts if d not in (d1, d2)}
    fixed[d1] = d2
    phi = find_isomorphism(g, twice.graph, fixed)
    if phi is None:
        phi = find_isomorphism(g, twice.graph)
    if phi is None:  # pragma: no cover - double flip always returns an isomorphic graph
        raise FatgraphError("double flip did not return an isomorphic graph")
    return pull_back(twice, g, phi)


# -- flip monodromy ---------------------------------------------------------------

_PIECES = (
    # name, word (entering dart label, ..., leaving dart label), flipped word
    ("g_a g_e g_c = g_a' g_f g_c'", ("c", "e", "a"), ("c", "f", "a")),
    ("g_b g_e g_d = g_b' g_f^-1 g_d'", ("d", "e", "b"), ("d", "f^-1", "b")),
    ("g_a g_e g_d = g_a' g_d'", ("d", "e", "a"), ("d", "a")),
    ("g_d^-1 g_c = g_d'^-1 g_f g_c'", ("c", "d^-1"), ("c", "f", "d^-1")),
    ("g_b g_e g_c = g_b' g_c'", ("c", "e", "b"), ("c", "b")),
    ("g_a g_b^-1 = g_a' g_f g_b'^-1", ("b^-1", "a"), ("b^-1", "f", "a")),
)


def _frame_reader(c: GraphConnection, fr):
    """Edge elements as read in the flip frame: a, b leave v; c, d enter u; e, f run u to v."""
    g = c.graph

    def read(label: str) -> EdgeCoords:
        inverse = label.endswith("^-1")
        name = label[:-3] if inverse else label
        if name in ("e", "f"):
            val = c.oriented(fr.edge, fr.head)
        elif name in ("a", "b"):
            val = c.along(getattr(fr, name))
        else:
            dart = getattr(fr, name)
            val = c.oriented(g.edge_of(dart), dart)
        return cinv(val) if inverse else val

    return read


def _word(read, word) -> EdgeCoords:
    acc = read(word[0])
    for label in word[1:]:
        acc = compose(read(label), acc)
    return acc


def flip_monodromy_equations(before: GraphConnection, after: GraphConnection, e: int) -> list[dict]:
    """Evaluate the six path-piece monodromy equations of a flip at e.

    ``literal`` compares both sides as written, reading every symbol as an
    edge element in the flip frame.  ``transported`` additionally accounts for
    the endpoint fibers of each piece: when the far end of a boundary edge is
    one of the moved darts b or d, the fiber there is that of u' or v' after
    the flip, and the two sides differ by g_e at that end.  When the five
    framed edges are distinct the two checks coincide.
    """
    g = before.graph
    fr = identify_flip_frame(g, e)
    read_old = _frame_reader(before, fr)
    read_new = _frame_reader(after, fr)
    g5 = before.oriented(e, fr.head)

    def fiber_shift(dart: int) -> EdgeCoords:
        # transport from the old fiber at dart to the new one
        if dart == fr.b:
            return cinv(g5)
        if dart == fr.d:
            return g5
        return identity_coords(before.n)

    def end_dart(label: str, entering: bool) -> int:
        name = label[:-3] if label.endswith("^-1") else label
        dart = getattr(fr, name)
        leaves = name in ("a", "b")
        if label.endswith("^-1"):
            leaves = not leaves
        # a piece starts at the far end of its entering edge and ends at the far end of its leaving edge
        return g.pair(dart) if (leaves != entering) else dart

    out = []
    for name, old_word, new_word in _PIECES:
        lhs = _word(read_old, old_word)
        rhs = _word(read_new, new_word)
        start = end_dart(old_word[0], True)
        stop = end_dart(old_word[-1], False)
        moved = compose(fiber_shift(stop), compose(lhs, cinv(fiber_shift(start))))
        out.append({"equation": name, "lhs": lhs, "rhs": rhs, "literal": lhs == rhs, "transported": moved == rhs})
    return out


def boundary_supertraces(c: GraphConnection) -> list[GrassmannNumber]:
    """Supertraces of the boundary holonomies, in face order."""
    out = []
    for face in c.graph.faces():
        m = holonomy(c, face)
        out.append(m.a - m.b)
    return out

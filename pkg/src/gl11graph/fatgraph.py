"""Ciliated fatgraphs as combinatorial maps on darts (half-edges).

A fatgraph is a set of darts with two permutations: the edge involution
``pairing`` and the counterclockwise vertex rotation.  Each vertex is stored
as the tuple of its darts in counterclockwise order, the first being the
cilium.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

__all__ = [
    "Fatgraph",
    "FatgraphError",
    "GraphFormatError",
    "FlipFrame",
    "SurfaceInvariants",
    "surface_invariants",
    "identify_flip_frame",
    "whitehead_flip",
    "find_isomorphism",
    "theta_graph",
    "dumbbell_graph",
    "k4_graph",
    "standard_graph",
]


class FatgraphError(ValueError):
    pass


class GraphFormatError(FatgraphError):
    pass


@dataclass(frozen=True)
class SurfaceInvariants:
    genus: int
    punctures: int
    vertex_count: int
    edge_count: int

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.genus, self.punctures, self.vertex_count, self.edge_count)


@dataclass(frozen=True)
class Fatgraph:
    """Immutable ciliated fatgraph.

    ``vertices`` maps vertex id to its counterclockwise dart tuple (cilium
    first); ``edges`` maps edge id to its two darts.
    """

    vertices: Mapping[int, tuple[int, ...]]
    edges: Mapping[int, tuple[int, int]]
    _dart_vertex: dict = field(init=False, repr=False, compare=False)
    _dart_edge: dict = field(init=False, repr=False, compare=False)
    _pairing: dict = field(init=False, repr=False, compare=False)
    _next: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        vertices = {int(v): tuple(int(d) for d in ds) for v, ds in dict(self.vertices).items()}
        edges = {int(e): (int(p[0]), int(p[1])) for e, p in dict(self.edges).items()}
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", edges)
        dart_vertex: dict[int, int] = {}
        nxt: dict[int, int] = {}
        for v, darts in vertices.items():
            if not darts:
                raise FatgraphError(f"vertex {v} has no darts")
            for i, d in enumerate(darts):
                if d in dart_vertex:
                    raise FatgraphError(f"dart {d} listed at vertices {dart_vertex[d]} and {v}")
                dart_vertex[d] = v
                nxt[d] = darts[(i + 1) % len(darts)]
        dart_edge: dict[int, int] = {}
        pairing: dict[int, int] = {}
        for e, (d1, d2) in edges.items():
            if d1 == d2:
                raise FatgraphError(f"edge {e} pairs dart {d1} with itself")
            for d in (d1, d2):
                if d in dart_edge:
                    raise FatgraphError(f"dart {d} belongs to edges {dart_edge[d]} and {e}")
                if d not in dart_vertex:
                    raise FatgraphError(f"dart {d} of edge {e} is not at any vertex")
                dart_edge[d] = e
            pairing[d1] = d2
            pairing[d2] = d1
        for d in dart_vertex:
            if d not in dart_edge:
                raise FatgraphError(f"dart {d} is not paired")
        object.__setattr__(self, "_dart_vertex", dart_vertex)
        object.__setattr__(self, "_dart_edge", dart_edge)
        object.__setattr__(self, "_pairing", pairing)
        object.__setattr__(self, "_next", nxt)
        if not self.is_connected():
            raise FatgraphError("fatgraph is not connected")

    # -- basic maps -------------------------------------------------------------
    @property
    def darts(self) -> list[int]:
        return sorted(self._dart_vertex)

    def pair(self, d: int) -> int:
        return self._pairing[d]

    def vertex_of(self, d: int) -> int:
        return self._dart_vertex[d]

    def edge_of(self, d: int) -> int:
        return self._dart_edge[d]

    def rotate(self, d: int) -> int:
        """Next dart counterclockwise at the same vertex."""
        return self._next[d]

    def face_next(self, d: int) -> int:
        """Boundary walk: cross the edge of ``d``, then turn counterclockwise."""
        return self._next[self._pairing[d]]

    def is_loop(self, e: int) -> bool:
        d1, d2 = self.edges[e]
        return self._dart_vertex[d1] == self._dart_vertex[d2]

    def is_trivalent(self) -> bool:
        return all(len(ds) == 3 for ds in self.vertices.values())

    def degree(self, v: int) -> int:
        return len(self.vertices[v])

    def cilium(self, v: int) -> int:
        return self.vertices[v][0]

    def is_connected(self) -> bool:
        if not self._dart_vertex:
            return False
        start = next(iter(self.vertices))
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for d in self.vertices[v]:
                w = self._dart_vertex[self._pairing[d]]
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(self.vertices)

    def faces(self) -> list[tuple[int, ...]]:
        """Boundary cycles as dart sequences, each starting at its minimal dart."""
        seen: set[int] = set()
        out = []
        for d0 in self.darts:
            if d0 in seen:
                continue
            cyc = [d0]
            seen.add(d0)
            d = self.face_next(d0)
            while d != d0:
                cyc.append(d)
                seen.add(d)
                d = self.face_next(d)
            out.append(tuple(cyc))
        return out

    def with_ciliation(self, cilia: Mapping[int, int]) -> "Fatgraph":
        """Same fatgraph with the cilium at vertex v moved to dart cilia[v]."""
        vertices = dict(self.vertices)
        for v, d in cilia.items():
            ds = vertices[v]
            if d not in ds:
                raise FatgraphError(f"dart {d} is not at vertex {v}")
            i = ds.index(d)
            vertices[v] = ds[i:] + ds[:i]
        return Fatgraph(vertices, self.edges)

    # -- file format -------------------------------------------------------------
    def to_text(self, generator_count: int | None = None) -> str:
        lines = []
        if generator_count is not None:
            lines.append(f"generators {generator_count}")
        for v in sorted(self.vertices):
            lines.append(f"v {v}: " + ",".join(map(str, self.vertices[v])))
        for e in sorted(self.edges):
            d1, d2 = self.edges[e]
            lines.append(f"e {e}: {d1}-{d2}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, trivalent: bool = True) -> tuple["Fatgraph", int | None]:
        """Parse a graph file; returns ``(graph, generator_count or None)``."""
        vertices: dict[int, tuple[int, ...]] = {}
        edges: dict[int, tuple[int, int]] = {}
        where: dict[int, int] = {}
        gens = None
        vre = re.compile(r"^v\s+(-?\d+)\s*:\s*(.*)$")
        ere = re.compile(r"^e\s+(-?\d+)\s*:\s*(-?\d+)\s*-\s*(-?\d+)\s*$")
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("generators"):
                parts = line.split()
                if len(parts) != 2 or not parts[1].isdigit():
                    raise GraphFormatError(f"line {lineno}: expected 'generators <N>'")
                gens = int(parts[1])
                continue
            m = vre.match(line)
            if m:
                v = int(m.group(1))
                if v in vertices:
                    raise GraphFormatError(f"line {lineno}: vertex {v} defined twice")
                try:
                    darts = tuple(int(t) for t in m.group(2).split(","))
                except ValueError:
                    raise GraphFormatError(f"line {lineno}: bad dart list {m.group(2)!r}") from None
                for d in darts:
                    if d in where:
                        raise GraphFormatError(
                            f"line {lineno}: dart {d} already listed on line {where[d]}"
                        )
                    where[d] = lineno
                vertices[v] = darts
                continue
            m = ere.match(line)
            if m:
                e, d1, d2 = (int(g) for g in m.groups())
                if e in edges:
                    raise GraphFormatError(f"line {lineno}: edge {e} defined twice")
                if d1 == d2:
                    raise GraphFormatError(f"line {lineno}: dart {d1} paired with itself")
                edges[e] = (d1, d2)
                continue
            raise GraphFormatError(f"line {lineno}: unrecognized record {line!r}")
        paired: dict[int, int] = {}
        for e, (d1, d2) in edges.items():
            for d in (d1, d2):
                if d in paired:
                    raise GraphFormatError(f"dart {d} appears in edges {paired[d]} and {e}")
                if d not in where:
                    raise GraphFormatError(f"dart {d} of edge {e} is not listed at any vertex")
                paired[d] = e
        for d, lineno in sorted(where.items()):
            if d not in paired:
                raise GraphFormatError(f"line {lineno}: dart {d} is not paired by any edge")
        try:
            g = cls(vertices, edges)
        except FatgraphError as exc:
            raise GraphFormatError(str(exc)) from None
        if trivalent and not g.is_trivalent():
            bad = [v for v, ds in g.vertices.items() if len(ds) != 3]
            raise GraphFormatError(f"vertices {bad} are not trivalent")
        return g, gens


def surface_invariants(g: Fatgraph) -> SurfaceInvariants:
    """Genus and puncture count from face tracing and Euler characteristic."""
    if not g.is_connected():
        raise FatgraphError("surface invariants need a connected graph")
    v = len(g.vertices)
    e = len(g.edges)
    f = len(g.faces())
    twice_genus = 2 - v + e - f
    if twice_genus % 2:
        raise FatgraphError("odd Euler characteristic defect; malformed map")
    inv = SurfaceInvariants(twice_genus // 2, f, v, e)
    if g.is_trivalent():
        gg, s = inv.genus, inv.punctures
        assert v == 2 * (2 * gg - 2 + s) and e == 6 * gg - 6 + 3 * s
    return inv


@dataclass(frozen=True)
class FlipFrame:
    """Labels of a Whitehead flip at edge ``edge``.

    ``edge`` runs from ``u`` (tail dart ``tail``) to ``v`` (head dart ``head``).
    Going counterclockwise after ``head`` at v one meets darts ``a`` then
    ``b``; after ``tail`` at u one meets ``c`` then ``d``.  a, b are read as
    edges leaving v, and c, d as edges entering u.  After the flip the new edge
    f runs from u' (around b, c) to v' (around a, d).
    """

    edge: int
    tail: int
    head: int
    u: int
    v: int
    a: int
    b: int
    c: int
    d: int

    def labels(self) -> dict[str, int]:
        return {"a": self.a, "b": self.b, "c": self.c, "d": self.d}


def identify_flip_frame(g: Fatgraph, e: int) -> FlipFrame:
    if e not in g.edges:
        raise FatgraphError(f"no edge {e}")
    if g.is_loop(e):
        raise FatgraphError(f"edge {e} is a loop; the flip is undefined")
    tail, head = sorted(g.edges[e])
    u, v = g.vertex_of(tail), g.vertex_of(head)
    if g.degree(u) != 3 or g.degree(v) != 3:
        raise FatgraphError(f"flip at edge {e} needs trivalent endpoints")
    a = g.rotate(head)
    b = g.rotate(a)
    c = g.rotate(tail)
    d = g.rotate(c)
    return FlipFrame(e, tail, head, u, v, a, b, c, d)


def _lowest_first(darts: tuple[int, ...]) -> tuple[int, ...]:
    i = darts.index(min(darts))
    return darts[i:] + darts[:i]


def whitehead_flip(g: Fatgraph, e: int) -> tuple[Fatgraph, dict]:
    """Flip at edge e; returns the new graph and a correspondence record.

    Darts, edge ids and vertex ids are kept: the flipped edge keeps its id and
    darts, u keeps its id as u' and v as v'.  The record maps each old edge id
    to its new id and carries the frame.
    """
    fr = identify_flip_frame(g, e)
    vertices = dict(g.vertices)
    vertices[fr.u] = _lowest_first((fr.tail, fr.b, fr.c))
    vertices[fr.v] = _lowest_first((fr.head, fr.d, fr.a))
    new = Fatgraph(vertices, g.edges)
    correspondence = {
        "edges": {x: x for x in g.edges},
        "frame": fr,
        "labels": {
            "a": g.edge_of(fr.a),
            "b": g.edge_of(fr.b),
            "c": g.edge_of(fr.c),
            "d": g.edge_of(fr.d),
            "e": e,
            "f": e,
        },
    }
    return new, correspondence


def find_isomorphism(
    g1: Fatgraph, g2: Fatgraph, fixed: Mapping[int, int] | None = None
) -> dict[int, int] | None:
    """Dart bijection intertwining pairing and rotation (cilia ignored).

    If ``fixed`` is given the bijection must extend it.  Returns None when no
    isomorphism exists.
    """
    if len(g1.darts) != len(g2.darts) or len(g1.vertices) != len(g2.vertices):
        return None
    fixed = dict(fixed or {})
    d0 = g1.darts[0]
    candidates = [fixed[d0]] if d0 in fixed else g2.darts
    for target in candidates:
        phi = _propagate(g1, g2, d0, target)
        if phi is not None and all(phi.get(k) == val for k, val in fixed.items()):
            return phi
    return None


def _propagate(g1: Fatgraph, g2: Fatgraph, d0: int, t0: int) -> dict[int, int] | None:
    phi = {d0: t0}
    used = {t0}
    stack = [d0]
    while stack:
        d = stack.pop()
        t = phi[d]
        for step1, step2 in ((g1.pair, g2.pair), (g1.rotate, g2.rotate)):
            nd, nt = step1(d), step2(t)
            if nd in phi:
                if phi[nd] != nt:
                    return None
            else:
                if nt in used:
                    return None
                phi[nd] = nt
                used.add(nt)
                stack.append(nd)
    if len(phi) != len(g1.darts):
        return None
    return phi


# -- standard small graphs -------------------------------------------------------

def theta_graph(genus: int) -> Fatgraph:
    """Two trivalent vertices joined by three edges: genus 1 (s=1) or genus 0 (s=3)."""
    edges = {0: (0, 1), 1: (2, 3), 2: (4, 5)}
    if genus == 1:
        return Fatgraph({0: (0, 2, 4), 1: (1, 3, 5)}, edges)
    if genus == 0:
        return Fatgraph({0: (0, 2, 4), 1: (1, 5, 3)}, edges)
    raise FatgraphError("theta graphs exist for genus 0 and 1 only")


def dumbbell_graph() -> Fatgraph:
    """Two loops joined by a bridge (genus 0, three punctures)."""
    return Fatgraph({0: (0, 2, 3), 1: (1, 4, 5)}, {0: (0, 1), 1: (2, 3), 2: (4, 5)})


def k4_graph(genus: int = 0) -> Fatgraph:
    """Complete graph on four vertices: planar (s=4) or genus 1 (s=2)."""
    edges = {0: (0, 1), 1: (2, 3), 2: (4, 5), 3: (6, 7), 4: (8, 9), 5: (10, 11)}
    # vertex 0: edges 0,1,2 ; vertex 1: 0,3,4 ; vertex 2: 1,3,5 ; vertex 3: 2,4,5
    if genus == 0:
        vertices = {0: (0, 2, 4), 1: (1, 8, 6), 2: (3, 7, 10), 3: (5, 11, 9)}
    elif genus == 1:
        vertices = {0: (0, 2, 4), 1: (1, 6, 8), 2: (3, 7, 10), 3: (5, 11, 9)}
    else:
        raise FatgraphError("k4 fatgraphs here have genus 0 or 1")
    return Fatgraph(vertices, edges)


def standard_graph(name: str) -> Fatgraph:
    table = {
        "theta1": lambda: theta_graph(1),
        "theta0": lambda: theta_graph(0),
        "dumbbell": dumbbell_graph,
        "k4": lambda: k4_graph(0),
        "k4g1": lambda: k4_graph(1),
    }
    try:
        return table[name]()
    except KeyError:
        raise FatgraphError(f"unknown standard graph {name!r}; choose from {sorted(table)}") from None

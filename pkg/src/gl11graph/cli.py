"""Command-line front end: ``gl11graph <command> ...``.

Graph files hold ``generators N``, ``v <id>: d,d,d`` and ``e <id>: d-d``
records; connection files hold an optional ``graph <path>`` line (relative to
the connection file), ``generators N`` and one ``g`` record per edge.  All
numbers are printed as exact rationals.
"""
from __future__ import annotations

import argparse
import os
import sys
from typing import Sequence

from .connection import (
    ConnectionError,
    face_path,
    flip_general,
    flip_minimal,
    flip_monodromy_equations,
    holonomy,
    holonomy_coords,
    parse_connection,
)
from .coords import EdgeCoords
from .fatgraph import Fatgraph, FatgraphError, surface_invariants
from .normalize import is_gauge_equivalent, normal_form, residual_dimensions
from .observables import Observable, sym
from .poisson import bracket, evaluate, holonomy_observable
from .selftest import run_selftest
from .supermatrix import Supermatrix, identity, supertrace

__all__ = ["main", "build_parser"]


class CliError(Exception):
    pass


# -- file helpers -------------------------------------------------------------------------


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None


def load_graph(path: str) -> tuple[Fatgraph, int | None]:
    return Fatgraph.from_text(_read(path))


def load_connection(path: str, graph_path: str | None = None):
    """Returns ``(connection, graph_path)``."""
    text = _read(path)
    _, ref, _ = parse_connection(text)
    if graph_path is None:
        if ref is None:
            raise CliError(f"{path} names no graph; pass --graph")
        graph_path = ref if os.path.isabs(ref) else os.path.join(os.path.dirname(path), ref)
    graph, _ = load_graph(graph_path)
    conn, _ = parse_connection(text, graph)
    return conn, graph_path


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _format_gauge(h) -> str:
    if isinstance(h, EdgeCoords):
        return f"a={h.a.to_text()} b={h.b.to_text()} alpha={h.alpha.to_text()} beta={h.beta.to_text()}"
    return f"m11={h.a.to_text()} m12={h.alpha.to_text()} m21={h.beta.to_text()} m22={h.b.to_text()}"


def _format_matrix(m: Supermatrix) -> list[str]:
    return [
        f"m11 {m.a.to_text()}",
        f"m12 {m.alpha.to_text()}",
        f"m21 {m.beta.to_text()}",
        f"m22 {m.b.to_text()}",
    ]


def _parse_darts(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise CliError(f"bad dart list {text!r}") from None


def parse_cycle(spec: str, graph: Fatgraph) -> list[int]:
    """``d,d,...`` or ``face:<dart>``; an empty string is the trivial cycle."""
    if spec.startswith("face:"):
        darts = _parse_darts(spec[5:])
        if len(darts) != 1:
            raise CliError("face spec takes one dart")
        return face_path(graph, darts[0])
    return _parse_darts(spec[6:] if spec.startswith("cycle:") else spec)


def parse_observable(spec: str, graph: Fatgraph) -> Observable:
    """``face:<dart>``, ``cycle:d,d,...`` (supertrace holonomy) or ``<kind>:<edge>``."""
    head, _, rest = spec.partition(":")
    if head in ("face", "cycle"):
        return holonomy_observable(graph, parse_cycle(spec, graph))
    if head in ("a", "b", "alpha", "beta") and rest.strip().lstrip("-").isdigit():
        e = int(rest)
        if e not in graph.edges:
            raise CliError(f"no edge {e}")
        return sym(head, e)
    raise CliError(f"bad observable spec {spec!r}")


# -- commands -----------------------------------------------------------------------------


def cmd_info(args) -> int:
    graph, gens = load_graph(args.graph)
    inv = surface_invariants(graph)
    dims = residual_dimensions(graph)
    print(f"V {inv.vertex_count}")
    print(f"E {inv.edge_count}")
    print(f"genus {inv.genus}")
    print(f"punctures {inv.punctures}")
    if gens is not None:
        print(f"generators {gens}")
    print(f"chart {dims.chart}|{dims.chart}")
    print(f"moduli {dims.moduli}|{dims.moduli}")
    print(f"fiber {dims.fiber}|{dims.fiber}")
    return 0


def cmd_flip(args) -> int:
    graph, _ = load_graph(args.graph)
    conn, _ = parse_connection(_read(args.connection), graph)
    table = []
    status = 0
    for step, e in enumerate(args.edges, 1):
        if e not in conn.graph.edges:
            raise CliError(f"step {step}: no edge {e} in the current graph")
        before = conn
        general, record = flip_general(conn, e)
        conn = general if args.mode == "general" else flip_minimal(conn, e)[0]
        labels = " ".join(f"{k}={v}" for k, v in record["labels"].items())
        mapping = " ".join(f"{k}->{v}" for k, v in sorted(record["edges"].items()))
        table.append(f"step {step} flip {e}: {labels}")
        table.append(f"step {step} edges: {mapping}")
        if args.verify:
            if args.mode == "general":
                for q in flip_monodromy_equations(before, general, e):
                    lit = "holds" if q["literal"] else "fails"
                    tr = "holds" if q["transported"] else "fails"
                    table.append(f"step {step} monodromy {q['equation']}: literal {lit}, transported {tr}")
                    if not q["literal"]:
                        status = 1
            else:
                res = is_gauge_equivalent(conn, general)
                table.append(f"step {step} minimal ~ general: {'yes' if res else 'no'} ({res.method})")
                if not res:
                    status = 1
    if args.out:
        graph_file = args.out + ".graph"
        _write(graph_file, conn.graph.to_text(conn.n))
        _write(args.out + ".conn", conn.to_text(os.path.basename(graph_file)))
        print("\n".join(table))
    else:
        sys.stdout.write(conn.graph.to_text(conn.n))
        sys.stdout.write(conn.to_text())
        sys.stderr.write("\n".join(table) + "\n")
    return status


def cmd_normalize(args) -> int:
    conn, graph_path = load_connection(args.connection, args.graph)
    nf = normal_form(conn, args.base_vertex)
    lines = [f"# canonical {'yes' if nf.canonical else 'no'}"]
    for v in sorted(nf.gauge):
        lines.append(f"# gauge {v} {_format_gauge(nf.gauge[v])}")
    ref = graph_path
    if args.out:
        ref = os.path.relpath(graph_path, os.path.dirname(os.path.abspath(args.out)))
    _write(args.out, "\n".join(lines) + "\n" + nf.connection.to_text(ref))
    return 0


def cmd_equiv(args) -> int:
    c1, _ = load_connection(args.first, args.graph)
    c2, _ = load_connection(args.second, args.graph)
    res = is_gauge_equivalent(c1, c2, args.base_vertex)
    if not res:
        print(f"not equivalent ({res.method})")
        return 1
    print(f"equivalent ({res.method})")
    for v in sorted(res.witness):
        print(f"h {v} {_format_gauge(res.witness[v])}")
    return 0


def cmd_holonomy(args) -> int:
    conn, _ = load_connection(args.connection, args.graph)
    path = parse_cycle(args.cycle, conn.graph)
    m = holonomy(conn, path) if path else identity(conn.n)
    for line in _format_matrix(m):
        print(line)
    print(f"supertrace {supertrace(m).to_text()}")
    if path:
        h = holonomy_coords(conn, path)
        print(f"coords a={h.a.to_text()} b={h.b.to_text()} alpha={h.alpha.to_text()} beta={h.beta.to_text()}")
    return 0


def cmd_bracket(args) -> int:
    conn, _ = load_connection(args.connection, args.graph)
    f = parse_observable(args.f, conn.graph)
    g = parse_observable(args.g, conn.graph)
    result = bracket(f, g, conn.graph)
    print(f"bracket {result}")
    print(f"value {evaluate(result, conn).to_text()}")
    return 0


def cmd_selftest(args) -> int:
    return 0 if run_selftest(args.seed) else 1


# -- parser -------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gl11graph", description="Flat GL(1|1) connections on fatgraphs.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("info", help="surface invariants and chart dimensions")
    s.add_argument("graph")
    s.set_defaults(func=cmd_info)

    s = sub.add_parser("flip", help="apply Whitehead flips to a graph and connection")
    s.add_argument("graph")
    s.add_argument("connection")
    s.add_argument("edges", nargs="+", type=int)
    s.add_argument("--mode", choices=("general", "minimal"), default="minimal")
    s.add_argument("--verify", action="store_true")
    s.add_argument("--out", help="output prefix; writes PREFIX.graph and PREFIX.conn")
    s.set_defaults(func=cmd_flip)

    for name, func, helptext in (
        ("normalize", cmd_normalize, "gauge-fix a connection"),
        ("holonomy", cmd_holonomy, "holonomy along a dart path"),
        ("bracket", cmd_bracket, "Poisson bracket of two observables"),
    ):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("connection")
        s.add_argument("--graph", help="graph file (overrides the connection's graph line)")
        if name == "normalize":
            s.add_argument("--base-vertex", type=int)
            s.add_argument("--out")
        elif name == "holonomy":
            s.add_argument("cycle", help="d,d,... or face:<dart>; empty for the trivial path")
        else:
            s.add_argument("f", help="face:<dart>, cycle:d,d,... or <kind>:<edge>")
            s.add_argument("g")
        s.set_defaults(func=func)

    s = sub.add_parser("equiv", help="decide gauge equivalence")
    s.add_argument("first")
    s.add_argument("second")
    s.add_argument("--graph")
    s.add_argument("--base-vertex", type=int)
    s.set_defaults(func=cmd_equiv)

    s = sub.add_parser("selftest", help="run the seeded invariant suite")
    s.add_argument("--seed", type=int, default=1)
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"gl11graph: {exc}", file=sys.stderr)
    except (ValueError, FatgraphError, ConnectionError) as exc:
        module = type(exc).__module__.rsplit(".", 1)[-1]
        print(f"gl11graph: {module}: {exc}", file=sys.stderr)
    return 2


if __name__ == "__main__":
    sys.exit(main())

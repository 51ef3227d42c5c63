from __future__ import annotations

import random
import subprocess
import sys

import pytest

from gl11graph.cli import load_connection, load_graph, main
from gl11graph.connection import gauge_transform, identity_connection, parse_connection
from gl11graph.fatgraph import identify_flip_frame, standard_graph
from gl11graph.normalize import constraints_hold
from gl11graph.sampling import random_connection, random_gauge

N = 4


@pytest.fixture
def files(tmp_path):
    def write(name, graph_name="theta1", conn=None):
        g = standard_graph(graph_name)
        (tmp_path / f"{graph_name}.graph").write_text(g.to_text(N))
        if conn is not None:
            (tmp_path / name).write_text(conn.to_text(f"{graph_name}.graph"))
        return tmp_path / f"{graph_name}.graph", tmp_path / name

    return write


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_info(capsys, files):
    graph, _ = files("x")
    code, out, _ = run(capsys, "info", graph)
    assert code == 0
    for line in ("V 2", "E 3", "genus 1", "punctures 1", "chart 6|6", "moduli 4|4", "fiber 2|2"):
        assert line in out.splitlines()


def test_info_rejects_malformed_pairing(capsys, tmp_path):
    path = tmp_path / "bad.graph"
    path.write_text("v 0: 0,2,4\nv 1: 1,3,5\ne 0: 0-1\ne 1: 2-3\ne 2: 4-4\n")
    code, _, err = run(capsys, "info", path)
    assert code == 2 and "dart 4" in err


def test_file_round_trip(files, tmp_path):
    c = random_connection(standard_graph("theta0"), random.Random(1), n=N)
    graph, conn = files("c.conn", "theta0", c)
    loaded, _ = load_connection(str(conn))
    assert loaded == c
    again = tmp_path / "again.conn"
    again.write_text(loaded.to_text("theta0.graph"))
    assert load_connection(str(again))[0] == c
    assert load_graph(str(graph))[0] == standard_graph("theta0")


def test_flip_identity_stays_identity(capsys, files, tmp_path):
    graph, conn = files("id.conn", "k4", identity_connection(standard_graph("k4"), N))
    code, out, _ = run(capsys, "flip", graph, conn, 0, 3, "--out", tmp_path / "out")
    assert code == 0 and "step 2 flip 3" in out
    new, _ = load_connection(str(tmp_path / "out.conn"))
    assert new == identity_connection(new.graph, N)


def test_flip_fermion_free_shows_product(capsys, files, tmp_path):
    g = standard_graph("k4")
    c = random_connection(g, random.Random(2), n=N, fermions=False)
    graph, conn = files("c.conn", "k4", c)
    code, _, _ = run(capsys, "flip", graph, conn, 0, "--verify", "--out", tmp_path / "f")
    assert code == 0
    new, _ = load_connection(str(tmp_path / "f.conn"))
    fr = identify_flip_frame(g, 0)
    e_b = g.edge_of(fr.b)
    a5 = c.oriented(0, fr.head).a
    assert new.oriented(e_b, g.pair(fr.b)).a == c.oriented(e_b, g.pair(fr.b)).a * a5


def test_flip_verify_general_reports_literal_failures(capsys, files, tmp_path):
    c = random_connection(standard_graph("theta1"), random.Random(3), n=N, max_degree=2)
    graph, conn = files("c.conn", "theta1", c)
    code, out, _ = run(capsys, "flip", graph, conn, 0, "--mode", "general", "--verify", "--out", tmp_path / "g")
    assert "transported holds" in out
    assert code == (1 if "literal fails" in out else 0)


def test_normalize_and_equiv(capsys, files, tmp_path):
    rng = random.Random(4)
    g = standard_graph("theta1")
    c = random_connection(g, rng, n=N, max_degree=2)
    moved = gauge_transform(c, random_gauge(g, rng, n=N, max_degree=2))
    graph, conn = files("c.conn", "theta1", c)
    _, moved_file = files("m.conn", "theta1", moved)
    code, _, _ = run(capsys, "normalize", conn, "--out", tmp_path / "n.conn")
    assert code == 0
    text = (tmp_path / "n.conn").read_text()
    assert "# canonical yes" in text
    assert constraints_hold(parse_connection(text, g)[0])
    code, out, _ = run(capsys, "equiv", conn, moved_file)
    assert code == 0 and out.startswith("equivalent") and "h 0" in out
    _, other = files("o.conn", "theta1", random_connection(g, rng, n=N, max_degree=2))
    code, out, _ = run(capsys, "equiv", conn, other)
    assert code == 1 and out.startswith("not equivalent")


def test_holonomy_and_bracket(capsys, files):
    c = random_connection(standard_graph("theta1"), random.Random(5), n=N)
    _, conn = files("c.conn", "theta1", c)
    code, out, _ = run(capsys, "holonomy", conn, "")
    assert code == 0
    assert "m11 [:1]" in out and "m22 [:1]" in out and "supertrace []" in out
    code, out, _ = run(capsys, "holonomy", conn, "face:0")
    assert code == 0 and "coords a=" in out
    code, out, _ = run(capsys, "bracket", conn, "cycle:0,3", "cycle:0,5")
    assert code == 0 and out.startswith("bracket ") and "value [" in out
    code, _, err = run(capsys, "bracket", conn, "nonsense", "a:0")
    assert code == 2 and "bad observable" in err


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "info", tmp_path / "absent.graph")
    assert code == 2 and "cannot read" in err


def test_selftest_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "gl11graph", "selftest", "--seed", "1"], capture_output=True, text=True, timeout=600
    )
    assert proc.returncode == 0, proc.stdout + proc.stderr
    lines = proc.stdout.splitlines()
    assert len(lines) == 10 and all(line.startswith("PASS") for line in lines)

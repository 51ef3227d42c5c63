"""Seeded invariant suite behind ``gl11graph selftest``.

Each check returns ``(ok, detail)``; sizes are kept small so the whole run
stays well under two minutes.
"""
from __future__ import annotations

import random
import time
from fractions import Fraction
from typing import Callable

from .connection import (
    boundary_supertraces,
    double_flip_pullback,
    flip_general,
    flip_minimal,
    flip_minimal_closed_form,
    flip_monodromy_equations,
    gauge_transform,
)
from .coords import cinv, compose, from_matrix, to_matrix
from .fatgraph import standard_graph
from .grassmann import GrassmannNumber
from .normalize import constraints_hold, is_gauge_equivalent, normal_form, residual_dimensions
from .observables import Observable, sym
from .poisson import (
    BASIS,
    bracket,
    casimir,
    cybe_residual,
    edge_vector_fields,
    hatted_vector_fields,
    holonomy_observable,
    simplified_hatted_vector_fields,
    standard_r,
    structure_bracket,
    symmetric_part,
)
from .sampling import random_connection, random_coords, random_gauge, random_grassmann
from .supermatrix import gaussian_decompose, gaussian_recompose, generators, lie_bracket, sinv, smul

__all__ = ["CHECKS", "run_selftest"]

N = 6


def _homogeneous(rng: random.Random) -> GrassmannNumber:
    return random_grassmann(rng, N, rng.randint(0, 1), max_degree=4, density=0.6)


def check_grassmann(rng: random.Random):
    for _ in range(300):
        x, y, z = (_homogeneous(rng) for _ in range(3))
        if (x * y) * z != x * (y * z):
            return False, "associativity"
        sign = -1 if (x.parity == "odd" and y.parity == "odd") else 1
        if x * y != (y * x).scale(sign):
            return False, "supercommutativity"
        s = (x + y).soul
        if s ** (N + 1) != GrassmannNumber.zero(N):
            return False, "soul nilpotency"
        q = Fraction(rng.randint(1, 5), rng.randint(1, 5))
        u = random_grassmann(rng, N, 0, max_degree=4) + q * q
        if u * u.inverse() != GrassmannNumber.one(N):
            return False, "inverse"
        if u.sqrt() ** 2 != u:
            return False, "square root"
    return True, "300 triples"


def check_gl11_relations(rng: random.Random):
    e = generators(N)
    for x in BASIS:
        for y in BASIS:
            got = lie_bracket(e[x], e[y])
            want = None
            for k, q in structure_bracket(x, y).items():
                term = e[k]
                want = _mat_scale(term, q) if want is None else _mat_add(want, _mat_scale(term, q))
            if want is None:
                if any(not v.is_zero() for v in (got.a, got.alpha, got.beta, got.b)):
                    return False, f"[{x},{y}] should vanish"
            elif (got.a, got.alpha, got.beta, got.b) != (want.a, want.alpha, want.beta, want.b):
                return False, f"[{x},{y}]"
    return True, "16 pairs"


def _mat_scale(m, q):
    return type(m)(m.a.scale(q), m.alpha.scale(q), m.beta.scale(q), m.b.scale(q), m.parity)


def _mat_add(m, k):
    return type(m)(m.a + k.a, m.alpha + k.alpha, m.beta + k.beta, m.b + k.b, m.parity)


def check_gauss_and_coords(rng: random.Random):
    for _ in range(60):
        x = random_coords(rng, N)
        y = random_coords(rng, N)
        mx, my = to_matrix(x), to_matrix(y)
        if gaussian_recompose(*gaussian_decompose(mx)) != mx:
            return False, "gaussian round trip"
        if to_matrix(compose(x, y)) != smul(mx, my):
            return False, "compose vs smul"
        if to_matrix(cinv(x)) != sinv(mx):
            return False, "cinv vs sinv"
        if from_matrix(mx) != x:
            return False, "from_matrix round trip"
    return True, "60 pairs"


def check_flip_monodromy(rng: random.Random):
    literal_k4 = True
    for name in ("k4", "theta1", "theta0"):
        g = standard_graph(name)
        for _ in range(3):
            c = random_connection(g, rng, n=N, max_degree=2)
            e = rng.choice(sorted(g.edges))
            new, _ = flip_general(c, e)
            eqs = flip_monodromy_equations(c, new, e)
            if not all(q["transported"] for q in eqs):
                return False, f"transported monodromy on {name}"
            if name == "k4" and not all(q["literal"] for q in eqs):
                literal_k4 = False
            if sorted(map(str, boundary_supertraces(c))) != sorted(map(str, boundary_supertraces(new))):
                return False, f"boundary supertraces on {name}"
    if not literal_k4:
        return False, "literal monodromy on k4"
    return True, "k4 literal, 2-vertex graphs transported"


def check_minimal_flip(rng: random.Random):
    g = standard_graph("k4")
    for _ in range(3):
        c = random_connection(g, rng, n=N, max_degree=2)
        e = rng.choice(sorted(g.edges))
        if flip_minimal(c, e)[0] != flip_minimal_closed_form(c, e)[0]:
            return False, "closed form on k4"
    g = standard_graph("theta1")
    c = random_connection(g, rng, n=N, max_degree=2)
    e = rng.choice(sorted(g.edges))
    if not is_gauge_equivalent(flip_minimal(c, e)[0], flip_general(c, e)[0]):
        return False, "minimal vs general on theta1"
    if not is_gauge_equivalent(double_flip_pullback(c, e), c):
        return False, "double flip on theta1"
    return True, "closed form, gauge equivalence, double flip"


def check_normalization(rng: random.Random):
    for name in ("theta1", "theta0"):
        g = standard_graph(name)
        c = random_connection(g, rng, n=N, max_degree=2)
        h = random_gauge(g, rng, n=N, max_degree=2)
        n1 = normal_form(c)
        if not constraints_hold(n1.connection):
            return False, f"constraints on {name}"
        if normal_form(n1.connection).connection != n1.connection:
            return False, f"idempotence on {name}"
        if normal_form(gauge_transform(c, h)).connection != n1.connection:
            return False, f"orbit constancy on {name}"
        dims = residual_dimensions(g)
        if dims.moduli != 4:
            return False, f"residual count {dims.moduli} on {name}"
    return True, "theta1, theta0"


def check_r_matrix(rng: random.Random):
    r = standard_r()
    if any(cybe_residual(r).values()):
        return False, "CYBE residual"
    if symmetric_part(r) != casimir():
        return False, "symmetric part"
    return True, "64 entries"


def check_vector_fields(rng: random.Random):
    for inbound in (True, False):
        x = edge_vector_fields(0, inbound)
        symbols = [sym(k, 0) for k in ("a", "b", "alpha", "beta")]
        for i in BASIS:
            for j in BASIS:
                sign = -1 if (x[i].parity and x[j].parity) else 1
                for s in symbols:
                    lhs = x[i](x[j](s)) - x[j](x[i](s)).scale(sign)
                    rhs = Observable()
                    for k, q in structure_bracket(i, j).items():
                        rhs = rhs + x[k](s).scale(q)
                    if lhs != -rhs:
                        return False, f"[X_{i}, X_{j}]"
    hat, shown = hatted_vector_fields(0), simplified_hatted_vector_fields(0)
    for k in BASIS:
        for s in ("a_hat", "b_hat", "alpha_hat", "beta_hat"):
            if hat[k](sym(s, 0)) != shown[k](sym(s, 0)):
                return False, f"hatted X_{k}"
    return True, "commutators and hatted chart"


def _random_observable(rng: random.Random, g, parity: int) -> Observable:
    f = Observable.constant(rng.choice((1, 2, -1, Fraction(1, 2))))
    for _ in range(rng.randint(1, 2)):
        f = f * sym(rng.choice(("a", "b")), rng.choice(sorted(g.edges))) ** rng.choice((1, -1, 2))
    odd = [(k, e) for e in sorted(g.edges) for k in ("alpha", "beta")]
    for s in rng.sample(odd, parity):
        f = f * Observable.symbol(s)
    return f


def check_poisson(rng: random.Random):
    g = standard_graph("theta1")
    for _ in range(4):
        f, h, k = (_random_observable(rng, g, rng.randint(0, 1)) for _ in range(3))
        pf, ph, pk = f.parity, h.parity, k.parity
        fh = bracket(f, h, g)
        if fh != -bracket(h, f, g).scale((-1) ** (pf * ph)):
            return False, "antisymmetry"
        if bracket(f, h * k, g) != fh * k + (h * bracket(f, k, g)).scale((-1) ** (pf * ph)):
            return False, "Leibniz"
        jac = (
            bracket(f, bracket(h, k, g), g).scale((-1) ** (pf * pk))
            + bracket(h, bracket(k, f, g), g).scale((-1) ** (ph * pf))
            + bracket(k, fh, g).scale((-1) ** (pk * ph))
        )
        if not jac.is_zero():
            return False, "Jacobi"
    return True, "4 triples on theta1"


def check_reduction(rng: random.Random):
    g = standard_graph("theta1")
    f1 = holonomy_observable(g, [0, 3])
    f2 = holonomy_observable(g, [0, 5])
    base = bracket(f1, f2, g)
    other = {v: ds[1] for v, ds in g.vertices.items()}
    if bracket(f1, f2, g, ciliation=other) != base:
        return False, "ciliation dependence"
    if bracket(f1, f2, g, r=casimir()) != base:
        return False, "r_a dependence"
    return True, "cycle observables on theta1"


CHECKS: list[tuple[str, Callable]] = [
    ("grassmann", check_grassmann),
    ("gl11-relations", check_gl11_relations),
    ("gauss-and-coords", check_gauss_and_coords),
    ("flip-monodromy", check_flip_monodromy),
    ("minimal-flip", check_minimal_flip),
    ("normalization", check_normalization),
    ("r-matrix", check_r_matrix),
    ("vector-fields", check_vector_fields),
    ("poisson", check_poisson),
    ("reduction", check_reduction),
]


def run_selftest(seed: int = 1, out=print) -> bool:
    all_ok = True
    for name, fn in CHECKS:
        rng = random.Random(f"{seed}:{name}")
        t0 = time.perf_counter()
        try:
            ok, detail = fn(rng)
        except Exception as exc:  # report and keep going
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out(f"{'PASS' if ok else 'FAIL'} {name} ({detail}) {time.perf_counter() - t0:.1f}s")
        all_ok &= ok
    return all_ok

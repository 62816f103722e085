"""The acceptance suite, shared by the test-suite and ``jacstrata selftest``.

Each check returns a :class:`CheckResult`; ``run_acceptance`` runs them all.
"""

from __future__ import annotations

import json
import os
import subprocess
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable, List

from . import kernels
from .assembly import (
    chi_compactified,
    chi_M0bar,
    chi_open_genus0,
    expected_dimension,
    is_palindromic,
    orbifold_euler,
    wood_rhs,
)
from .bijections import (
    DegreeWindow,
    build_bijection,
    degree_admissible,
    verify_combinatorial_claim,
)
from .equivariant import character_at, invariants
from .graphs import automorphism_group, enumerate_stable_graphs, pair_classes
from .interior import configuration_class, genus0_class, genus1_class, twisted_m0n_count
from .motives import L, ONE, MotiveClass, e_polynomial
from .picard import Multigraph, pic_group


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number}: {self.name} ({self.detail}; {self.seconds:.1f}s)"


# -- 1: spanning trees ---------------------------------------------------------

def _multigraph_key(n, edges):
    adj = [[0] * n for _ in range(n)]
    for u, w in edges:
        adj[u][w] += 1
        if u != w:
            adj[w][u] += 1
    deg = [sum(adj[v]) + adj[v][v] for v in range(n)]
    labels = sorted(set((deg[v], adj[v][v]) for v in range(n)))
    cells = [[v for v in range(n) if (deg[v], adj[v][v]) == lab] for lab in labels]
    _, code = kernels.canonical_order(n, cells, adj)
    return (n, tuple(labels), tuple(len(c) for c in cells), code)


def connected_multigraphs(max_edges: int) -> List[Multigraph]:
    """All connected multigraphs (loops allowed) with at most max_edges edges, up to iso."""
    level = {_multigraph_key(1, ()): (1, ())}
    out = list(level.values())
    for _ in range(max_edges):
        nxt = {}
        for n, edges in level.values():
            options = [(u, w) for u in range(n) for w in range(u, n)] + [(u, n) for u in range(n)]
            for u, w in options:
                m = n + 1 if w == n else n
                new = tuple(sorted(edges + ((u, w),)))
                key = _multigraph_key(m, new)
                if key not in nxt:
                    nxt[key] = (m, new)
        level = nxt
        out.extend(level.values())
    return [Multigraph(n, edges) for n, edges in out]


def brute_force_spanning_trees(mg: Multigraph) -> int:
    n = mg.num_vertices
    proper = [e for e in mg.edges if e[0] != e[1]]
    count = 0
    for subset in combinations(range(len(proper)), n - 1):
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                x = parent[x]
            return x

        ok = True
        for i in subset:
            a, b = find(proper[i][0]), find(proper[i][1])
            if a == b:
                ok = False
                break
            parent[a] = b
        count += ok
    return count


def check_kirchhoff() -> CheckResult:
    t = time.time()
    graphs = connected_multigraphs(5)
    bad = [mg for mg in graphs if pic_group(mg).order != brute_force_spanning_trees(mg)]
    return CheckResult(1, "Kirchhoff oracle", not bad, f"{len(graphs)} multigraphs, {len(bad)} mismatches", time.time() - t)


# -- 2: degree bijections ---------------------------------------------------------

def bijection_catalog():
    for g in (0, 1, 2):
        for n in range(4):
            if 2 * g - 2 + n <= 0:
                continue
            colorings = {(1,) * n, (n,) if n else ()}
            if n == 3:
                colorings.add((2, 1))
            for colors in sorted(colorings):
                yield g, colors


def check_degree_bijections() -> CheckResult:
    t = time.time()
    checked, failures = 0, []
    for g, colors in bijection_catalog():
        degrees = DegreeWindow(g, colors).degrees(-6, 6)
        for graph in enumerate_stable_graphs(g, colors):
            if graph.num_edges > 3:
                continue
            perms = [a.vertex_perm for a in automorphism_group(graph)]
            for d1 in degrees:
                for d2 in degrees:
                    rep = build_bijection(graph, colors, d1, d2).check(perms)
                    checked += 1
                    if not (rep["bijective"] and rep["equivariant"]):
                        failures.append((graph.dumps(), d1, d2))
    return CheckResult(2, "equivariant degree bijections", not failures, f"{checked} bijections, {len(failures)} failures", time.time() - t)


# -- 3: combinatorial claim ---------------------------------------------------------

CLAIM_TYPES = [(1, (1,)), (1, (1, 1)), (1, (2,)), (2, ()), (2, (1,))]


def check_combinatorial_claim() -> CheckResult:
    t = time.time()
    checked, failures = 0, []
    for g, colors in CLAIM_TYPES:
        degrees = [d for d in range(-4, 5) if degree_admissible(g, colors, d)]
        for graph, sub, _ in pair_classes(g, colors):
            size = pic_group(sub.multigraph()).order
            for d in degrees:
                for dp in degrees:
                    rep = verify_combinatorial_claim(graph, sub, d, dp, colors)
                    checked += 1
                    if not (rep["bijective"] and rep["equivariant"] and rep["set_size"] == size):
                        failures.append((graph.dumps(), sorted(sub.edge_subset), d, dp))
    return CheckResult(3, "cut-graph bijections", not failures, f"{checked} pairs x degrees, {len(failures)} failures", time.time() - t)


# -- 4: type (1,1) -------------------------------------------------------------------

def check_type_11() -> CheckResult:
    t = time.time()
    expected = {(0, 0): 1, (1, 1): 2, (2, 2): 1}
    got = {d: chi_compactified(1, (1,), d).e_polynomial for d in range(6)}
    bad = [d for d, p in got.items() if p != expected]
    return CheckResult(4, "type (1,1) E-polynomial 1 + 2uv + (uv)^2", not bad, f"degrees 0..5, mismatches at {bad}", time.time() - t)


# -- 5: degree independence ----------------------------------------------------------

def _character_epolys(result):
    return {mu: e_polynomial(c) for mu, c in result.equivariant.character_table().items()}


def check_degree_independence() -> CheckResult:
    t = time.time()
    problems = []
    for g, n in [(1, 2), (1, 3)]:
        dim = expected_dimension(g, n)
        for colors in [(1,) * n, (n,)]:
            degrees = [d for d in range(5) if degree_admissible(g, colors, d)]
            results = [chi_compactified(g, colors, d) for d in degrees]
            if any(r.equivariant != results[0].equivariant for r in results):
                problems.append(f"{colors}: degree dependence")
            for r in results:
                for mu, poly in _character_epolys(r).items():
                    if not is_palindromic(poly, dim):
                        problems.append(f"{colors} d={r.degree} {mu}: not palindromic")
                for part, poly in (("total", r.e_polynomial), ("invariant", e_polynomial(invariants(r.equivariant)))):
                    if any(c < 0 for c in poly.values()) or any(i != j for i, j in poly):
                        problems.append(f"{colors} d={r.degree} {part}: negative or non-Tate coefficient")
    detail = "; ".join(problems[:3]) + (f"; and {len(problems) - 3} more" if len(problems) > 3 else "")
    return CheckResult(5, "degree independence, palindromic, nonnegative", not problems, detail or "types (1,2),(1,3), trivial and full symmetry", time.time() - t)


# -- 6: orbifold Euler characteristic ------------------------------------------------------

def check_orbifold_euler() -> CheckResult:
    t = time.time()
    cases = [(1, (1,)), (1, (1, 1)), (1, (1, 1, 1)), (2, ()), (2, (1,))]
    values = {c: orbifold_euler(*c) for c in cases}
    ok = all(values[(g, cols)] == wood_rhs(g, sum(cols)) for g, cols in cases)
    ok = ok and values[(1, (1,))] == Fraction(1, 2) and values[(1, (1, 1))] == 1 and values[(2, ())] == Fraction(1, 4)
    detail = ", ".join(f"({g},{sum(c)})={values[(g, c)]}" for g, c in cases)
    return CheckResult(6, "orbifold Euler characteristic matches the genus-0 formula", ok, detail, time.time() - t)


# -- 7: interior oracles --------------------------------------------------------------------

def check_interior() -> CheckResult:
    t = time.time()
    problems = []
    samples = [ONE - MotiveClass.V(1) + L, MotiveClass.V(2) + MotiveClass.S(12) + 2 * L]
    for x in samples:
        for n in range(7):
            falling = ONE
            for i in range(n):
                falling = falling * (x - i)
            if character_at(configuration_class(x, n), (1,) * n) != falling:
                problems.append(f"falling product n={n}")
    g4 = genus0_class(4)
    expected = {(4,): L, (3, 1): ONE + L, (2, 2): L - 2, (2, 1, 1): L, (1, 1, 1, 1): L - 2}
    if any(character_at(g4, mu) != v for mu, v in expected.items()):
        problems.append("genus 0, n=4 characters")
    from .equivariant import partitions

    for n in range(3, 9):
        for mu in partitions(n):
            try:
                twisted_m0n_count(mu)
            except ArithmeticError:
                problems.append(f"inexact division at {mu}")
    if character_at(genus1_class(1), (1,)) != L * L + L:
        problems.append("genus 1, n=1")
    return CheckResult(7, "interior oracles", not problems, "; ".join(problems) or "falling product n<=6, genus 0 n<=8, genus 1 n=1", time.time() - t)


# -- 8: genus-0 strata sum ------------------------------------------------------------------

def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def tree_sum_chi(m: int) -> int:
    """Euler characteristic of the compactified genus-0 moduli space by rooted-tree recursion."""
    memo = {}

    def rooted(k):
        # rooted stable trees with k labeled leaves below a root half-edge
        if k == 1:
            return 1
        if k in memo:
            return memo[k]
        total = 0
        for part in _set_partitions(list(range(k))):
            if len(part) < 2:
                continue
            term = chi_open_genus0(len(part) + 1)
            for block in part:
                term *= rooted(len(block))
            total += term
        memo[k] = total
        return total

    return rooted(m - 1)


def check_genus0_strata() -> CheckResult:
    t = time.time()
    engine = [chi_M0bar(m) for m in range(3, 7)]
    oracle = [tree_sum_chi(m) for m in range(3, 7)]
    ok = engine == oracle == [1, 2, 7, 34]
    return CheckResult(8, "genus-0 strata sum", ok, f"engine {engine}, oracle {oracle}", time.time() - t)


# -- 9: determinism and runtime ---------------------------------------------------------------

def _cli(args, env=None):
    cmd = [sys.executable, "-m", "jacstrata.cli", *args]
    proc = subprocess.run(cmd, capture_output=True, env=env)
    return proc.returncode, proc.stdout


def check_determinism() -> CheckResult:
    t = time.time()
    start = time.time()
    chi_compactified(1, (1, 1, 1), 0)
    single = time.time() - start
    env = dict(os.environ)
    env.pop("JACSTRATA_CACHE_DIR", None)
    base = ["chi", "1", "--lambda", "1,1,1", "--degree", "0", "--format", "json", "--no-cache"]
    outputs = [_cli(base + ["--jobs", j], env) for j in ("1", "1", "2")]
    same = all(o == outputs[0] for o in outputs) and outputs[0][0] == 0
    ok = same and single < 300
    return CheckResult(9, "determinism and runtime", ok, f"byte-identical={same}, single-thread {single:.2f}s", time.time() - t)


CHECKS: List[Callable[[], CheckResult]] = [
    check_kirchhoff,
    check_degree_bijections,
    check_combinatorial_claim,
    check_type_11,
    check_degree_independence,
    check_orbifold_euler,
    check_interior,
    check_genus0_strata,
    check_determinism,
]


def run_acceptance(skip=(), stream=None) -> List[CheckResult]:
    out = []
    for fn in CHECKS:
        if fn.__name__ in skip:
            continue
        try:
            res = fn()
        except Exception as exc:  # a crash is a failure of that criterion
            number = CHECKS.index(fn) + 1
            res = CheckResult(number, fn.__name__, False, f"{type(exc).__name__}: {exc}", 0.0)
        out.append(res)
        if stream is not None:
            print(res.line(), file=stream, flush=True)
    return out

"""Sum of boundary-stratum contributions.

Each stratum of the compactified universal Jacobian is indexed by a stable
graph G and a connected spanning subgraph G0.  It is a torus torsor (torus of
rank b1(G0)) over a product of vertex moduli J_{g(v), n(v)}, times the finite
set Pic^{d-e}(G0), divided by Aut(G, G0).  Its class is the group average of
the product of three traces.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Dict, List, Sequence, Tuple

from .bijections import InadmissibleDegree, degree_admissible, verify_combinatorial_claim
from .equivariant import (
    EquivariantClass,
    as_partition,
    character_at,
    dimension_of,
    invariants,
    schur_multiplicities,
    z_multi,
)
from .graphs import (
    AutGroup,
    GraphAutomorphism,
    SpanningSubgraph,
    StableGraph,
    automorphism_group,
    colors_to_legs,
    enumerate_stable_graphs,
    pair_classes,
)
from .interior import DEFAULT_PROVIDER, InteriorProvider, configuration_class, ELLIPTIC_CURVE
from .motives import ONE, ZERO, L, MotiveClass, adams, e_polynomial, integrate_M11, to_json
from .picard import fixed_class_count, pic_group

# names of deliberately broken code paths, used by the self-test to prove it
# can detect a fault
MUTATIONS: set = set()


class IntegralityError(AssertionError):
    """A group average failed to clear its denominator."""


# -- torus trace ----------------------------------------------------------------

def _cycle_basis(graph: StableGraph, sub: frozenset):
    """Chords of a spanning tree of G0, each with its signed edge vector."""
    parent = list(range(graph.num_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    tree, chords = [], []
    for e in sorted(sub):
        u, w = graph.edge_vertices(e)
        ru, rw = find(u), find(w)
        if ru == rw:
            chords.append(e)
        else:
            parent[ru] = rw
            tree.append(e)
    # tree adjacency for path finding
    adj: Dict[int, List[Tuple[int, int, int]]] = {v: [] for v in range(graph.num_vertices)}
    for e in tree:
        u, w = graph.edge_vertices(e)
        adj[u].append((w, e, 1))
        adj[w].append((u, e, -1))

    def path(src, dst):
        # signed edge vector of the tree path src -> dst
        stack = [(src, None, {})]
        seen = {src}
        while stack:
            v, _, acc = stack.pop()
            if v == dst:
                return acc
            for w, e, s in adj[v]:
                if w not in seen:
                    seen.add(w)
                    nxt = dict(acc)
                    nxt[e] = s
                    stack.append((w, e, nxt))
        raise AssertionError("spanning tree is disconnected")

    cycles = []
    for c in chords:
        u, w = graph.edge_vertices(c)
        vec = path(w, u)
        vec[c] = vec.get(c, 0) + 1
        cycles.append(vec)
    return chords, cycles


def homology_matrix(graph: StableGraph, sub, phi: GraphAutomorphism) -> List[List[int]]:
    """Matrix of phi on H_1(G0) in the chord basis (columns are images)."""
    sub = frozenset(sub)
    chords, cycles = _cycle_basis(graph, sub)
    index = {c: i for i, c in enumerate(chords)}
    b = len(chords)
    A = [[0] * b for _ in range(b)]
    for j, vec in enumerate(cycles):
        for e, coeff in vec.items():
            target, sign = phi.edge_map[e]
            if target not in sub:
                raise ValueError("automorphism does not preserve the subgraph")
            if target in index:
                A[index[target]][j] += coeff * sign
    return A


def _elementary_from_traces(A: List[List[int]]) -> List[int]:
    """e_0..e_b of the eigenvalues of A, by Newton's identities on tr(A^k)."""
    b = len(A)
    power_traces = []
    P = [row[:] for row in A]
    for _ in range(b):
        power_traces.append(sum(P[i][i] for i in range(b)))
        P = [[sum(P[i][k] * A[k][j] for k in range(b)) for j in range(b)] for i in range(b)]
    e = [Fraction(1)]
    for k in range(1, b + 1):
        s = sum((-1) ** (i - 1) * e[k - i] * power_traces[i - 1] for i in range(1, k + 1))
        e.append(s / k)
    out = []
    for x in e:
        if x.denominator != 1:
            raise IntegralityError("exterior power trace is not an integer")
        out.append(int(x))
    return out


def torus_trace(graph: StableGraph, sub, phi: GraphAutomorphism) -> MotiveClass:
    """sum_j (-1)^{b-j} tr(Lambda^{b-j} A^{-1}) L^j for A = phi on H_1(G0)."""
    A_inv = homology_matrix(graph, sub, phi.inverse())
    b = len(A_inv)
    e = _elementary_from_traces(A_inv)
    out = ZERO
    for j in range(b + 1):
        sign = (-1) ** (b - j)
        if "torus_sign_flip" in MUTATIONS:
            sign = -sign
        out = out + MotiveClass.L(j) * (sign * e[b - j])
    return out


# -- Pic and vertex traces -------------------------------------------------------

def pic_trace(graph: StableGraph, sub, degree: int, phi: GraphAutomorphism) -> int:
    group = pic_group(graph.multigraph(sub))
    return fixed_class_count(group, phi, degree)


def _cycle_type(perm: Dict[int, int]) -> Tuple[int, ...]:
    seen, out = set(), []
    for h in perm:
        if h in seen:
            continue
        n, x = 0, h
        while x not in seen:
            seen.add(x)
            x = perm[x]
            n += 1
        out.append(n)
    return as_partition(out)


def _vertex_orbits(vperm: Sequence[int]) -> List[List[int]]:
    seen, out = set(), []
    for v in range(len(vperm)):
        if v in seen:
            continue
        orb, x = [], v
        while x not in seen:
            seen.add(x)
            orb.append(x)
            x = vperm[x]
        out.append(orb)
    return out


def vertex_trace(graph: StableGraph, phi: GraphAutomorphism, provider: InteriorProvider | None = None) -> MotiveClass:
    provider = provider or DEFAULT_PROVIDER
    out = ONE
    for orb in _vertex_orbits(phi.vertex_perm):
        v, r = orb[0], len(orb)
        power = {h: h for h in graph.half_edges_at[v]}
        for _ in range(r):
            power = {h: phi.perm[x] for h, x in power.items()}
        nu = _cycle_type(power)
        cls = provider(graph.genera[v], graph.degree(v))
        out = out * adams(r, character_at(cls, nu))
    return out


def leg_cycle_type(graph: StableGraph, phi: GraphAutomorphism, num_colors: int):
    """Per-color cycle types of phi on the legs."""
    by_color = {k: {} for k in range(1, num_colors + 1)}
    for h, c in graph.legs:
        by_color[c][h] = phi.perm[h]
    return tuple(_cycle_type(by_color[k]) for k in range(1, num_colors + 1))


# -- strata ----------------------------------------------------------------------

@dataclass
class StratumContribution:
    graph: StableGraph
    subgraph: Tuple[int, ...]
    aut_order: int
    torus_rank: int
    torsor_size: int
    motive: MotiveClass
    equivariant: EquivariantClass
    traces: List[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "graph": self.graph.to_json(),
            "subgraph": list(self.subgraph),
            "aut_order": self.aut_order,
            "torus_rank": self.torus_rank,
            "torsor_size": self.torsor_size,
            "motive": to_json(self.motive),
        }


def stratum_class(
    graph: StableGraph,
    subgraph,
    d: int,
    provider: InteriorProvider | None = None,
    aut: AutGroup | None = None,
    colors: Sequence[int] | None = None,
) -> StratumContribution:
    """Group average of torus, Pic and vertex traces, with its S_lambda refinement."""
    sub = subgraph.edge_subset if isinstance(subgraph, SpanningSubgraph) else frozenset(subgraph)
    provider = provider or DEFAULT_PROVIDER
    colors = tuple(graph.color_profile() if colors is None else colors)
    aut = aut or automorphism_group(graph, sub)
    e = graph.num_edges - len(sub)
    group = pic_group(graph.multigraph(sub))
    traces = []
    coeffs: Dict[tuple, MotiveClass] = {}
    for phi in aut:
        t = torus_trace(graph, sub, phi)
        p = fixed_class_count(group, phi, d - e)
        v = vertex_trace(graph, phi, provider)
        term = t * v * p
        rho = leg_cycle_type(graph, phi, len(colors))
        coeffs[rho] = coeffs.get(rho, ZERO) + term
        traces.append({"torus": str(t), "pic": p, "vertex": str(v), "legs": [list(x) for x in rho]})
    n_aut = len(aut)
    equivariant = EquivariantClass(colors, {k: c * Fraction(1, n_aut) for k, c in coeffs.items()})
    if not equivariant.is_character_integral():
        raise IntegralityError(f"stratum {graph} / {sorted(sub)} is not character integral")
    # the non-equivariant class: character at the identity
    motive = dimension_of(equivariant)
    if not motive.is_integral():
        raise IntegralityError(f"stratum {graph} / {sorted(sub)} does not clear 1/|Aut|")
    return StratumContribution(
        graph, tuple(sorted(sub)), n_aut, len(sub) - graph.num_vertices + 1,
        group.order, motive, equivariant, traces,
    )


# -- totals ------------------------------------------------------------------------

@dataclass
class ChiResult:
    g: int
    colors: Tuple[int, ...]
    degree: int
    motive: MotiveClass
    equivariant: EquivariantClass
    strata: List[StratumContribution]

    @property
    def e_polynomial(self):
        return e_polynomial(self.motive)

    def symbols(self) -> List[str]:
        seen = set(self.motive.symbols())
        for _, c in self.equivariant.items():
            seen.update(c.symbols())
        return [f"S{m}" if r == 1 else f"psi{r}(S{m})" for m, r in sorted(seen)]

    def is_symmetric(self) -> bool:
        return any(n > 1 for n in self.colors)

    def character_table(self):
        return {k: v for k, v in sorted(self.equivariant.character_table().items())}

    def schur(self):
        return schur_multiplicities(self.equivariant)

    def to_json(self, include_strata: bool = True) -> dict:
        out = {
            "type": [self.g, list(self.colors)],
            "degree": self.degree,
            "e_polynomial": [{"u": i, "v": j, "c": c} for (i, j), c in sorted(self.e_polynomial.items())],
            "motive": to_json(self.motive),
            "symbols": self.symbols(),
        }
        if self.is_symmetric():
            out["equivariant"] = {
                "character_table": [
                    {"class": [list(p) for p in mu], "value": to_json(c)}
                    for mu, c in self.character_table().items()
                ],
                "irreducibles": [
                    {"lambda": [list(p) for p in lam], "multiplicity": to_json(c)}
                    for lam, c in sorted(self.schur().items())
                ],
                "invariant_part": to_json(invariants(self.equivariant)),
            }
        if include_strata:
            out["strata"] = [s.to_json() for s in self.strata]
        return out


def _stratum_job(args):
    graph, sub, d, colors, plugin_paths = args
    provider = _worker_provider(tuple(plugin_paths))
    return stratum_class(graph, sub, d, provider, colors=colors)


_WORKER_PROVIDERS: Dict[tuple, InteriorProvider] = {}


def _worker_provider(paths: tuple) -> InteriorProvider:
    if not paths:
        return DEFAULT_PROVIDER
    if paths not in _WORKER_PROVIDERS:
        p = InteriorProvider()
        for path in paths:
            p.load_plugin(path)
        _WORKER_PROVIDERS[paths] = p
    return _WORKER_PROVIDERS[paths]


def _check_admissible(g, colors, d):
    if not degree_admissible(g, colors, d):
        raise InadmissibleDegree(f"degree {d} is not admissible for type ({g}, {tuple(colors)})")


def chi_compactified(
    g: int,
    colors: Sequence[int],
    d: int,
    provider: InteriorProvider | None = None,
    jobs: int = 1,
    plugin_paths: Sequence[str] = (),
) -> ChiResult:
    """Hodge Euler characteristic of the compactified universal Jacobian, S_lambda-equivariantly."""
    colors = tuple(colors)
    _check_admissible(g, colors, d)
    pairs = pair_classes(g, colors)
    if provider is None and plugin_paths:
        provider = _worker_provider(tuple(plugin_paths))
    provider = provider or DEFAULT_PROVIDER
    # fail early with a clear message when interior data is missing
    for graph, _, _ in pairs:
        for v in range(graph.num_vertices):
            provider(graph.genera[v], graph.degree(v))
    if jobs > 1 and len(pairs) > 1:
        args = [(graph, sub.edge_subset, d, colors, tuple(plugin_paths)) for graph, sub, _ in pairs]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            strata = list(pool.map(_stratum_job, args, chunksize=max(1, len(args) // (4 * jobs))))
    else:
        strata = [
            stratum_class(graph, sub.edge_subset, d, provider, aut=aut, colors=colors)
            for graph, sub, aut in pairs
        ]
    motive = ZERO
    equivariant = EquivariantClass(colors)
    for s in strata:
        motive = motive + s.motive
        equivariant = equivariant + s.equivariant
    return ChiResult(g, colors, d, motive, equivariant, strata)


def is_palindromic(poly: Dict[Tuple[int, int], int], dim: int) -> bool:
    return all(poly.get((dim - i, dim - j), 0) == c for (i, j), c in poly.items())


def expected_dimension(g: int, n: int) -> int:
    return 4 * g - 3 + n


# -- orbifold Euler characteristics ---------------------------------------------

def chi_open_genus0(m: int) -> int:
    """Euler characteristic of M_{0,m}."""
    return (-1) ** (m - 3) * factorial(m - 3)


def orbifold_euler(g: int, colors: Sequence[int], d: int | None = None) -> Fraction:
    """Orbifold Euler characteristic via strata with tree subgraphs and rational vertices.

    Legs are taken as all distinct; the degree only enters through torsor sizes,
    which are 1 for trees, so ``d`` is accepted for symmetry and ignored.
    """
    n = sum(colors)
    total = Fraction(0)
    for graph, sub, aut in pair_classes(g, (1,) * n):
        if any(graph.genera) or sub.betti != 0:
            continue
        weight = Fraction(pic_group(sub.multigraph()).order, len(aut))
        for v in range(graph.num_vertices):
            weight *= chi_open_genus0(graph.degree(v))
        total += weight
    return total


def chi_M0bar(m: int) -> int:
    """Euler characteristic of the genus-0 moduli space with m marked points, by strata."""
    total = Fraction(0)
    for graph in enumerate_stable_graphs(0, (1,) * m):
        term = Fraction(1, len(automorphism_group(graph)))
        for v in range(graph.num_vertices):
            term *= chi_open_genus0(graph.degree(v))
        total += term
    if total.denominator != 1:
        raise IntegralityError("Euler characteristic is not an integer")
    return int(total)


def wood_rhs(g: int, n: int) -> Fraction:
    if 2 * g - 2 + n <= 0:
        raise ValueError("unstable type")
    return Fraction(chi_M0bar(2 * g + n), 2 ** g * factorial(g))


# -- compactified moduli of curves (no Jacobian factors) ----------------------------

def open_moduli_class(g: int, m: int) -> MotiveClass:
    """Non-equivariant class of M_{g,m} for g <= 1."""
    if g == 0:
        return character_at(DEFAULT_PROVIDER(0, m), (1,) * m)
    if g == 1:
        # M_{1,m} fibers over M_{1,1} with fiber F(E minus the origin, m-1)
        punctured = ELLIPTIC_CURVE - ONE
        conf = configuration_class(punctured, m - 1)
        return integrate_M11(character_at(conf, (1,) * (m - 1)))
    raise NotImplementedError("only genus 0 and 1 vertex moduli are built in")


def moduli_curves_class(g: int, n: int) -> MotiveClass:
    """Class of the compactified moduli space of n-pointed genus g curves (g <= 1)."""
    total = ZERO
    for graph in enumerate_stable_graphs(g, (1,) * n):
        aut = automorphism_group(graph)
        acc = ZERO
        for phi in aut:
            term = ONE
            for orb in _vertex_orbits(phi.vertex_perm):
                v, r = orb[0], len(orb)
                power = {h: h for h in graph.half_edges_at[v]}
                for _ in range(r):
                    power = {h: phi.perm[x] for h, x in power.items()}
                nu = _cycle_type(power)
                gv, nv = graph.genera[v], graph.degree(v)
                if gv == 0:
                    val = character_at(DEFAULT_PROVIDER(0, nv), nu)
                elif nu == (1,) * nv:
                    val = open_moduli_class(gv, nv)
                else:
                    raise NotImplementedError("nontrivial action on a positive-genus vertex")
                term = term * adams(r, val)
            acc = acc + term
        total = total + acc * Fraction(1, len(aut))
    return total


# -- degree independence ------------------------------------------------------------------

def verify_independence(
    g: int,
    colors: Sequence[int],
    degrees: Sequence[int],
    provider: InteriorProvider | None = None,
    claim_checks: bool = True,
) -> dict:
    colors = tuple(colors)
    admissible = [d for d in degrees if degree_admissible(g, colors, d)]
    rejected = [d for d in degrees if d not in admissible]
    report = {
        "type": [g, list(colors)],
        "degrees": list(degrees),
        "admissible": admissible,
        "rejected": rejected,
        "precondition_failure": bool(rejected),
    }
    if not admissible:
        report["status"] = "PRECONDITION"
        return report
    results = {d: chi_compactified(g, colors, d, provider) for d in admissible}
    base = results[admissible[0]]
    totals_agree = all(r.equivariant == base.equivariant for r in results.values())
    strata_agree = all(
        [s.equivariant for s in r.strata] == [s.equivariant for s in base.strata]
        for r in results.values()
    )
    claims_ok = True
    if claim_checks:
        for graph, sub, _ in pair_classes(g, colors):
            for d in admissible[1:]:
                rep = verify_combinatorial_claim(graph, sub, admissible[0], d, colors)
                claims_ok = claims_ok and rep["bijective"] and rep["equivariant"]
    report.update(
        totals_agree=totals_agree,
        strata_agree=strata_agree,
        claims_verified=claims_ok,
        e_polynomial={str(d): [[i, j, c] for (i, j), c in sorted(r.e_polynomial.items())] for d, r in results.items()},
    )
    passed = totals_agree and strata_agree and claims_ok
    report["admissible_status"] = "PASS" if passed else "FAIL"
    report["status"] = "PRECONDITION" if rejected else report["admissible_status"]
    return report

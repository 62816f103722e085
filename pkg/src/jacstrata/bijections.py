"""Automorphism-equivariant bijections between Picard torsors of different degrees.

Two kinds of steps are composed:

* translation by an Aut-invariant multidegree (the canonical multidegree
  ``2g(v) - 2 + val(v)`` and the leg-count multidegrees of each color),
* componentwise multiplication by an odd prime ``a`` larger than |Pic^0|.

Both commute with every graph automorphism, so the composite does too.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Dict, List, Sequence, Tuple

from . import kernels
from .graphs import (
    StableGraph,
    SpanningSubgraph,
    automorphism_group,
    canonical_key,
    cut_graph,
    pair_classes,
    _canonical,
)
from .picard import (
    Multidegree,
    PicardGroup,
    permute_multidegree,
    pic_group,
)


class InadmissibleDegree(ValueError):
    """The degree fails the gcd condition for the given type."""


class BijectionError(AssertionError):
    """A constructed map failed an internal consistency check."""


def _gcd_all(values) -> int:
    out = 0
    for v in values:
        out = gcd(out, int(v))
    return out


# -- degree windows -------------------------------------------------------

@dataclass(frozen=True)
class DegreeWindow:
    g: int
    colors: Tuple[int, ...]

    @property
    def M(self) -> int:
        return _gcd_all([2 * self.g - 2, *self.colors])

    def shifted(self, d: int) -> int:
        return d - self.g + 1

    def __contains__(self, d: int) -> bool:
        return gcd(self.shifted(d), self.M) == 1

    def degrees(self, lo: int, hi: int) -> List[int]:
        return [d for d in range(lo, hi + 1) if d in self]


def degree_admissible(g: int, colors: Sequence[int], d: int) -> bool:
    return _gcd_all([g - 1 + d, 2 * g - 2, *colors]) == 1


def sn_iso_criterion(g: int, n: int, d: int, d_prime: int) -> bool:
    """Universal Jacobians of degrees d, d' agree S_n-equivariantly over M_{g,n}."""
    if g < 1 or 2 * g - 2 + n <= 0:
        raise ValueError("criterion needs g >= 1 and a stable type")
    m = gcd(2 * g - 2, n)
    return (d - d_prime) % m == 0 or (d + d_prime) % m == 0


# -- invariant multidegrees ------------------------------------------------

def canonical_multidegree(graph: StableGraph) -> Multidegree:
    return tuple(2 * graph.genera[v] - 2 + graph.valence(v) for v in range(graph.num_vertices))


def leg_multidegree(graph: StableGraph, k: int) -> Multidegree:
    if k not in {c for _, c in graph.legs}:
        raise ValueError(f"graph has no legs of color {k}")
    return tuple(graph.leg_colors_at(v).count(k) for v in range(graph.num_vertices))


# -- steps -------------------------------------------------------------------

@dataclass(frozen=True)
class Translate:
    shift: Multidegree

    def __call__(self, m: Sequence[int]) -> Multidegree:
        return tuple(x + y for x, y in zip(m, self.shift))

    def degree_change(self, d: int) -> int:
        return d + sum(self.shift)

    def to_json(self):
        return {"op": "translate", "by": list(self.shift)}


@dataclass(frozen=True)
class Multiply:
    a: int

    def __call__(self, m: Sequence[int]) -> Multidegree:
        return tuple(self.a * x for x in m)

    def degree_change(self, d: int) -> int:
        return self.a * d

    def to_json(self):
        return {"op": "multiply", "a": self.a}


def translate(graph, m: Sequence[int]) -> Translate:
    if len(m) != graph.num_vertices:
        raise ValueError("multidegree length does not match the vertex count")
    return Translate(tuple(int(x) for x in m))


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def select_prime(residue: int, M: int, bound: int) -> int:
    """Smallest odd prime a = residue (mod M) with a > bound."""
    M = abs(M)
    if gcd(residue, M) != 1:
        raise ValueError(f"residue {residue} is not a unit modulo {M}")
    a = bound + 1
    while True:
        if a % 2 == 1 and (M <= 1 or (a - residue) % M == 0) and is_prime(a):
            return a
        a += 1


def multiply(graph, d1: int, a: int, group: PicardGroup | None = None) -> "ComposedBijection":
    group = group or pic_group(graph)
    if a % 2 == 0 or not is_prime(a) or a <= group.order:
        raise ValueError(f"multiplier {a} must be an odd prime larger than |Pic^0| = {group.order}")
    return ComposedBijection(graph, d1, a * d1, [Multiply(a)], group)


def extended_gcd(values: Sequence[int]) -> Tuple[int, List[int]]:
    """(g, x) with sum x_i * values_i = g = gcd(values) >= 0."""
    g, coeffs = 0, [0] * len(values)
    for i, v in enumerate(values):
        # combine g with v: s*g + t*v = gcd(g, v)
        old_r, r = g, v
        old_s, s = 1, 0
        old_t, t = 0, 1
        while r:
            q = old_r // r
            old_r, r = r, old_r - q * r
            old_s, s = s, old_s - q * s
            old_t, t = t, old_t - q * t
        if old_r < 0:
            old_r, old_s, old_t = -old_r, -old_s, -old_t
        coeffs = [c * old_s for c in coeffs]
        coeffs[i] = old_t
        g = old_r
    return g, coeffs


# -- composite ------------------------------------------------------------------

@dataclass
class ComposedBijection:
    graph: object
    source_degree: int
    target_degree: int
    steps: List = field(default_factory=list)
    group: PicardGroup | None = None

    def __post_init__(self):
        if self.group is None:
            self.group = pic_group(self.graph)
        d = self.source_degree
        for s in self.steps:
            d = s.degree_change(d)
        if d != self.target_degree:
            raise BijectionError(f"steps land in degree {d}, expected {self.target_degree}")

    def apply(self, m: Sequence[int]) -> Multidegree:
        out = tuple(m)
        for s in self.steps:
            out = s(out)
        return self.group.canonical(out)

    def table(self) -> Dict[Multidegree, Multidegree]:
        return {m: self.apply(m) for m in self.group.representatives(self.source_degree)}

    def steps_json(self):
        return [s.to_json() for s in self.steps]

    def affine(self) -> Tuple[int, Multidegree]:
        """The composite as m -> scale * m + shift."""
        scale, shift = 1, [0] * self.group.n
        for s in self.steps:
            if isinstance(s, Multiply):
                scale *= s.a
                shift = [s.a * x for x in shift]
            else:
                shift = [x + y for x, y in zip(shift, s.shift)]
        return scale, tuple(shift)

    def check(self, vertex_perms: Sequence[Sequence[int]]) -> dict:
        """Exhaustive bijectivity and equivariance check on canonical representatives."""
        reps = self.group.representatives(self.source_degree)
        scale, shift = self.affine()
        images, commutes = kernels.affine_equivariance(
            reps, scale, shift, [tuple(p) for p in vertex_perms], self.group.hnf, self.group.moduli
        )
        target = set(self.group.representatives(self.target_degree))
        bijective = len(set(images)) == len(images) and set(images) == target
        witnesses = [{"vertex_perm": list(p), "commutes": ok} for p, ok in zip(vertex_perms, commutes)]
        return {
            "set_size": len(reps),
            "bijective": bijective,
            "equivariant": all(commutes),
            "witnesses": witnesses,
        }


def build_bijection(
    graph: StableGraph,
    colors: Sequence[int] | None,
    d1: int,
    d2: int,
    multiplier: int | None = None,
) -> ComposedBijection:
    """Aut(graph)-equivariant bijection Pic^{d1}(graph) -> Pic^{d2}(graph).

    With ``multiplier`` the multiplication step is forced to use that prime;
    otherwise it is skipped whenever a translation suffices.
    """
    colors = tuple(graph.color_profile() if colors is None else colors)
    g = graph.genus
    window = DegreeWindow(g, colors)
    for d in (d1, d2):
        if d not in window:
            raise InadmissibleDegree(f"degree {d} is not admissible for type ({g}, {colors})")
    group = pic_group(graph)
    M = window.M
    s1, s2 = window.shifted(d1), window.shifted(d2)
    steps: List = []
    current = s1
    can = canonical_multidegree(graph)
    abar = (s2 * pow(s1, -1, M)) % M if M > 1 else 0
    if multiplier is not None or (M > 1 and abar != 1 % M):
        if multiplier is None:
            a = select_prime(abar, M, group.order)
        else:
            a = multiplier
            if M > 1 and (a - abar) % M:
                raise ValueError(f"multiplier {a} is not congruent to {abar} mod {M}")
        if a % 2 == 0 or not is_prime(a) or a <= group.order:
            raise ValueError(f"multiplier {a} must be an odd prime larger than |Pic^0| = {group.order}")
        steps.append(Multiply(a))
        half = (a - 1) // 2
        if half:
            steps.append(Translate(tuple(-half * x for x in can)))
        current = a * s1
    gap = s2 - current
    if gap:
        generators = [can] + [leg_multidegree(graph, k) for k in range(1, len(colors) + 1) if colors[k - 1]]
        totals = [sum(x) for x in generators]
        h, coeffs = extended_gcd(totals)
        if h == 0 or gap % h:
            raise BijectionError(f"gap {gap} is not a combination of {totals}")
        scale = gap // h
        shift = [0] * graph.num_vertices
        for c, gen in zip(coeffs, generators):
            for v, x in enumerate(gen):
                shift[v] += c * scale * x
        steps.append(Translate(tuple(shift)))
    return ComposedBijection(graph, d1, d2, steps, group)


# -- combinatorial claim through the cut graph ------------------------------

def _as_subgraph(graph: StableGraph, subgraph) -> SpanningSubgraph:
    if isinstance(subgraph, SpanningSubgraph):
        return subgraph
    return SpanningSubgraph(graph, frozenset(subgraph))


def verify_combinatorial_claim(graph: StableGraph, subgraph, d: int, d_prime: int, colors=None) -> dict:
    """Bijection Pic^{d-e}(G0) -> Pic^{d'-e}(G0) commuting with Aut(G, G0)."""
    sub = _as_subgraph(graph, subgraph)
    colors = tuple(graph.color_profile() if colors is None else colors)
    g = graph.genus
    for x in (d, d_prime):
        if not degree_admissible(g, colors, x):
            raise InadmissibleDegree(f"degree {x} is not admissible for type ({g}, {colors})")
    e = sub.excess
    cut = cut_graph(graph, sub)
    cut_colors = tuple(colors) + ((2 * e,) if e else ())
    if cut.genus != g - e:
        raise BijectionError("cut graph has the wrong genus")
    for x in (d, d_prime):
        if not degree_admissible(cut.genus, cut_colors, x - e):
            raise BijectionError("cut graph lost admissibility")
    bij = build_bijection(cut, cut_colors, d - e, d_prime - e)
    aut = automorphism_group(graph, sub.edge_subset)
    report = bij.check([a.vertex_perm for a in aut])
    return {
        "graph": graph.to_json(),
        "subgraph": sorted(sub.edge_subset),
        "d": d,
        "d_prime": d_prime,
        "set_size": report["set_size"],
        "steps": bij.steps_json(),
        "bijective": report["bijective"],
        "equivariant": report["equivariant"],
        "witnesses": report["witnesses"],
    }


# -- stability assignments (conditions (i) and (ii) only) ---------------------

def _vertex_isomorphism(a: StableGraph, a_sub, b: StableGraph, b_sub) -> List[int]:
    """Vertex map a -> b underlying some isomorphism of pairs."""
    order_a, key_a = _canonical(a, frozenset(a_sub))
    order_b, key_b = _canonical(b, frozenset(b_sub))
    if key_a != key_b:
        raise ValueError("pairs are not isomorphic")
    out = [0] * a.num_vertices
    for i, v in enumerate(order_a):
        out[v] = order_b[i]
    return out


def _orbit_box(orbits, total, radius):
    from itertools import product as iprod

    sizes = [len(o) for o in orbits]
    for vals in iprod(range(-radius, radius + 1), repeat=len(orbits) - 1):
        rest = total - sum(s * v for s, v in zip(sizes, vals))
        if rest % sizes[-1] == 0:
            yield list(vals) + [rest // sizes[-1]]


def _invariant_representative(group: PicardGroup, cls_rep, stab_perms, n) -> Multidegree:
    # vertex orbits of the stabilizer
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for perm in stab_perms:
        for v in range(n):
            parent[find(v)] = find(perm[v])
    orbits: Dict[int, List[int]] = {}
    for v in range(n):
        orbits.setdefault(find(v), []).append(v)
    orbit_list = [orbits[k] for k in sorted(orbits)]
    total = sum(cls_rep)
    for radius in range(0, 4 * (abs(total) + n) + 8):
        for vals in _orbit_box(orbit_list, total, radius):
            m = [0] * n
            for orb, x in zip(orbit_list, vals):
                for v in orb:
                    m[v] = x
            if group.equivalent(m, cls_rep):
                return tuple(m)
    raise BijectionError("no stabilizer-invariant representative found")


class StabilityAssignment:
    """Sets of multidegrees for every (G, G0) pair, closed under isomorphism."""

    def __init__(self, g: int, colors: Sequence[int], d: int):
        self.g, self.colors, self.d = g, tuple(colors), d
        self._table: Dict[object, Tuple[StableGraph, frozenset, List[Multidegree]]] = {}

    def _add(self, graph, sub, reps):
        self._table[canonical_key(graph, sub)] = (graph, frozenset(sub), reps)

    def pairs(self):
        return [(g, s) for g, s, _ in self._table.values()]

    def members(self, graph: StableGraph, subgraph) -> List[Multidegree]:
        sub = frozenset(_as_subgraph(graph, subgraph).edge_subset)
        key = canonical_key(graph, sub)
        ref_graph, ref_sub, reps = self._table[key]
        iso = _vertex_isomorphism(ref_graph, ref_sub, graph, sub)
        return sorted(permute_multidegree(iso, m) for m in reps)

    def check_condition_i(self) -> bool:
        for graph, sub, reps in self._table.values():
            group = pic_group(graph.multigraph(sub))
            e = graph.num_edges - len(sub)
            if len(reps) != group.order or any(sum(m) != self.d - e for m in reps):
                return False
            if len({group.canonical(m) for m in reps}) != len(reps):
                return False
        return True

    def check_condition_ii(self, graph, subgraph, other, other_subgraph) -> bool:
        """Members transported along an isomorphism match the target's members."""
        sub = frozenset(_as_subgraph(graph, subgraph).edge_subset)
        osub = frozenset(_as_subgraph(other, other_subgraph).edge_subset)
        iso = _vertex_isomorphism(graph, sub, other, osub)
        moved = sorted(permute_multidegree(iso, m) for m in self.members(graph, sub))
        return moved == self.members(other, osub)

    def is_aut_invariant(self) -> bool:
        for graph, sub, reps in self._table.values():
            base = set(reps)
            for a in automorphism_group(graph, sub):
                if {permute_multidegree(a.vertex_perm, m) for m in reps} != base:
                    return False
        return True


def canonical_stability(g: int, colors: Sequence[int], d: int) -> StabilityAssignment:
    if not degree_admissible(g, colors, d):
        raise InadmissibleDegree(f"degree {d} is not admissible for type ({g}, {tuple(colors)})")
    out = StabilityAssignment(g, colors, d)
    for graph, sub, aut in pair_classes(g, colors):
        e = sub.excess
        group = pic_group(sub.multigraph())
        perms = [a.vertex_perm for a in aut]
        chosen: Dict[Multidegree, Multidegree] = {}
        for rep in group.representatives(d - e):
            if rep in chosen:
                continue
            stab = [p for p in perms if group.canonical(permute_multidegree(p, rep)) == rep]
            base = _invariant_representative(group, rep, stab, graph.num_vertices)
            for p in perms:
                image = group.canonical(permute_multidegree(p, rep))
                chosen.setdefault(image, permute_multidegree(p, base))
        out._add(graph, sub.edge_subset, sorted(chosen.values()))
    return out

"""Stable graphs with colored legs: construction, canonical forms, automorphisms.

Graphs are stored at the half-edge level so that loops and parallel edges are
first class.  Legs carry colors ``1..p``; legs of equal color are
indistinguishable, so distinct colors give the fully labeled case and a single
shared color gives the ``S_n``-symmetric case.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from itertools import permutations, product
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple

from . import kernels


class UnstableTypeError(ValueError):
    """The requested (g, n) type has no stable graphs."""


def colors_to_legs(colors: Sequence[int]) -> List[int]:
    """Expand multiplicities (n_1, ..., n_p) to a list of leg colors."""
    out: List[int] = []
    for k, m in enumerate(colors, start=1):
        if m < 0:
            raise ValueError("color multiplicities must be nonnegative")
        out.extend([k] * m)
    return out


@dataclass(frozen=True)
class StableGraph:
    genera: Tuple[int, ...]
    vertex_of: Tuple[int, ...]
    edges: Tuple[Tuple[int, int], ...]
    legs: Tuple[Tuple[int, int], ...]

    # -- construction --------------------------------------------------
    @classmethod
    def from_spec(
        cls,
        genera: Sequence[int],
        leg_colors: Sequence[Sequence[int]],
        edge_list: Iterable[Tuple[int, int]],
        validate: bool = True,
    ) -> "StableGraph":
        """Build with half-edges numbered legs first, then edges in sorted order."""
        genera = tuple(int(x) for x in genera)
        vertex_of: List[int] = []
        legs: List[Tuple[int, int]] = []
        for v, cols in enumerate(leg_colors):
            for c in sorted(cols):
                legs.append((len(vertex_of), int(c)))
                vertex_of.append(v)
        edges: List[Tuple[int, int]] = []
        for u, w in sorted(tuple(sorted((int(a), int(b)))) for a, b in edge_list):
            h = len(vertex_of)
            vertex_of.extend([u, w])
            edges.append((h, h + 1))
        g = cls(genera, tuple(vertex_of), tuple(edges), tuple(legs))
        if validate:
            g.validate()
        return g

    def validate(self) -> None:
        nv = self.num_vertices
        if nv == 0:
            raise ValueError("graph has no vertices")
        seen = set()
        for a, b in self.edges:
            seen.update((a, b))
        for h, _ in self.legs:
            seen.add(h)
        if seen != set(range(len(self.vertex_of))) or len(seen) != 2 * len(self.edges) + len(self.legs):
            raise ValueError("half-edges must be partitioned into edges and legs")
        if any(not 0 <= v < nv for v in self.vertex_of):
            raise ValueError("half-edge attached to a missing vertex")
        if any(g < 0 for g in self.genera):
            raise ValueError("negative vertex genus")
        if not self.is_connected():
            raise ValueError("stable graphs must be connected")
        for v in range(nv):
            if 2 * self.genera[v] - 2 + self.degree(v) <= 0:
                raise ValueError(f"vertex {v} is unstable")

    # -- basic invariants ----------------------------------------------
    @property
    def num_vertices(self) -> int:
        return len(self.genera)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def num_legs(self) -> int:
        return len(self.legs)

    @cached_property
    def half_edges_at(self) -> Tuple[Tuple[int, ...], ...]:
        at: List[List[int]] = [[] for _ in self.genera]
        for h, v in enumerate(self.vertex_of):
            at[v].append(h)
        return tuple(tuple(x) for x in at)

    @cached_property
    def leg_color(self) -> Dict[int, int]:
        return dict(self.legs)

    def degree(self, v: int) -> int:
        return len(self.half_edges_at[v])

    def valence(self, v: int) -> int:
        """Number of non-leg half-edges at v."""
        return sum(1 for h in self.half_edges_at[v] if h not in self.leg_color)

    def leg_colors_at(self, v: int) -> Tuple[int, ...]:
        lc = self.leg_color
        return tuple(sorted(lc[h] for h in self.half_edges_at[v] if h in lc))

    @property
    def betti(self) -> int:
        return self.num_edges - self.num_vertices + 1

    @property
    def genus(self) -> int:
        return sum(self.genera) + self.betti

    def color_profile(self) -> Tuple[int, ...]:
        if not self.legs:
            return ()
        top = max(c for _, c in self.legs)
        counts = [0] * top
        for _, c in self.legs:
            counts[c - 1] += 1
        return tuple(counts)

    def edge_vertices(self, e: int) -> Tuple[int, int]:
        a, b = self.edges[e]
        return self.vertex_of[a], self.vertex_of[b]

    def is_connected(self, edge_subset: Iterable[int] | None = None) -> bool:
        parent = list(range(self.num_vertices))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        idx = range(self.num_edges) if edge_subset is None else edge_subset
        for e in idx:
            u, w = self.edge_vertices(e)
            parent[find(u)] = find(w)
        return len({find(v) for v in range(self.num_vertices)}) == 1

    def multigraph(self, edge_subset: Iterable[int] | None = None):
        from .picard import Multigraph

        idx = range(self.num_edges) if edge_subset is None else sorted(edge_subset)
        return Multigraph(self.num_vertices, tuple(self.edge_vertices(e) for e in idx))

    def spec(self):
        """(genera, leg colors per vertex, sorted vertex-pair edge list)."""
        return (
            self.genera,
            tuple(self.leg_colors_at(v) for v in range(self.num_vertices)),
            tuple(sorted(tuple(sorted(self.edge_vertices(e))) for e in range(self.num_edges))),
        )

    # -- serialization -------------------------------------------------
    def to_json(self) -> dict:
        genera, legs, edges = self.spec()
        return {
            "vertices": [{"genus": g, "legs": list(c)} for g, c in zip(genera, legs)],
            "edges": [list(e) for e in edges],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, data) -> "StableGraph":
        if isinstance(data, str):
            data = json.loads(data)
        verts = data["vertices"]
        return cls.from_spec(
            [int(v["genus"]) for v in verts],
            [list(v.get("legs", [])) for v in verts],
            [tuple(e) for e in data.get("edges", [])],
        )

    def __str__(self):
        return self.dumps()

    # -- adjacency data used by the kernels ----------------------------
    def vertex_labels(self) -> List[tuple]:
        return [
            (self.genera[v], self.degree(v), self.leg_colors_at(v))
            for v in range(self.num_vertices)
        ]

    def adjacency(self, edge_subset: FrozenSet[int] | None = None) -> List[List[int]]:
        """Multiplicity matrix; with a subset, entries encode (inside, outside)."""
        n = self.num_vertices
        adj = [[0] * n for _ in range(n)]
        for e in range(self.num_edges):
            u, w = self.edge_vertices(e)
            weight = 1
            if edge_subset is not None and e not in edge_subset:
                weight = 1 << 8
            adj[u][w] += weight
            if u != w:
                adj[w][u] += weight
        return adj


# -- canonical forms ---------------------------------------------------

def _refined_cells(graph: StableGraph, adj: List[List[int]]) -> List[List[int]]:
    labels = graph.vertex_labels()
    n = graph.num_vertices
    color = {v: labels[v] for v in range(n)}
    # colour refinement on the weighted adjacency
    for _ in range(n):
        keyed = {
            v: (color[v], tuple(sorted((adj[v][w], color[w]) for w in range(n) if adj[v][w])), adj[v][v])
            for v in range(n)
        }
        ranks = {k: i for i, k in enumerate(sorted(set(keyed.values())))}
        new = {v: (ranks[keyed[v]],) for v in range(n)}
        if len(set(new.values())) == len(set(color.values())):
            color = {v: (ranks[keyed[v]],) for v in range(n)}
            break
        color = new
    # final cells ordered by the refined colour, computed from label-rank first
    base = sorted(set(labels))
    order_key = {v: (base.index(labels[v]), color[v]) for v in range(n)}
    cells: Dict[tuple, List[int]] = {}
    for v in range(n):
        cells.setdefault(order_key[v], []).append(v)
    return [cells[k] for k in sorted(cells)]


def _canonical(graph: StableGraph, edge_subset: FrozenSet[int] | None = None):
    adj = graph.adjacency(edge_subset)
    cells = _refined_cells(graph, adj)
    order, code = kernels.canonical_order(graph.num_vertices, cells, adj)
    labels = graph.vertex_labels()
    key = (tuple(labels[v] for v in order), code)
    return order, key


def canonical_key(graph: StableGraph, edge_subset: Iterable[int] | None = None):
    """Hashable invariant; equal iff the (graph, subgraph) pairs are isomorphic."""
    sub = None if edge_subset is None else frozenset(edge_subset)
    return _canonical(graph, sub)[1]


def canonicalize(graph: StableGraph) -> StableGraph:
    order, _ = _canonical(graph)
    new_index = {old: i for i, old in enumerate(order)}
    genera, legs, edges = graph.spec()
    return StableGraph.from_spec(
        [genera[old] for old in order],
        [legs[old] for old in order],
        [(new_index[u], new_index[w]) for u, w in edges],
        validate=False,
    )


def is_isomorphic(a: StableGraph, b: StableGraph) -> bool:
    return canonical_key(a) == canonical_key(b)


# -- automorphisms -----------------------------------------------------

@dataclass(frozen=True)
class GraphAutomorphism:
    """A half-edge permutation ``perm[h]`` of ``graph`` respecting all structure."""

    graph: StableGraph
    perm: Tuple[int, ...]

    @cached_property
    def vertex_perm(self) -> Tuple[int, ...]:
        out = [0] * self.graph.num_vertices
        for v, hs in enumerate(self.graph.half_edges_at):
            if hs:
                out[v] = self.graph.vertex_of[self.perm[hs[0]]]
            else:
                out[v] = v
        return tuple(out)

    @cached_property
    def edge_map(self) -> Tuple[Tuple[int, int], ...]:
        """For each edge e: (image edge, +1 if orientation kept else -1)."""
        lookup = {}
        for e, (a, b) in enumerate(self.graph.edges):
            lookup[(a, b)] = (e, 1)
            lookup[(b, a)] = (e, -1)
        return tuple(lookup[(self.perm[a], self.perm[b])] for a, b in self.graph.edges)

    def leg_perm(self) -> Dict[int, int]:
        return {h: self.perm[h] for h, _ in self.graph.legs}

    def compose(self, other: "GraphAutomorphism") -> "GraphAutomorphism":
        """self after other."""
        return GraphAutomorphism(self.graph, tuple(self.perm[other.perm[h]] for h in range(len(self.perm))))

    def inverse(self) -> "GraphAutomorphism":
        inv = [0] * len(self.perm)
        for h, k in enumerate(self.perm):
            inv[k] = h
        return GraphAutomorphism(self.graph, tuple(inv))

    def is_identity(self) -> bool:
        return all(h == k for h, k in enumerate(self.perm))

    def preserves(self, edge_subset: Iterable[int]) -> bool:
        sub = set(edge_subset)
        return {self.edge_map[e][0] for e in sub} == sub


class AutGroup:
    """Explicit list of automorphisms (identity first)."""

    def __init__(self, graph: StableGraph, elements: List[GraphAutomorphism], subgraph=None):
        self.graph = graph
        self.subgraph = subgraph
        ident = tuple(range(len(graph.vertex_of)))
        self.elements = sorted(elements, key=lambda a: (a.perm != ident, a.perm))

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)


def _half_edge_choices(graph: StableGraph, vperm: Tuple[int, ...]):
    """Per-structure lists of partial half-edge maps compatible with vperm."""
    blocks = []
    # legs: match by (vertex, color)
    legs_by: Dict[Tuple[int, int], List[int]] = {}
    for h, c in graph.legs:
        legs_by.setdefault((graph.vertex_of[h], c), []).append(h)
    for (v, c), hs in sorted(legs_by.items()):
        targets = legs_by.get((vperm[v], c), [])
        if len(targets) != len(hs):
            return None
        blocks.append([dict(zip(hs, img)) for img in permutations(targets)])
    # edges: match by unordered vertex pair
    edges_by: Dict[Tuple[int, int], List[int]] = {}
    for e in range(graph.num_edges):
        u, w = graph.edge_vertices(e)
        edges_by.setdefault((min(u, w), max(u, w)), []).append(e)
    for (u, w), es in sorted(edges_by.items()):
        tu, tw = vperm[u], vperm[w]
        targets = edges_by.get((min(tu, tw), max(tu, tw)), [])
        if len(targets) != len(es):
            return None
        options = []
        for img in permutations(targets):
            if u == w:
                flips = product((False, True), repeat=len(es))
            else:
                flips = [None]
            for flip in flips:
                m = {}
                for i, (e, t) in enumerate(zip(es, img)):
                    a, b = graph.edges[e]
                    ta, tb = graph.edges[t]
                    if u == w:
                        if flip[i]:
                            ta, tb = tb, ta
                    else:
                        # half-edge at u goes to the half-edge at vperm[u]
                        if graph.vertex_of[ta] != vperm[graph.vertex_of[a]]:
                            ta, tb = tb, ta
                    m[a], m[b] = ta, tb
                options.append(m)
        blocks.append(options)
    return blocks


def automorphism_group(graph: StableGraph, subgraph: Iterable[int] | None = None) -> AutGroup:
    """All automorphisms of ``graph``; restricted to those preserving ``subgraph``."""
    adj = graph.adjacency()
    labels = graph.vertex_labels()
    cells: Dict[tuple, List[int]] = {}
    for v, lab in enumerate(labels):
        cells.setdefault(lab, []).append(v)
    vperms = kernels.label_preserving_automorphisms(
        graph.num_vertices, [cells[k] for k in sorted(cells)], adj
    )
    elements = []
    nh = len(graph.vertex_of)
    for vperm in vperms:
        blocks = _half_edge_choices(graph, tuple(vperm))
        if blocks is None:
            continue
        for combo in product(*blocks):
            perm = [0] * nh
            for part in combo:
                for a, b in part.items():
                    perm[a] = b
            elements.append(GraphAutomorphism(graph, tuple(perm)))
    if subgraph is not None:
        sub = frozenset(subgraph)
        elements = [a for a in elements if a.preserves(sub)]
    else:
        sub = None
    return AutGroup(graph, elements, sub)


# -- spanning subgraphs --------------------------------------------------

@dataclass(frozen=True)
class SpanningSubgraph:
    parent: StableGraph
    edge_subset: FrozenSet[int]

    @property
    def betti(self) -> int:
        return len(self.edge_subset) - self.parent.num_vertices + 1

    @property
    def excess(self) -> int:
        """e_{Gamma,Gamma_0}: number of edges outside the subgraph."""
        return self.parent.num_edges - len(self.edge_subset)

    def sorted_edges(self) -> Tuple[int, ...]:
        return tuple(sorted(self.edge_subset))

    def multigraph(self):
        return self.parent.multigraph(self.edge_subset)


def connected_spanning_subgraphs(graph: StableGraph) -> List[SpanningSubgraph]:
    ne = graph.num_edges
    out = []
    for mask in range(1 << ne):
        subset = [e for e in range(ne) if mask >> e & 1]
        if graph.is_connected(subset):
            out.append(SpanningSubgraph(graph, frozenset(subset)))
    out.sort(key=lambda s: (len(s.edge_subset), s.sorted_edges()))
    return out


def subgraph_classes(graph: StableGraph, aut: AutGroup | None = None):
    """Orbit representatives of connected spanning subgraphs under Aut(graph).

    Returns a list of (SpanningSubgraph, AutGroup of the pair).
    """
    aut = aut or automorphism_group(graph)
    seen = set()
    out = []
    for sub in connected_spanning_subgraphs(graph):
        key = sub.sorted_edges()
        if key in seen:
            continue
        orbit = {tuple(sorted(a.edge_map[e][0] for e in sub.edge_subset)) for a in aut}
        seen.update(orbit)
        stab = [a for a in aut if a.preserves(sub.edge_subset)]
        out.append((sub, AutGroup(graph, stab, sub.edge_subset)))
    return out


def cut_graph(graph: StableGraph, subgraph: SpanningSubgraph | Iterable[int]) -> StableGraph:
    """Cut every edge outside the subgraph into two legs of one fresh color.

    Half-edge indices are kept, so automorphisms of the pair act verbatim.
    """
    sub = subgraph.edge_subset if isinstance(subgraph, SpanningSubgraph) else frozenset(subgraph)
    fresh = max((c for _, c in graph.legs), default=0) + 1
    edges = tuple(graph.edges[e] for e in range(graph.num_edges) if e in sub)
    new_legs = list(graph.legs)
    for e in range(graph.num_edges):
        if e not in sub:
            a, b = graph.edges[e]
            new_legs.extend([(a, fresh), (b, fresh)])
    return StableGraph(graph.genera, graph.vertex_of, edges, tuple(sorted(new_legs)))


def cut_color_profile(colors: Sequence[int], excess: int) -> Tuple[int, ...]:
    return tuple(colors) + ((2 * excess,) if excess else ())


# -- enumeration ------------------------------------------------------------

def _degenerations(graph: StableGraph):
    genera, legs, edges = graph.spec()
    nv = len(genera)
    # loops
    for v in range(nv):
        if genera[v] >= 1:
            new_genera = list(genera)
            new_genera[v] -= 1
            yield new_genera, list(legs), list(edges) + [(v, v)]
    # splits: every half-edge at v goes to v or to the new vertex
    for v in range(nv):
        half = [("leg", c) for c in legs[v]]
        for i, (a, b) in enumerate(edges):
            if a == v:
                half.append(("edge", i, 0))
            if b == v:
                half.append(("edge", i, 1))
        w = nv
        for mask in range(1 << len(half)):
            side = [(mask >> j) & 1 for j in range(len(half))]
            for g1 in range(genera[v] + 1):
                g2 = genera[v] - g1
                d1 = side.count(0) + 1
                d2 = side.count(1) + 1
                if 2 * g1 - 2 + d1 <= 0 or 2 * g2 - 2 + d2 <= 0:
                    continue
                new_legs = [list(x) for x in legs] + [[]]
                new_legs[v] = []
                new_edges = [list(e) for e in edges]
                for s, item in zip(side, half):
                    target = v if s == 0 else w
                    if item[0] == "leg":
                        new_legs[target].append(item[1])
                    else:
                        new_edges[item[1]][item[2]] = target
                new_genera = list(genera) + [g2]
                new_genera[v] = g1
                yield new_genera, new_legs, [tuple(e) for e in new_edges] + [(v, w)]


def enumerate_stable_graphs(g: int, colors: Sequence[int]) -> List[StableGraph]:
    """One canonical representative per isomorphism class, deterministically sorted."""
    n = sum(colors)
    if g < 0 or 2 * g - 2 + n <= 0:
        raise UnstableTypeError(f"type ({g},{n}) is not stable")
    start = canonicalize(StableGraph.from_spec([g], [colors_to_legs(colors)], []))
    found = {canonical_key(start): start}
    frontier = [start]
    while frontier:
        nxt = []
        for graph in frontier:
            for genera, legs, edges in _degenerations(graph):
                cand = StableGraph.from_spec(genera, legs, edges, validate=False)
                key = canonical_key(cand)
                if key not in found:
                    canon = canonicalize(cand)
                    found[key] = canon
                    nxt.append(canon)
        frontier = nxt
    return sorted(found.values(), key=graph_sort_key)


def graph_sort_key(graph: StableGraph):
    return (graph.num_edges, graph.num_vertices, canonical_key(graph))


def pair_classes(g: int, colors: Sequence[int]):
    """All isomorphism classes of (Gamma, Gamma_0) with their automorphism groups."""
    out = []
    for graph in enumerate_stable_graphs(g, colors):
        aut = automorphism_group(graph)
        for sub, stab in subgraph_classes(graph, aut):
            out.append((graph, sub, stab))
    return out

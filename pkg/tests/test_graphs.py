from itertools import combinations_with_replacement, permutations, product
import random

import pytest
from hypothesis import given, settings, strategies as st

from jacstrata.graphs import (
    StableGraph,
    UnstableTypeError,
    automorphism_group,
    canonical_key,
    canonicalize,
    colors_to_legs,
    connected_spanning_subgraphs,
    cut_color_profile,
    cut_graph,
    enumerate_stable_graphs,
    is_isomorphic,
    pair_classes,
    subgraph_classes,
)

THETA = StableGraph.from_spec([0, 0], [[], []], [(0, 1)] * 3)


# -- brute-force oracles ----------------------------------------------------

def _brute_key(genera, legs, edges):
    """Minimum relabelled description over all vertex permutations."""
    n = len(genera)
    best = None
    for p in permutations(range(n)):
        inv = [0] * n
        for v, w in enumerate(p):
            inv[w] = v
        desc = (
            tuple(genera[inv[w]] for w in range(n)),
            tuple(tuple(sorted(legs[inv[w]])) for w in range(n)),
            tuple(sorted(tuple(sorted((p[a], p[b]))) for a, b in edges)),
        )
        if best is None or desc < best:
            best = desc
    return best


def _connected(n, edges):
    reach, stack = {0}, [0]
    while stack:
        v = stack.pop()
        for a, b in edges:
            for x, y in ((a, b), (b, a)):
                if x == v and y not in reach:
                    reach.add(y)
                    stack.append(y)
    return len(reach) == n


def brute_force_graphs(g, colors):
    """Every stable graph with at most 2g-2+n vertices, deduplicated by brute force."""
    leg_list = colors_to_legs(colors)
    n = len(leg_list)
    found = set()
    for nv in range(1, 2 * g - 2 + n + 1):
        pairs = [(a, b) for a in range(nv) for b in range(a, nv)]
        for genera in product(range(g + 1), repeat=nv):
            ne = g - sum(genera) + nv - 1
            if ne < nv - 1:
                continue
            for edges in combinations_with_replacement(pairs, ne):
                if not _connected(nv, edges):
                    continue
                deg = [0] * nv
                for a, b in edges:
                    deg[a] += 1
                    deg[b] += 1
                for where in product(range(nv), repeat=n):
                    legs = [[] for _ in range(nv)]
                    for c, v in zip(leg_list, where):
                        legs[v].append(c)
                    if all(2 * genera[v] - 2 + deg[v] + len(legs[v]) > 0 for v in range(nv)):
                        found.add(_brute_key(genera, legs, edges))
    return found


def brute_force_automorphisms(graph):
    """Half-edge permutations preserving vertices, genera, edges and leg colors."""
    if not graph.vertex_of:
        return {()}
    legs_by_color = {}
    for h, c in graph.legs:
        legs_by_color.setdefault(c, []).append(h)
    edge_halves = [h for e in graph.edges for h in e]
    blocks = [sorted(v) for _, v in sorted(legs_by_color.items())] + [edge_halves]
    edge_set = {frozenset(e) for e in graph.edges}
    out = set()
    for images in product(*(permutations(b) for b in blocks)):
        perm = [0] * len(graph.vertex_of)
        for block, img in zip(blocks, images):
            for a, b in zip(block, img):
                perm[a] = b
        if {frozenset((perm[a], perm[b])) for a, b in graph.edges} != edge_set:
            continue
        vmap = {}
        ok = True
        for h, v in enumerate(graph.vertex_of):
            w = graph.vertex_of[perm[h]]
            if vmap.setdefault(v, w) != w:
                ok = False
                break
        if not ok or len(set(vmap.values())) != len(vmap) or len(vmap) != graph.num_vertices:
            continue
        if any(graph.genera[v] != graph.genera[w] for v, w in vmap.items()):
            continue
        out.add(tuple(perm))
    return out


def relabel(graph, rng):
    """Random isomorphic copy: permute vertices and half-edges, flip edges."""
    nv, nh = graph.num_vertices, len(graph.vertex_of)
    vp = list(range(nv))
    hp = list(range(nh))
    rng.shuffle(vp)
    rng.shuffle(hp)
    vertex_of = [0] * nh
    for h, v in enumerate(graph.vertex_of):
        vertex_of[hp[h]] = vp[v]
    genera = [0] * nv
    for v, gv in enumerate(graph.genera):
        genera[vp[v]] = gv
    edges = []
    for a, b in graph.edges:
        pair = (hp[a], hp[b])
        edges.append(pair if rng.random() < 0.5 else pair[::-1])
    rng.shuffle(edges)
    legs = sorted((hp[h], c) for h, c in graph.legs)
    return StableGraph(tuple(genera), tuple(vertex_of), tuple(edges), tuple(legs))


# -- enumeration ------------------------------------------------------------

@pytest.mark.parametrize(
    "g,colors,graphs,pairs",
    [
        ((0), (1, 1, 1), 1, 1),
        (1, (1,), 2, 3),
        (2, (), 7, 15),
        (1, (1, 1), 5, 8),
        (1, (2,), 5, 8),
        (1, (3,), 11, 18),
        (1, (1, 1, 1), 23, 40),
        (2, (1,), 16, 41),
    ],
)
def test_enumeration_counts(g, colors, graphs, pairs):
    assert len(enumerate_stable_graphs(g, colors)) == graphs
    assert len(pair_classes(g, colors)) == pairs


@pytest.mark.parametrize(
    "g,colors",
    [(0, (1, 1, 1, 1)), (0, (5,)), (0, (1, 1, 1, 1, 1)), (1, (1,)), (1, (1, 1)), (1, (2, 1)),
     (1, (1, 1, 1)), (2, ()), (2, (1,)), (2, (2,)), (3, ())],
)
def test_enumeration_matches_exhaustive_search(g, colors):
    ours = enumerate_stable_graphs(g, colors)
    keys = {_brute_key(*G.spec()) for G in ours}
    assert len(keys) == len(ours)
    assert keys == brute_force_graphs(g, colors)


def test_unstable_types_rejected():
    with pytest.raises(UnstableTypeError):
        enumerate_stable_graphs(0, (1, 1))
    with pytest.raises(UnstableTypeError):
        enumerate_stable_graphs(1, ())


def test_enumeration_is_deterministic():
    a = [G.dumps() for G in enumerate_stable_graphs(2, (1,))]
    b = [G.dumps() for G in enumerate_stable_graphs(2, (1,))]
    assert a == b


# -- canonical forms --------------------------------------------------------

SMALL = [G for t in [(2, ()), (1, (1, 1)), (1, (2, 1)), (0, (1, 1, 1, 1, 1)), (2, (1,))]
         for G in enumerate_stable_graphs(*t)]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, len(SMALL) - 1), st.integers(0, 10 ** 6))
def test_canonical_key_is_invariant_under_relabelling(i, seed):
    G = SMALL[i]
    H = relabel(G, random.Random(seed))
    H.validate()
    assert canonical_key(H) == canonical_key(G)
    assert is_isomorphic(G, H)
    C = canonicalize(H)
    assert canonicalize(C) == C
    assert C.spec() == canonicalize(G).spec()


def test_canonical_keys_separate_classes():
    for t in [(2, ()), (1, (1, 1, 1)), (2, (1,))]:
        graphs = enumerate_stable_graphs(*t)
        small = [G for G in graphs if G.num_edges <= 4]
        for a in range(len(small)):
            for b in range(a + 1, len(small)):
                assert _brute_key(*small[a].spec()) != _brute_key(*small[b].spec())
                assert not is_isomorphic(small[a], small[b])


def test_json_round_trip():
    for G in SMALL:
        assert StableGraph.from_json(G.dumps()).spec() == G.spec()
        assert StableGraph.from_json(G.to_json()) == G


def test_validation():
    with pytest.raises(ValueError):
        StableGraph.from_spec([0], [[1, 1]], [])
    with pytest.raises(ValueError):
        StableGraph.from_spec([0, 0], [[1, 1, 1], [1, 1, 1]], [])


# -- automorphisms ----------------------------------------------------------

def test_theta_has_twelve_automorphisms():
    assert automorphism_group(THETA).order == 12
    loop = StableGraph.from_spec([0], [[1]], [(0, 0)])
    assert automorphism_group(loop).order == 2


@pytest.mark.parametrize("t", [(2, ()), (1, (1, 1)), (1, (3,)), (1, (2, 1)), (0, (5,)), (1, (1, 1, 1))])
def test_automorphisms_match_brute_force(t):
    for G in enumerate_stable_graphs(*t):
        ours = {a.perm for a in automorphism_group(G)}
        assert ours == brute_force_automorphisms(G)


@pytest.mark.parametrize("t", [(2, ()), (1, (3,)), (2, (1,))])
def test_automorphism_groups_are_groups(t):
    for G in enumerate_stable_graphs(*t):
        aut = automorphism_group(G)
        perms = {a.perm for a in aut}
        assert aut.elements[0].is_identity()
        for a in aut:
            assert a.inverse().perm in perms
            for b in aut:
                assert a.compose(b).perm in perms


def test_pair_stabilizers_match_brute_force():
    for t in [(2, ()), (1, (1, 1)), (1, (3,))]:
        for G, sub, stab in pair_classes(*t):
            brute = {p for p in brute_force_automorphisms(G)
                     if {frozenset((p[a], p[b])) for a, b in (G.edges[e] for e in sub.edge_subset)}
                     == {frozenset(G.edges[e]) for e in sub.edge_subset}}
            assert {a.perm for a in stab} == brute
            assert stab.order == automorphism_group(G, sub.edge_subset).order


# -- spanning subgraphs and cutting ------------------------------------------

def test_spanning_subgraphs_of_theta():
    subs = connected_spanning_subgraphs(THETA)
    assert len(subs) == 7
    assert [s.betti for s in subs].count(0) == 3
    classes = subgraph_classes(THETA)
    assert [(len(s.edge_subset), stab.order) for s, stab in classes] == [(1, 4), (2, 4), (3, 12)]
    # orbit-stabilizer
    assert sum(12 // stab.order for _, stab in classes) == 7


def test_cut_graph():
    cut = cut_graph(THETA, [0])
    assert cut.num_edges == 1
    assert cut.color_profile() == (2 * 2,)
    assert cut.genus == 0
    cut.validate()
    legged = StableGraph.from_spec([0, 0], [[1, 2], [1]], [(0, 1), (0, 1)])
    c2 = cut_graph(legged, [1])
    assert c2.color_profile() == (2, 1, 2)
    assert cut_color_profile((1, 1), 1) == (1, 1, 2)
    assert cut_color_profile((1, 1), 0) == (1, 1)


def test_pairs_of_type_11():
    pairs = pair_classes(1, (1,))
    shapes = sorted((G.num_edges, len(sub.edge_subset), stab.order) for G, sub, stab in pairs)
    assert shapes == [(0, 0, 1), (1, 0, 2), (1, 1, 2)]

"""Compare the compiled kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

from jacstrata import _kernels_py as py_backend
from jacstrata.graphs import StableGraph, automorphism_group, enumerate_stable_graphs
from jacstrata.picard import pic_group

try:
    from jacstrata import _kernels as c_backend
except ImportError:
    c_backend = None


def wheel(k):
    # hub plus a k-cycle of rim vertices: large Picard group, dihedral symmetry
    edges = [(0, i) for i in range(1, k + 1)] + [(i, i % k + 1) for i in range(1, k + 1)]
    return StableGraph.from_spec([0] * (k + 1), [[] for _ in range(k + 1)], edges)


def workloads():
    graphs = enumerate_stable_graphs(2, (1, 1))
    adjs = []
    for gr in graphs:
        adj = gr.adjacency()
        cells = [list(range(gr.num_vertices))]
        adjs.append((gr.num_vertices, cells, adj))

    def canon(backend):
        for n, cells, adj in adjs:
            backend.canonical_order(n, cells, adj)

    def autos(backend):
        for n, cells, adj in adjs:
            backend.label_preserving_automorphisms(n, cells, adj)

    jobs = []
    for k in (4, 5, 6):
        gr = wheel(k)
        group = pic_group(gr)
        perms = [a.vertex_perm for a in automorphism_group(gr)]
        reps = group.representatives(0)
        jobs.append((reps, 7, tuple([1] * gr.num_vertices), perms, group.hnf, group.moduli))

    def equivariance(backend):
        for reps, scale, shift, perms, hnf, moduli in jobs:
            backend.affine_equivariance(reps, scale, shift, perms, hnf, moduli)

    def fixed(backend):
        for reps, _, _, perms, hnf, moduli in jobs:
            n = len(reps[0])
            heads = [r[: n - 1] for r in reps]
            for p in perms:
                images = []
                for r in reps:
                    out = [0] * n
                    for v in range(n):
                        out[p[v]] = r[v]
                    images.append(tuple(out[: n - 1]))
                backend.count_fixed_classes(heads, images, hnf, moduli)

    return [
        ("canonical_order (genus 2, 2 legs, one cell)", canon),
        ("label_preserving_automorphisms", autos),
        ("affine_equivariance (wheels W4..W6)", equivariance),
        ("count_fixed_classes (wheels W4..W6)", fixed),
    ]


def timeit(fn, backend, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn(backend)
        best = min(best, time.perf_counter() - t)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"{'kernel':48s} {'python':>10s} {'cython':>10s} {'speedup':>8s}")
    for name, fn in workloads():
        tp = timeit(fn, py_backend, args.repeat)
        if c_backend is None:
            print(f"{name:48s} {tp:10.4f} {'n/a':>10s}")
            continue
        tc = timeit(fn, c_backend, args.repeat)
        print(f"{name:48s} {tp:10.4f} {tc:10.4f} {tp / tc:7.1f}x")


if __name__ == "__main__":
    main()

"""Picard groups of graphs: multidegrees modulo twists.

Pic(G) = Z^V / (column span of the Laplacian).  Pic^0 is finite of order the
number of spanning trees; each Pic^d is a torsor under it.  Classes are
described two ways: Smith normal form coordinates (``PicClass``) and a
canonical representative multidegree obtained by reducing the first |V|-1
coordinates against a Hermite basis of the twist lattice.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import List, Sequence, Tuple

from . import kernels

Matrix = List[List[int]]
Multidegree = Tuple[int, ...]


@dataclass(frozen=True)
class Multigraph:
    """Vertices 0..n-1 and a tuple of edges given by endpoint pairs."""

    num_vertices: int
    edges: Tuple[Tuple[int, int], ...]

    def is_connected(self) -> bool:
        parent = list(range(self.num_vertices))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, w in self.edges:
            parent[find(u)] = find(w)
        return len({find(v) for v in range(self.num_vertices)}) <= 1


def as_multigraph(obj) -> Multigraph:
    if isinstance(obj, Multigraph):
        return obj
    if hasattr(obj, "multigraph"):
        return obj.multigraph()
    raise TypeError(f"cannot read a multigraph from {type(obj).__name__}")


# -- integer linear algebra ----------------------------------------------

def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if not a:
        return []
    cols = len(b[0]) if b else 0
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(cols)] for i in range(len(a))]


def matvec(a: Matrix, x: Sequence[int]) -> List[int]:
    return [sum(r * y for r, y in zip(row, x)) for row in a]


def determinant(a: Matrix) -> int:
    """Exact integer determinant (fraction-free Bareiss elimination)."""
    n = len(a)
    if n == 0:
        return 1
    m = [row[:] for row in a]
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def smith_normal_form(M: Matrix) -> Tuple[Matrix, Matrix, Matrix]:
    """Return (D, U, V) with U*M*V = D diagonal, d_i | d_{i+1}, U and V unimodular."""
    D, U, V, _ = _snf_with_inverse(M)
    return D, U, V


def _snf_with_inverse(M: Matrix):
    rows = len(M)
    cols = len(M[0]) if rows else 0
    A = [list(map(int, r)) for r in M]
    U, Uinv, V = identity(rows), identity(rows), identity(cols)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]
        for r in Uinv:
            r[i], r[j] = r[j], r[i]

    def add_row(src, dst, c):
        # row_dst += c * row_src
        for M_ in (A, U):
            M_[dst] = [x + c * y for x, y in zip(M_[dst], M_[src])]
        for r in Uinv:
            r[src] -= c * r[dst]

    def negate_row(i):
        A[i] = [-x for x in A[i]]
        U[i] = [-x for x in U[i]]
        for r in Uinv:
            r[i] = -r[i]

    def swap_cols(i, j):
        for M_ in (A, V):
            for r in M_:
                r[i], r[j] = r[j], r[i]

    def add_col(src, dst, c):
        for M_ in (A, V):
            for r in M_:
                r[dst] += c * r[src]

    t = 0
    while t < min(rows, cols):
        # pivot: smallest nonzero absolute value in the remaining block
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            changed = False
            for i in range(t + 1, rows):
                if A[i][t]:
                    q = A[i][t] // A[t][t]
                    add_row(t, i, -q)
                    if A[i][t]:
                        swap_rows(t, i)
                        changed = True
            for j in range(t + 1, cols):
                if A[t][j]:
                    q = A[t][j] // A[t][t]
                    add_col(t, j, -q)
                    if A[t][j]:
                        swap_cols(t, j)
                        changed = True
            if changed:
                continue
            # divisibility: the pivot must divide the rest of the block
            bad = None
            for i in range(t + 1, rows):
                for j in range(t + 1, cols):
                    if A[i][j] % A[t][t]:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(bad, t, 1)
        if A[t][t] < 0:
            negate_row(t)
        t += 1
    return A, U, V, Uinv


def hermite_rows(rows: Matrix, width: int) -> Matrix:
    """Upper-triangular basis (positive pivots, reduced above) of a full-rank row lattice."""
    A = [list(r[:width]) for r in rows]
    out: Matrix = []
    for col in range(width):
        live = [r for r in A if r[col]]
        rest = [r for r in A if not r[col]]
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            piv = live[0]
            nxt = [piv]
            for r in live[1:]:
                q = r[col] // piv[col]
                r = [x - q * y for x, y in zip(r, piv)]
                (nxt if r[col] else rest).append(r)
            live = nxt
        if not live:
            raise ValueError("twist lattice is not of full rank")
        piv = live[0]
        if piv[col] < 0:
            piv = [-x for x in piv]
        out.append(piv)
        A = rest
    for i in range(len(out)):
        for k in range(i):
            q = out[k][i] // out[i][i]
            if q:
                out[k] = [x - q * y for x, y in zip(out[k], out[i])]
    return out


# -- Picard groups ---------------------------------------------------------

def twist_lattice(graph) -> Matrix:
    """Graph Laplacian; loops contribute nothing."""
    mg = as_multigraph(graph)
    n = mg.num_vertices
    lap = [[0] * n for _ in range(n)]
    for u, w in mg.edges:
        if u == w:
            continue
        lap[u][u] += 1
        lap[w][w] += 1
        lap[u][w] -= 1
        lap[w][u] -= 1
    return lap


def spanning_tree_count(graph) -> int:
    """Matrix-tree theorem (used only by diagnostics; tests use a brute-force count)."""
    lap = twist_lattice(graph)
    n = len(lap)
    return determinant([row[: n - 1] for row in lap[: n - 1]]) if n > 1 else 1


@dataclass(frozen=True)
class PicClass:
    group: "PicardGroup" = field(compare=False, repr=False)
    coords: Tuple[int, ...]
    degree: int

    def __hash__(self):
        return hash((self.coords, self.degree))

    def representative(self) -> Multidegree:
        return self.group.section(self.coords, self.degree)


class PicardGroup:
    def __init__(self, graph):
        mg = as_multigraph(graph)
        if not mg.is_connected():
            raise ValueError("Picard group needs a connected graph")
        self.graph = graph
        self.multigraph = mg
        self.n = mg.num_vertices
        self.laplacian = twist_lattice(mg)
        D, U, V, Uinv = _snf_with_inverse(self.laplacian)
        self.snf = (D, U, V)
        self._Uinv = Uinv
        self.diagonal = [D[i][i] for i in range(self.n)]
        zeros = [i for i, d in enumerate(self.diagonal) if d == 0]
        if len(zeros) != 1:
            raise AssertionError("connected graph Laplacian must have corank one")
        self._free = zeros[0]
        self._free_sign = U[self._free][0]
        if any(x != self._free_sign for x in U[self._free]):
            raise AssertionError("cokernel of the Laplacian is not detected by the total degree")
        self.invariant_factors = tuple(d for d in self.diagonal if d > 1)
        # Hermite basis of the twist lattice on the first n-1 coordinates
        w = self.n - 1
        self.hnf = hermite_rows(self.laplacian, w) if w else []
        self.moduli = tuple(self.hnf[i][i] for i in range(w))

    @property
    def order(self) -> int:
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out

    # projection / section ---------------------------------------------
    def project(self, m: Sequence[int]) -> PicClass:
        y = matvec(self.snf[1], m)
        coords = tuple(y[i] % self.diagonal[i] for i in range(self.n) if self.diagonal[i] > 1)
        return PicClass(self, coords, sum(m))

    def section(self, coords: Sequence[int], degree: int) -> Multidegree:
        y = [0] * self.n
        it = iter(coords)
        for i, d in enumerate(self.diagonal):
            if d > 1:
                y[i] = next(it)
        y[self._free] = self._free_sign * degree
        return self.canonical(matvec(self._Uinv, y))

    def canonical(self, m: Sequence[int]) -> Multidegree:
        """Canonical representative of the class of m."""
        if self.n == 1:
            return (m[0],)
        head = kernels.reduce_vector(tuple(m[: self.n - 1]), self.hnf, self.moduli)
        return tuple(head) + (sum(m) - sum(head),)

    def classes(self, degree: int) -> List[PicClass]:
        return [self.project(m) for m in self.representatives(degree)]

    def representatives(self, degree: int) -> List[Multidegree]:
        if self.n == 1:
            return [(degree,)]
        out = []
        for head in product(*(range(self.hnf[i][i]) for i in range(self.n - 1))):
            # reduced vectors are exactly those with 0 <= x_i < pivot_i
            out.append(tuple(head) + (degree - sum(head),))
        return sorted(out)

    def equivalent(self, m1: Sequence[int], m2: Sequence[int]) -> bool:
        if sum(m1) != sum(m2):
            return False
        diff = [a - b for a, b in zip(m1, m2)]
        y = matvec(self.snf[1], diff)
        return all(
            (y[i] == 0) if d == 0 else (y[i] % d == 0) for i, d in enumerate(self.diagonal)
        )


@lru_cache(maxsize=4096)
def _pic_group_cached(mg: Multigraph) -> PicardGroup:
    return PicardGroup(mg)


def pic_group(graph) -> PicardGroup:
    """Picard group of a connected graph; memoized on the underlying multigraph."""
    return _pic_group_cached(as_multigraph(graph))


def are_equivalent(graph, m1, m2) -> bool:
    return pic_group(graph).equivalent(m1, m2)


def torsor_representatives(graph, d: int) -> List[Multidegree]:
    return pic_group(graph).representatives(d)


def permute_multidegree(vertex_perm: Sequence[int], m: Sequence[int]) -> Multidegree:
    """(phi . m)(phi(v)) = m(v)."""
    out = [0] * len(m)
    for v, x in enumerate(m):
        out[vertex_perm[v]] = x
    return tuple(out)


def _vertex_perm(phi) -> Sequence[int]:
    return phi.vertex_perm if hasattr(phi, "vertex_perm") else phi


def aut_action(group: PicardGroup, phi, c: PicClass) -> PicClass:
    return group.project(permute_multidegree(_vertex_perm(phi), c.representative()))


def fixed_class_count(group: PicardGroup, phi, degree: int) -> int:
    reps = group.representatives(degree)
    perm = _vertex_perm(phi)
    if group.n == 1:
        return len(reps)
    images = [permute_multidegree(perm, m)[: group.n - 1] for m in reps]
    heads = [m[: group.n - 1] for m in reps]
    return kernels.count_fixed_classes(heads, images, group.hnf, group.moduli)

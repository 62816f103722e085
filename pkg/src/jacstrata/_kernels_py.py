"""Pure-Python versions of the hot kernels (reference and fallback)."""

from itertools import permutations, product


def canonical_order(n, cells, adj):
    """Vertex order minimizing the row-major upper triangle of ``adj``.

    ``cells`` is a list of vertex lists; the order keeps cells contiguous and
    only permutes inside each cell.  ``adj`` is an n x n list of ints.
    Returns ``(order, code)`` where ``order[i]`` is the old index of new vertex i.
    """
    best_order = None
    best_code = None
    for choice in product(*(permutations(c) for c in cells)):
        order = [v for block in choice for v in block]
        code = []
        for i in range(n):
            row = adj[order[i]]
            for j in range(i, n):
                code.append(row[order[j]])
        if best_code is None or code < best_code:
            best_code = code
            best_order = order
    return best_order, tuple(best_code)


def label_preserving_automorphisms(n, cells, adj):
    """All vertex permutations preserving cells and the matrix ``adj``.

    Returns a list of tuples ``perm`` with ``perm[v]`` the image of v.
    """
    out = []
    for choice in product(*(permutations(c) for c in cells)):
        perm = [0] * n
        for block, image in zip(cells, choice):
            for v, w in zip(block, image):
                perm[v] = w
        ok = True
        for i in range(n):
            row = adj[i]
            target = adj[perm[i]]
            for j in range(n):
                if row[j] != target[perm[j]]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(tuple(perm))
    return out


def count_fixed_classes(reps, images, lattice_rows, moduli):
    """Number of i with reduce(images[i]) == reduce(reps[i]).

    Classes are reduced through ``lattice_rows`` (an upper-triangular integer
    basis of the twist lattice restricted to the first n-1 coordinates,
    with positive pivots listed in ``moduli``).
    """
    count = 0
    for rep, img in zip(reps, images):
        if reduce_vector(img, lattice_rows, moduli) == reduce_vector(rep, lattice_rows, moduli):
            count += 1
    return count


def reduce_vector(vec, lattice_rows, moduli):
    """Reduce ``vec`` (first n-1 coordinates) modulo an upper-triangular basis."""
    v = list(vec)
    for i, row in enumerate(lattice_rows):
        m = moduli[i]
        q = v[i] // m
        if q:
            for j in range(i, len(v)):
                v[j] -= q * row[j]
    return tuple(v)


def affine_equivariance(reps, scale, shift, perms, lattice_rows, moduli):
    """Images of canonical ``reps`` under m -> canon(scale*m + shift), and for
    each vertex permutation whether the map commutes with it.

    ``perms[k][v]`` is the image of vertex v; permutations act by
    (perm . m)[perm[v]] = m[v].
    """
    n = len(shift)

    def canon(m):
        head = reduce_vector(m[: n - 1], lattice_rows, moduli)
        return tuple(head) + (sum(m) - sum(head),)

    def act(perm, m):
        out = [0] * n
        for v in range(n):
            out[perm[v]] = m[v]
        return out

    table = {}
    for r in reps:
        table[tuple(r)] = canon([scale * x + s for x, s in zip(r, shift)])
    images = [table[tuple(r)] for r in reps]
    commutes = []
    for perm in perms:
        ok = True
        for r in reps:
            if canon(act(perm, table[tuple(r)])) != table[canon(act(perm, r))]:
                ok = False
                break
        commutes.append(ok)
    return images, commutes

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; same signatures and results as _kernels_py."""

from libc.stdlib cimport malloc, free


cdef inline bint _next_perm(int* a, int n):
    # lexicographic next permutation in place; False when wrapped around
    cdef int i = n - 2, j, t
    while i >= 0 and a[i] >= a[i + 1]:
        i -= 1
    if i < 0:
        # reverse back to the first permutation
        j = 0
        i = n - 1
        while j < i:
            t = a[j]; a[j] = a[i]; a[i] = t
            j += 1; i -= 1
        return False
    j = n - 1
    while a[j] <= a[i]:
        j -= 1
    t = a[i]; a[i] = a[j]; a[j] = t
    i += 1
    j = n - 1
    while i < j:
        t = a[i]; a[i] = a[j]; a[j] = t
        i += 1; j -= 1
    return True


cdef class _CellOdometer:
    """Cartesian product of the permutations of each cell, in itertools order."""
    cdef int n
    cdef int ncells
    cdef int* idx       # per position: index within its cell (permuted)
    cdef int* start     # per cell: first position
    cdef int* size      # per cell: size
    cdef int* members   # per position: sorted cell member list, flattened

    def __cinit__(self, int n, cells):
        self.n = n
        self.ncells = len(cells)
        self.idx = <int*> malloc(max(n, 1) * sizeof(int))
        self.members = <int*> malloc(max(n, 1) * sizeof(int))
        self.start = <int*> malloc(max(self.ncells, 1) * sizeof(int))
        self.size = <int*> malloc(max(self.ncells, 1) * sizeof(int))
        cdef int pos = 0, c, k
        for c in range(self.ncells):
            cell = cells[c]
            self.start[c] = pos
            self.size[c] = len(cell)
            for k in range(len(cell)):
                self.members[pos] = cell[k]
                self.idx[pos] = k
                pos += 1

    def __dealloc__(self):
        free(self.idx)
        free(self.members)
        free(self.start)
        free(self.size)

    cdef bint advance(self):
        # last cell varies fastest, like itertools.product
        cdef int c = self.ncells - 1
        while c >= 0:
            if _next_perm(self.idx + self.start[c], self.size[c]):
                return True
            c -= 1
        return False

    cdef inline int vertex_at(self, int pos):
        # vertex placed at position pos of the current order
        cdef int c = 0
        while c + 1 < self.ncells and self.start[c + 1] <= pos:
            c += 1
        return self.members[self.start[c] + self.idx[pos]]


cdef long long* _matrix(int n, adj):
    cdef long long* a = <long long*> malloc(max(n * n, 1) * sizeof(long long))
    cdef int i, j
    for i in range(n):
        row = adj[i]
        for j in range(n):
            a[i * n + j] = row[j]
    return a


def canonical_order(int n, cells, adj):
    cdef _CellOdometer od = _CellOdometer(n, cells)
    cdef long long* a = _matrix(n, adj)
    cdef int m = n * (n + 1) // 2
    cdef long long* best = <long long*> malloc(max(m, 1) * sizeof(long long))
    cdef int* order = <int*> malloc(max(n, 1) * sizeof(int))
    cdef int* best_order = <int*> malloc(max(n, 1) * sizeof(int))
    cdef int i, j, k, cmp
    cdef bint have = False
    cdef long long x
    try:
        while True:
            for i in range(n):
                order[i] = od.vertex_at(i)
            # compare lazily against the best code
            k = 0
            cmp = 0 if have else -1
            for i in range(n):
                for j in range(i, n):
                    x = a[order[i] * n + order[j]]
                    if cmp == 0:
                        if x < best[k]:
                            cmp = -1
                        elif x > best[k]:
                            cmp = 1
                            break
                    if cmp == -1:
                        best[k] = x
                    k += 1
                if cmp == 1:
                    break
            if cmp == -1:
                have = True
                for i in range(n):
                    best_order[i] = order[i]
            if not od.advance():
                break
        return [best_order[i] for i in range(n)], tuple(best[k] for k in range(m))
    finally:
        free(a)
        free(best)
        free(order)
        free(best_order)


def label_preserving_automorphisms(int n, cells, adj):
    cdef _CellOdometer od = _CellOdometer(n, cells)
    cdef long long* a = _matrix(n, adj)
    cdef int* perm = <int*> malloc(max(n, 1) * sizeof(int))
    cdef int c, k, i, j, pos
    cdef bint ok
    out = []
    try:
        while True:
            for c in range(od.ncells):
                for k in range(od.size[c]):
                    pos = od.start[c] + k
                    perm[od.members[pos]] = od.members[od.start[c] + od.idx[pos]]
            ok = True
            for i in range(n):
                for j in range(n):
                    if a[i * n + j] != a[perm[i] * n + perm[j]]:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                out.append(tuple(perm[i] for i in range(n)))
            if not od.advance():
                break
        return out
    finally:
        free(a)
        free(perm)


cdef inline long long _floordiv(long long a, long long b):
    cdef long long q = a / b
    if (a % b != 0) and ((a < 0) != (b < 0)):
        q -= 1
    return q


cdef void _reduce(long long* v, int w, long long* rows, long long* moduli):
    cdef int i, j
    cdef long long q
    for i in range(w):
        q = _floordiv(v[i], moduli[i])
        if q:
            for j in range(i, w):
                v[j] -= q * rows[i * w + j]


def reduce_vector(vec, lattice_rows, moduli):
    cdef int w = len(vec)
    cdef long long* v = <long long*> malloc(max(w, 1) * sizeof(long long))
    cdef long long* rows = <long long*> malloc(max(w * w, 1) * sizeof(long long))
    cdef long long* mods = <long long*> malloc(max(w, 1) * sizeof(long long))
    cdef int i, j
    try:
        for i in range(w):
            v[i] = vec[i]
            mods[i] = moduli[i]
            for j in range(w):
                rows[i * w + j] = lattice_rows[i][j]
        _reduce(v, w, rows, mods)
        return tuple(v[i] for i in range(w))
    finally:
        free(v)
        free(rows)
        free(mods)


def count_fixed_classes(reps, images, lattice_rows, moduli):
    cdef int w = len(moduli)
    cdef long long* a = <long long*> malloc(max(w, 1) * sizeof(long long))
    cdef long long* b = <long long*> malloc(max(w, 1) * sizeof(long long))
    cdef long long* rows = <long long*> malloc(max(w * w, 1) * sizeof(long long))
    cdef long long* mods = <long long*> malloc(max(w, 1) * sizeof(long long))
    cdef int i, j, count = 0
    cdef bint same
    try:
        for i in range(w):
            mods[i] = moduli[i]
            for j in range(w):
                rows[i * w + j] = lattice_rows[i][j]
        for rep, img in zip(reps, images):
            for i in range(w):
                a[i] = rep[i]
                b[i] = img[i]
            _reduce(a, w, rows, mods)
            _reduce(b, w, rows, mods)
            same = True
            for i in range(w):
                if a[i] != b[i]:
                    same = False
                    break
            count += same
        return count
    finally:
        free(a)
        free(b)
        free(rows)
        free(mods)


cdef void _canon(long long* m, int n, long long* rows, long long* mods):
    # reduce the head in place and fix the last coordinate from the total
    cdef long long total = 0, head = 0
    cdef int i
    for i in range(n):
        total += m[i]
    _reduce(m, n - 1, rows, mods)
    for i in range(n - 1):
        head += m[i]
    m[n - 1] = total - head


cdef inline long long _box_index(long long* m, int w, long long* mods):
    cdef long long idx = 0
    cdef int i
    for i in range(w):
        idx = idx * mods[i] + m[i]
    return idx


def affine_equivariance(reps, long long scale, shift, perms, lattice_rows, moduli):
    cdef int n = len(shift), w = n - 1, R = len(reps), P = len(perms)
    cdef int i, j, k, v
    cdef long long box = 1
    for i in range(w):
        box *= moduli[i]
    if box != R:
        raise ValueError("representatives do not fill the reduction box")
    cdef long long* rows = <long long*> malloc(max(w * w, 1) * sizeof(long long))
    cdef long long* mods = <long long*> malloc(max(w, 1) * sizeof(long long))
    cdef long long* src = <long long*> malloc(max(R * n, 1) * sizeof(long long))
    cdef long long* img = <long long*> malloc(max(R * n, 1) * sizeof(long long))
    cdef int* slot = <int*> malloc(max(box, 1) * sizeof(int))
    cdef int* perm = <int*> malloc(max(n, 1) * sizeof(int))
    cdef long long* tmp = <long long*> malloc(max(n, 1) * sizeof(long long))
    cdef long long* tmp2 = <long long*> malloc(max(n, 1) * sizeof(long long))
    cdef long long* target
    cdef bint ok
    try:
        for i in range(w):
            mods[i] = moduli[i]
            for j in range(w):
                rows[i * w + j] = lattice_rows[i][j]
        for k in range(R):
            r = reps[k]
            for v in range(n):
                src[k * n + v] = r[v]
                img[k * n + v] = scale * src[k * n + v] + <long long> shift[v]
            _canon(img + k * n, n, rows, mods)
            slot[_box_index(src + k * n, w, mods)] = k
        images = [tuple(img[k * n + v] for v in range(n)) for k in range(R)]
        commutes = []
        for i in range(P):
            p = perms[i]
            for v in range(n):
                perm[v] = p[v]
            ok = True
            for k in range(R):
                for v in range(n):
                    tmp[perm[v]] = img[k * n + v]
                    tmp2[perm[v]] = src[k * n + v]
                _canon(tmp, n, rows, mods)
                _canon(tmp2, n, rows, mods)
                target = img + slot[_box_index(tmp2, w, mods)] * n
                for v in range(n):
                    if tmp[v] != target[v]:
                        ok = False
                        break
                if not ok:
                    break
            commutes.append(ok)
        return images, commutes
    finally:
        free(rows); free(mods); free(src); free(img)
        free(slot); free(perm); free(tmp); free(tmp2)

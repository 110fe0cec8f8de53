# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops.  Semantics match ``_kernels_py`` exactly."""

import numpy as np

cimport numpy as cnp
from libc.stdlib cimport calloc, free
from libc.string cimport memcpy

cnp.import_array()


def cut_scan(int n, nbr_ptr, nbr_idx, int threshold, bint half):
    cdef int bits = n - 1 if half else n
    if n < 2 or bits < 1:
        return -1, 0, []
    if n > 62:
        raise ValueError("cut_scan supports at most 62 vertices")
    cdef int[::1] ptr = np.ascontiguousarray(nbr_ptr, dtype=np.intc)
    cdef int[::1] idx = np.ascontiguousarray(nbr_idx, dtype=np.intc)
    cdef unsigned long long full = (1ULL << n) - 1
    cdef unsigned long long mask = 0, bit, i, end = 1ULL << bits
    cdef unsigned long long min_mask = 0
    cdef long d = 0, min_d = -1
    cdef int v, j, inside, dv
    small = []
    i = 1
    while i < end:
        v = 0
        while not ((i >> v) & 1ULL):
            v += 1
        bit = 1ULL << v
        inside = 0
        for j in range(ptr[v], ptr[v + 1]):
            if (mask >> idx[j]) & 1ULL:
                inside += 1
        dv = ptr[v + 1] - ptr[v]
        if mask & bit:
            d -= dv - 2 * inside
        else:
            d += dv - 2 * inside
        mask ^= bit
        i += 1
        if mask == full:
            continue
        if min_d < 0 or d < min_d:
            min_d = d
            min_mask = mask
        if d <= threshold:
            small.append((int(mask), int(d)))
    return int(min_d), int(min_mask), small


def coset_scan(start, cyc_ptr, cyc_edge, cyc_neg, int order, add, neg, diff,
               long long limit, int stop_at):
    cdef int[::1] s = np.ascontiguousarray(start, dtype=np.intc)
    cdef int[::1] cp = np.ascontiguousarray(cyc_ptr, dtype=np.intc)
    cdef int[::1] ce = np.ascontiguousarray(cyc_edge, dtype=np.intc)
    cdef int[::1] cn = np.ascontiguousarray(cyc_neg, dtype=np.intc)
    cdef int[::1] addt = np.ascontiguousarray(add, dtype=np.intc)
    cdef int[::1] negt = np.ascontiguousarray(neg, dtype=np.intc)
    cdef int[::1] difft = np.ascontiguousarray(diff, dtype=np.intc)
    cdef int m = s.shape[0]
    cdef int ndigits = cp.shape[0] - 1
    cdef cnp.ndarray[cnp.int64_t, ndim=1] hist_arr = np.zeros(m + 1, dtype=np.int64)
    cdef cnp.ndarray[int, ndim=1] best_arr = np.array(s, dtype=np.intc)
    cdef cnp.int64_t[::1] hist = hist_arr
    cdef int[::1] best = best_arr
    cdef int* values = <int*> calloc(m + 1, sizeof(int))
    cdef int* counter = <int*> calloc(ndigits + 1, sizeof(int))
    cdef int* coeff = <int*> calloc(ndigits + 1, sizeof(int))
    if values == NULL or counter == NULL or coeff == NULL:
        free(values); free(counter); free(coeff)
        raise MemoryError()
    cdef int e, k, t, c, delta, ndelta, old, new, supp = 0, best_supp, top = order - 1
    cdef long long count = 1
    cdef bint hit = False, smaller
    for e in range(m):
        values[e] = s[e]
        if s[e] != 0:
            supp += 1
    hist[supp] += 1
    best_supp = supp
    if stop_at >= 0 and supp >= stop_at:
        hit = True
        limit = 0
    try:
        with nogil:
            while count < limit:
                t = 0
                while counter[t] == top:
                    counter[t] = 0
                    t += 1
                counter[t] += 1
                c = coeff[t]
                delta = difft[c]
                ndelta = negt[delta]
                coeff[t] = c + 1 if c < top else 0
                for k in range(cp[t], cp[t + 1]):
                    e = ce[k]
                    old = values[e]
                    if cn[k]:
                        new = addt[old * order + ndelta]
                    else:
                        new = addt[old * order + delta]
                    values[e] = new
                    if old == 0:
                        if new != 0:
                            supp += 1
                    elif new == 0:
                        supp -= 1
                count += 1
                hist[supp] += 1
                if stop_at >= 0:
                    if supp >= stop_at:
                        best_supp = supp
                        memcpy(&best[0], values, m * sizeof(int))
                        hit = True
                        break
                    if supp > best_supp:
                        best_supp = supp
                        memcpy(&best[0], values, m * sizeof(int))
                    continue
                if supp > best_supp:
                    best_supp = supp
                    memcpy(&best[0], values, m * sizeof(int))
                elif supp == best_supp:
                    smaller = False
                    for e in range(m):
                        if values[e] != best[e]:
                            smaller = values[e] < best[e]
                            break
                    if smaller:
                        memcpy(&best[0], values, m * sizeof(int))
    finally:
        free(values)
        free(counter)
        free(coeff)
    return best_supp, [int(x) for x in best_arr], [int(x) for x in hist_arr], count, hit

"""Pure-Python implementations of the hot loops.

These mirror ``_kernels.pyx`` line for line and are used whenever the
compiled extension is unavailable (or ``FLOWFORGE_PURE=1`` is set).
"""

from __future__ import annotations


def cut_scan(n, nbr_ptr, nbr_idx, threshold, half):
    """Walk every vertex subset in Gray-code order, tracking d(X).

    Returns ``(min_d, min_mask, small)`` where ``small`` lists ``(mask, d)``
    for each nonempty proper subset with ``d <= threshold``.  With ``half``
    set, vertex ``n - 1`` is never placed in X, so each cut appears once.
    """
    bits = n - 1 if half else n
    if n < 2 or bits < 1:
        return -1, 0, []
    full = (1 << n) - 1
    deg = [nbr_ptr[v + 1] - nbr_ptr[v] for v in range(n)]
    mask = 0
    d = 0
    min_d = -1
    min_mask = 0
    small = []
    for i in range(1, 1 << bits):
        v = (i & -i).bit_length() - 1
        bit = 1 << v
        inside = 0
        for j in range(nbr_ptr[v], nbr_ptr[v + 1]):
            if mask >> nbr_idx[j] & 1:
                inside += 1
        if mask & bit:
            d -= deg[v] - 2 * inside
        else:
            d += deg[v] - 2 * inside
        mask ^= bit
        if mask == full:
            continue
        if min_d < 0 or d < min_d:
            min_d = d
            min_mask = mask
        if d <= threshold:
            small.append((mask, d))
    return min_d, min_mask, small


def coset_scan(start, cyc_ptr, cyc_edge, cyc_neg, order, add, neg, diff, limit, stop_at):
    """Enumerate ``limit`` labellings of a coset in modular Gray-code order.

    ``start`` holds encoded group elements per edge.  Digit ``j`` is the
    coefficient of fundamental cycle ``j``; its entries are the slice
    ``cyc_ptr[j]:cyc_ptr[j+1]`` of ``cyc_edge`` / ``cyc_neg`` (``cyc_neg`` is 1
    where the cycle traverses the edge backwards).  Each step advances one
    coefficient from code ``c`` to ``c + 1`` and adds ``diff[c]`` (or its
    inverse) along that cycle.

    Returns ``(best_support, best_values, histogram, count, hit)``.  Ties on
    support resolve to the lexicographically smallest value vector.  When
    ``stop_at >= 0`` the scan stops at the first labelling with at least that
    support and ``hit`` is set.
    """
    m = len(start)
    ndigits = len(cyc_ptr) - 1
    values = list(start)
    supp = sum(1 for x in values if x)
    hist = [0] * (m + 1)
    hist[supp] += 1
    best = list(values)
    best_supp = supp
    count = 1
    if stop_at >= 0 and supp >= stop_at:
        return best_supp, best, hist, count, True
    counter = [0] * ndigits
    coeff = [0] * ndigits
    top = order - 1
    while count < limit:
        t = 0
        while counter[t] == top:
            counter[t] = 0
            t += 1
        counter[t] += 1
        c = coeff[t]
        delta = diff[c]
        ndelta = neg[delta]
        coeff[t] = c + 1 if c < top else 0
        for k in range(cyc_ptr[t], cyc_ptr[t + 1]):
            e = cyc_edge[k]
            old = values[e]
            new = add[old * order + (ndelta if cyc_neg[k] else delta)]
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
                return supp, list(values), hist, count, True
            if supp > best_supp:
                best_supp = supp
                best = list(values)
            continue
        if supp > best_supp:
            best_supp = supp
            best = list(values)
        elif supp == best_supp and values < best:
            best = list(values)
    return best_supp, best, hist, count, False

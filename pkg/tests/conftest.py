import itertools

import numpy as np
import pytest
from hypothesis import strategies as st

from flowforge.flows import Z3
from flowforge.graph import MultiGraph


@st.composite
def multigraphs(draw, min_n=1, max_n=6, max_m=9, loops=True, connected=False):
    n = draw(st.integers(min_n, max_n))
    pair = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
    if not loops:
        pair = pair.filter(lambda uv: uv[0] != uv[1])
    edges = draw(st.lists(pair, max_size=max_m)) if n > 1 or loops else []
    if connected:
        # a spanning path keeps the draw connected
        edges = [(i, i + 1) for i in range(n - 1)] + edges[: max(0, max_m - n + 1)]
    return MultiGraph(range(n), edges)


def brute_force_best(g, o, mu, group=Z3):
    """Largest support over every labelling with boundary mu; -1 if none.

    Enumerates all |group|^m labellings factor by factor with an incidence
    matrix, independent of the cycle-space machinery under test.
    """
    if g.m == 0:
        return 0 if all(group.is_zero(mu[v]) for v in g.vertices) else -1
    inc = np.zeros((g.n, g.m), dtype=np.int64)
    col = {v: i for i, v in enumerate(g.vertices)}
    for j, e in enumerate(g.edge_ids):
        t, h = o[e]
        if t != h:
            inc[col[t], j] += 1
            inc[col[h], j] -= 1
    masks = []
    for i, q in enumerate(group.orders):
        rows = np.array(list(itertools.product(range(q), repeat=g.m)), dtype=np.int64).reshape(-1, g.m)
        want = np.array([(mu[v] if len(group.orders) == 1 else mu[v][i]) % q for v in g.vertices])
        ok = np.all((rows @ inc.T - want) % q == 0, axis=1)
        masks.append(rows[ok] != 0)
    if any(len(m) == 0 for m in masks):
        return -1
    best = masks[0]
    for nxt in masks[1:]:
        best = (best[:, None, :] | nxt[None, :, :]).reshape(-1, g.m)
    return int(best.sum(axis=1).max())


@pytest.fixture
def theta():
    return MultiGraph([0, 1], [(0, 1)] * 3)

"""Multigraphs with loops and parallel edges, cuts, connectivity and surgery.

Graph values are immutable.  Every edge carries an integer id that survives
deletion of other edges; operations that build new edges (suppression,
subdivision) return explicit id maps.
"""

from __future__ import annotations

import itertools
from collections import deque
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from types import MappingProxyType

from . import kernels

# Above this many vertices the connectivity predicates switch from
# exhaustive cut enumeration to max-flow / edge-subset search.
EXHAUSTIVE_LIMIT = 20


class GraphError(ValueError):
    """Unknown vertex/edge ids or structurally invalid requests."""


class PreconditionError(GraphError):
    """Input violates an operation's stated hypothesis."""


class MultiGraph:
    """An undirected multigraph; ``edges`` maps edge id -> (u, v).

    The stored endpoint order doubles as the default orientation (u -> v).
    """

    __slots__ = ("_vertices", "_vset", "_edges", "_inc", "_deg", "_hash")

    def __init__(self, vertices: Iterable[int] = (), edges=()):
        if isinstance(edges, Mapping):
            items = sorted((int(e), (u, v)) for e, (u, v) in edges.items())
        else:
            items = [(i, (u, v)) for i, (u, v) in enumerate(edges)]
        vset = set(vertices)
        for _, (u, v) in items:
            vset.add(u)
            vset.add(v)
        self._vertices = tuple(sorted(vset))
        self._vset = frozenset(vset)
        self._edges = MappingProxyType(dict(items))
        inc = {v: [] for v in self._vertices}
        deg = dict.fromkeys(self._vertices, 0)
        for e, (u, v) in items:
            inc[u].append(e)
            deg[u] += 1
            if v != u:
                inc[v].append(e)
            deg[v] += 1
        self._inc = {v: tuple(es) for v, es in inc.items()}
        self._deg = deg
        self._hash = None

    # -- basic queries -------------------------------------------------

    @property
    def vertices(self) -> tuple:
        return self._vertices

    @property
    def edges(self) -> Mapping[int, tuple]:
        return self._edges

    @property
    def n(self) -> int:
        return len(self._vertices)

    @property
    def m(self) -> int:
        return len(self._edges)

    @property
    def edge_ids(self) -> tuple:
        return tuple(self._edges)

    def has_vertex(self, v) -> bool:
        return v in self._vset

    def has_edge(self, e) -> bool:
        return e in self._edges

    def endpoints(self, e) -> tuple:
        try:
            return self._edges[e]
        except KeyError:
            raise GraphError(f"unknown edge {e!r}") from None

    def is_loop(self, e) -> bool:
        u, v = self.endpoints(e)
        return u == v

    def degree(self, v) -> int:
        try:
            return self._deg[v]
        except KeyError:
            raise GraphError(f"unknown vertex {v!r}") from None

    def degrees(self) -> dict:
        return dict(self._deg)

    def incident(self, v) -> tuple:
        """Edge ids at ``v`` in id order; a loop is listed once."""
        try:
            return self._inc[v]
        except KeyError:
            raise GraphError(f"unknown vertex {v!r}") from None

    def other_end(self, e, v):
        u, w = self.endpoints(e)
        if v == u:
            return w
        if v == w:
            return u
        raise GraphError(f"vertex {v!r} is not an end of edge {e!r}")

    def neighbors(self, v) -> list:
        return sorted({self.other_end(e, v) for e in self.incident(v)})

    def edges_between(self, u, v) -> list:
        return [e for e in self.incident(u) if self.other_end(e, u) == v]

    def orientation(self) -> Orientation:
        return Orientation(dict(self._edges))

    # -- comparisons ---------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, MultiGraph):
            return NotImplemented
        return self._vertices == other._vertices and dict(self._edges) == dict(other._edges)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._vertices, tuple(self._edges.items())))
        return self._hash

    def __repr__(self):
        return f"MultiGraph(n={self.n}, m={self.m})"

    # -- derived graphs --------------------------------------------------

    def without_edges(self, edges: Iterable) -> MultiGraph:
        """Delete edges, keeping every vertex (no cleaning)."""
        drop = set(edges)
        for e in drop:
            self.endpoints(e)
        return MultiGraph(self._vertices, {e: uv for e, uv in self._edges.items() if e not in drop})

    def edge_subgraph(self, edges: Iterable) -> MultiGraph:
        """The subgraph formed by ``edges`` and their ends."""
        keep = set(edges)
        for e in keep:
            self.endpoints(e)
        return MultiGraph((), {e: uv for e, uv in self._edges.items() if e in keep})

    def induced(self, vertices: Iterable) -> MultiGraph:
        vs = set(vertices)
        self._check_vertices(vs)
        return MultiGraph(vs, {e: (u, v) for e, (u, v) in self._edges.items() if u in vs and v in vs})

    def relabel(self, mapping: Mapping) -> MultiGraph:
        """Rename vertices; ``mapping`` must be injective on the vertex set."""
        if len({mapping[v] for v in self._vertices}) != self.n:
            raise GraphError("relabelling is not injective")
        return MultiGraph(
            (mapping[v] for v in self._vertices),
            {e: (mapping[u], mapping[v]) for e, (u, v) in self._edges.items()},
        )

    def _check_vertices(self, vs):
        bad = [v for v in vs if v not in self._vset]
        if bad:
            raise GraphError(f"unknown vertex {bad[0]!r}")


@dataclass(frozen=True)
class Orientation:
    """Per-edge (tail, head); must agree with the edge's endpoints."""

    direction: Mapping

    def __post_init__(self):
        object.__setattr__(self, "direction", MappingProxyType(dict(self.direction)))

    def __getitem__(self, e):
        return self.direction[e]

    def tail(self, e):
        return self.direction[e][0]

    def head(self, e):
        return self.direction[e][1]

    def check(self, g: MultiGraph) -> None:
        if set(self.direction) != set(g.edges):
            raise GraphError("orientation does not cover exactly the edge set")
        for e, (t, h) in self.direction.items():
            if sorted((t, h)) != sorted(g.endpoints(e)):
                raise GraphError(f"orientation of edge {e} disagrees with its endpoints")

    def reversed(self, edges: Iterable) -> Orientation:
        flip = set(edges)
        return Orientation({e: ((h, t) if e in flip else (t, h)) for e, (t, h) in self.direction.items()})

    def restrict(self, edges: Iterable) -> Orientation:
        keep = set(edges)
        return Orientation({e: th for e, th in self.direction.items() if e in keep})


# ---------------------------------------------------------------------------
# cuts and cycles


def cut_size(g: MultiGraph, x: Iterable) -> int:
    """d(X): edges with exactly one end in ``x``.  Loops never count."""
    xs = set(x)
    g._check_vertices(xs)
    return sum(1 for u, v in g.edges.values() if (u in xs) != (v in xs))


def cut_edges(g: MultiGraph, x: Iterable) -> list:
    xs = set(x)
    g._check_vertices(xs)
    return [e for e, (u, v) in g.edges.items() if (u in xs) != (v in xs)]


def components(g: MultiGraph, vertices: Iterable | None = None) -> list:
    """Connected components (sorted vertex lists) of ``g`` or of ``g[vertices]``."""
    allowed = set(g.vertices) if vertices is None else set(vertices)
    seen = set()
    comps = []
    for s in sorted(allowed):
        if s in seen:
            continue
        seen.add(s)
        comp = [s]
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for e in g.incident(v):
                u = g.other_end(e, v)
                if u in allowed and u not in seen:
                    seen.add(u)
                    comp.append(u)
                    queue.append(u)
        comps.append(sorted(comp))
    return comps


def is_connected(g: MultiGraph) -> bool:
    return g.n <= 1 or len(components(g)) == 1


def cyclomatic_number(g: MultiGraph, vertices: Iterable | None = None) -> int:
    """Cycle-space dimension of ``g`` (or of the subgraph induced by ``vertices``)."""
    if vertices is None:
        h = g
    else:
        h = g.induced(vertices)
    return h.m - h.n + len(components(h))


def _adjacency(g: MultiGraph):
    """CSR neighbour lists over vertex indices, loops dropped, multiplicity kept."""
    index = {v: i for i, v in enumerate(g.vertices)}
    ptr = [0]
    idx = []
    for v in g.vertices:
        for e in g.incident(v):
            u = g.other_end(e, v)
            if u != v:
                idx.append(index[u])
        ptr.append(len(idx))
    return index, ptr, idx


def _mask_to_set(g: MultiGraph, mask: int) -> set:
    return {v for i, v in enumerate(g.vertices) if mask >> i & 1}


def small_cuts(g: MultiGraph, threshold: int, half: bool = True) -> list:
    """All nonempty proper X with d(X) <= threshold, by exhaustive enumeration.

    With ``half`` only one side of each cut is returned (the side avoiding
    the largest vertex).  Returns ``(vertex set, d)`` pairs.
    """
    if g.n > 62:
        raise GraphError("exhaustive cut enumeration needs at most 62 vertices")
    _, ptr, idx = _adjacency(g)
    _, _, small = kernels.cut_scan(g.n, ptr, idx, threshold, half)
    return [(_mask_to_set(g, mask), d) for mask, d in small]


def bond_cuts(g: MultiGraph, size: int, half: bool = True) -> list:
    """Sides X with d(X) == size and both X and its complement connected.

    Found by deleting every ``size``-subset of non-loop edges, so the cost
    does not depend on the vertex count.  In a 2-edge-connected graph every
    3-edge cut is of this kind.  With ``half`` only the side avoiding the
    largest vertex is returned.
    """
    if not is_connected(g):
        raise GraphError("bond enumeration needs a connected graph")
    top = max(g.vertices)
    edges = [e for e in g.edge_ids if not g.is_loop(e)]
    seen = set()
    out = []
    for removed in itertools.combinations(edges, size):
        comps = components(g.without_edges(removed))
        if len(comps) != 2:
            continue
        x = frozenset(comps[0] if top not in comps[0] else comps[1])
        if x in seen or cut_size(g, x) != size:
            continue
        seen.add(x)
        out.append(x)
        if not half:
            out.append(frozenset(g.vertices) - x)
    return out


def _min_cut_exhaustive(g: MultiGraph) -> int:
    _, ptr, idx = _adjacency(g)
    min_d, _, _ = kernels.cut_scan(g.n, ptr, idx, -1, True)
    return min_d


def _min_cut_maxflow(g: MultiGraph) -> int:
    """Global min cut as min over s-t max flows from a fixed root."""
    import networkx as nx

    h = nx.DiGraph()
    h.add_nodes_from(g.vertices)
    for u, v in g.edges.values():
        if u == v:
            continue
        for a, b in ((u, v), (v, u)):
            if h.has_edge(a, b):
                h[a][b]["capacity"] += 1
            else:
                h.add_edge(a, b, capacity=1)
    root = g.vertices[0]
    best = None
    for t in g.vertices[1:]:
        value = nx.maximum_flow_value(h, root, t)
        if best is None or value < best:
            best = value
    return best


def edge_connectivity(g: MultiGraph, method: str = "auto") -> int:
    """Minimum cut size; 0 when disconnected.  Single-vertex graphs report -1."""
    if g.n <= 1:
        return -1
    if not is_connected(g):
        return 0
    if method == "auto":
        method = "exhaustive" if g.n <= EXHAUSTIVE_LIMIT else "maxflow"
    if method == "exhaustive":
        return _min_cut_exhaustive(g)
    if method == "maxflow":
        return _min_cut_maxflow(g)
    raise GraphError(f"unknown method {method!r}")


def is_k_edge_connected(g: MultiGraph, k: int, method: str = "auto") -> bool:
    """Every cut δ(X) with ∅ ≠ X ⊊ V has at least ``k`` edges."""
    if g.n <= 1:
        return True
    return edge_connectivity(g, method) >= k


def _has_cycle(g: MultiGraph, vertices) -> bool:
    return cyclomatic_number(g, vertices) >= 1


def _cycle_separating_exhaustive(g: MultiGraph, k: int) -> bool:
    """True iff some cut of size < k has a cycle on both sides."""
    everything = set(g.vertices)
    for x, _ in small_cuts(g, k - 1, half=True):
        if _has_cycle(g, x) and _has_cycle(g, everything - x):
            return True
    return False


def _cycle_separating_by_edges(g: MultiGraph, k: int) -> bool:
    """Same question answered by deleting every edge set of size < k.

    If removing S leaves two components that each contain a cycle, one of
    them is a side of a cycle-separating cut contained in S; the converse is
    immediate.  Cost is independent of the vertex count.
    """
    edges = [e for e in g.edge_ids if not g.is_loop(e)]
    for size in range(0, k):
        for removed in itertools.combinations(edges, size):
            h = g.without_edges(removed)
            cyclic = 0
            for comp in components(h):
                if _has_cycle(h, comp):
                    cyclic += 1
                    if cyclic >= 2:
                        return True
    return False


def is_cyclically_k_edge_connected(g: MultiGraph, k: int, method: str = "auto") -> bool:
    """(k-1)-edge-connected and every cut separating two cycles has >= k edges."""
    if k < 1:
        raise GraphError("k must be positive")
    if k - 1 >= 1 and not is_k_edge_connected(g, k - 1, method):
        return False
    if g.n <= 1:
        return True
    if method == "auto":
        method = "exhaustive" if g.n <= EXHAUSTIVE_LIMIT else "maxflow"
    if method == "exhaustive":
        return not _cycle_separating_exhaustive(g, k)
    return not _cycle_separating_by_edges(g, k)


def is_subdivision_of_3ec(g: MultiGraph, method: str = "auto") -> bool:
    """2-edge-connected and cyclically 3-edge-connected."""
    return is_k_edge_connected(g, 2, method) and is_cyclically_k_edge_connected(g, 3, method)


def is_eulerian(g: MultiGraph) -> bool:
    """Every vertex has even degree (loops count twice); connectivity not required."""
    return all(d % 2 == 0 for d in g.degrees().values())


def bridges(g: MultiGraph) -> list:
    """Edges whose deletion separates their two ends."""
    out = []
    for e in g.edge_ids:
        u, v = g.endpoints(e)
        if u == v:
            continue
        comp = next(c for c in components(g.without_edges([e])) if u in c)
        if v not in comp:
            out.append(e)
    return out


# ---------------------------------------------------------------------------
# surgery


def contract_edge(g: MultiGraph, e) -> MultiGraph:
    """Merge the ends of ``e`` into its tail-side endpoint and drop ``e``.

    Contracting a loop just deletes it.  Other edges keep their ids; an edge
    parallel to ``e`` becomes a loop.
    """
    u, v = g.endpoints(e)
    if u == v:
        return g.without_edges([e])
    keep, gone = (u, v) if u < v else (v, u)
    edges = {}
    for f, (a, b) in g.edges.items():
        if f == e:
            continue
        edges[f] = (keep if a == gone else a, keep if b == gone else b)
    return MultiGraph((x for x in g.vertices if x != gone), edges)


def delete_and_clean(g: MultiGraph, edges: Iterable) -> MultiGraph:
    """(g - edges) with every resulting isolated vertex removed."""
    h = g.without_edges(edges)
    return MultiGraph((v for v in h.vertices if h.degree(v) > 0), dict(h.edges))


def suppress_degree_two(g: MultiGraph) -> tuple[MultiGraph, dict]:
    """Replace each maximal path through degree-2 vertices by a single edge.

    Returns the new graph and a map ``new edge id -> tuple of original edge
    ids`` listing the path in order from the new edge's tail to its head.
    New edges are numbered densely in order of their first original edge.
    A cycle hanging at one branch vertex becomes a loop there; a component
    that is a cycle with no branch vertex at all raises ``GraphError``.
    """
    branch = {v for v in g.vertices if g.degree(v) != 2}
    for comp in components(g):
        if not any(v in branch for v in comp):
            raise GraphError(f"component containing vertex {comp[0]!r} is a cycle with no anchor vertex")
    used = set()
    paths = []
    for b in sorted(branch):
        for e in g.incident(b):
            if e in used:
                continue
            path = [e]
            used.add(e)
            cur = g.other_end(e, b)
            while cur not in branch:
                nxt = next(f for f in g.incident(cur) if f not in used)
                used.add(nxt)
                path.append(nxt)
                cur = g.other_end(nxt, cur)
            first = min(path)
            i = path.index(first)
            if g.endpoints(first)[0] == path_vertices(g, b, path)[i]:
                paths.append((b, cur, path))
            else:
                paths.append((cur, b, path[::-1]))
    paths.sort(key=lambda p: min(p[2]))
    edges = {}
    mapping = {}
    for i, (a, b, path) in enumerate(paths):
        edges[i] = (a, b)
        mapping[i] = tuple(path)
    return MultiGraph(branch, edges), mapping


def path_vertices(g: MultiGraph, start, path: Iterable) -> list:
    """Vertex sequence of an edge path leaving ``start``."""
    seq = [start]
    cur = start
    for e in path:
        cur = g.other_end(e, cur)
        seq.append(cur)
    return seq

"""Named graphs, tripod unions, truncation, subdivision and tightness instances."""

from __future__ import annotations

import re
import warnings
from collections.abc import Mapping, Sequence

import networkx as nx

from .flows import Z3, WeightedGraph
from .graph import GraphError, MultiGraph, PreconditionError, is_k_edge_connected


def from_networkx(h: nx.Graph) -> MultiGraph:
    """Relabel nodes 0..n-1 in sorted order; edge ids follow sorted edge order."""
    try:
        nodes = sorted(h.nodes)
    except TypeError:
        nodes = list(h.nodes)
    index = {v: i for i, v in enumerate(nodes)}
    edges = sorted(tuple(sorted((index[u], index[v]))) for u, v in h.edges())
    return MultiGraph(range(len(nodes)), edges)


def to_networkx(g: MultiGraph) -> nx.MultiGraph:
    h = nx.MultiGraph()
    h.add_nodes_from(g.vertices)
    for e, (u, v) in g.edges.items():
        h.add_edge(u, v, key=e)
    return h


def _theta():
    return MultiGraph([0, 1], [(0, 1)] * 3)


_NAMED = {
    "theta": _theta,
    "k4": lambda: from_networkx(nx.complete_graph(4)),
    "k5": lambda: from_networkx(nx.complete_graph(5)),
    "k33": lambda: from_networkx(nx.complete_bipartite_graph(3, 3)),
    "prism": lambda: from_networkx(nx.circular_ladder_graph(3)),
    "cube": lambda: from_networkx(nx.convert_node_labels_to_integers(nx.hypercube_graph(3), ordering="sorted")),
    "v8": lambda: from_networkx(nx.circulant_graph(8, [1, 4])),
    "petersen": lambda: from_networkx(nx.petersen_graph()),
    "heawood": lambda: from_networkx(nx.heawood_graph()),
    "dodecahedron": lambda: from_networkx(nx.dodecahedral_graph()),
    "mobius_kantor": lambda: from_networkx(nx.LCF_graph(16, [5, -5], 8)),
    "desargues": lambda: from_networkx(nx.desargues_graph()),
}


def named_graphs() -> list:
    return sorted(_NAMED)


def named(name: str) -> MultiGraph:
    """Look up a named graph; also accepts ``c<n>`` cycles and ``k<n>`` cliques."""
    key = name.lower().replace("-", "_").replace("₃,₃", "33")
    if key in _NAMED:
        return _NAMED[key]()
    m = re.fullmatch(r"c(\d+)", key)
    if m and int(m.group(1)) >= 1:
        n = int(m.group(1))
        return MultiGraph(range(n), [(i, (i + 1) % n) for i in range(n)])
    m = re.fullmatch(r"k(\d+)", key)
    if m:
        return from_networkx(nx.complete_graph(int(m.group(1))))
    m = re.fullmatch(r"k(\d+)_(\d+)", key)
    if m:
        return from_networkx(nx.complete_bipartite_graph(int(m.group(1)), int(m.group(2))))
    raise KeyError(f"unknown graph name {name!r}")


def tripod_union(tripods: Sequence[Sequence], check: bool = True) -> MultiGraph:
    """Glue tripods along their leaves; equal labels name the same vertex.

    Leaf vertices are numbered first (in order of first appearance), then
    the three triangle vertices of each tripod in turn.
    """
    if not tripods:
        raise ValueError("need at least one tripod")
    leaf_id = {}
    for t in tripods:
        if len(t) != 3:
            raise ValueError(f"tripod {t!r} must name exactly three leaves")
        for lab in t:
            leaf_id.setdefault(lab, len(leaf_id))
    nxt = len(leaf_id)
    edges = []
    for t in tripods:
        c = [nxt, nxt + 1, nxt + 2]
        nxt += 3
        edges += [(c[0], c[1]), (c[1], c[2]), (c[2], c[0])]
        edges += [(c[i], leaf_id[lab]) for i, lab in enumerate(t)]
    g = MultiGraph(range(nxt), edges)
    if check and not is_k_edge_connected(g, 3):
        warnings.warn("tripod union is not 3-edge-connected", stacklevel=2)
    return g


def truncate(g: MultiGraph, vertices=None) -> MultiGraph:
    """Replace each chosen vertex by a cycle through its edge ends (a triangle at degree 3)."""
    chosen = set(g.vertices if vertices is None else vertices)
    nxt = max(g.vertices, default=-1) + 1
    ends = {e: list(uv) for e, uv in g.edges.items()}
    extra = []
    for v in sorted(chosen):
        inc = g.incident(v)
        if any(g.is_loop(e) for e in inc) or len(inc) < 3:
            raise GraphError(f"cannot truncate vertex {v}")
        ring = []
        for e in inc:
            ends[e][ends[e].index(v)] = nxt
            ring.append(nxt)
            nxt += 1
        extra += [(ring[i], ring[(i + 1) % len(ring)]) for i in range(len(ring))]
    keep = [v for v in g.vertices if v not in chosen]
    edges = [tuple(ends[e]) for e in g.edge_ids] + extra
    h = MultiGraph(keep + list(range(max(g.vertices, default=-1) + 1, nxt)), edges)
    return h.relabel({v: i for i, v in enumerate(h.vertices)})


def subdivide(g: MultiGraph, lengths) -> MultiGraph:
    """Edge e becomes a path of ``lengths[e]`` edges (an int applies to every edge).

    The path keeps the edge's stored direction; new vertices are numbered
    after the existing ones and edge ids are reassigned densely.
    """
    if isinstance(lengths, Mapping):
        get = lambda e: lengths.get(e, 1)  # noqa: E731
    else:
        get = lambda e: lengths  # noqa: E731
    nxt = max(g.vertices, default=-1) + 1
    edges = []
    for e in g.edge_ids:
        k = int(get(e))
        if k < 1:
            raise ValueError(f"edge {e}: length must be at least 1")
        u, v = g.endpoints(e)
        chain = [u] + list(range(nxt, nxt + k - 1)) + [v]
        nxt += k - 1
        edges += list(zip(chain, chain[1:]))
    return MultiGraph(list(g.vertices) + list(range(max(g.vertices, default=-1) + 1, nxt)), edges)


def tightness_instance(base: MultiGraph) -> WeightedGraph:
    """Subdivide every edge twice; weight 1 on new vertices, 0 elsewhere."""
    if base.m % 3:
        raise PreconditionError("base edge count must be divisible by 3")
    if not is_k_edge_connected(base, 3):
        raise PreconditionError("base must be 3-edge-connected")
    g = subdivide(base, 3)
    mu = {v: (1 if g.degree(v) == 2 else 0) for v in g.vertices}
    return WeightedGraph(g, g.orientation(), mu, Z3)


# ---------------------------------------------------------------------------
# tight family


def _colour_class(h: MultiGraph) -> list:
    """One side of a connected bipartite graph (the side holding the smallest vertex)."""
    left, _ = nx.bipartite.sets(to_networkx(h), top_nodes=None)
    if min(h.vertices) not in left:
        left = set(h.vertices) - set(left)
    return sorted(left)


def tripod_family() -> list:
    """Tripod unions of nullity at most 16, smallest first."""
    k33 = named("k33")
    cube = named("cube")
    heawood = named("heawood")
    return [
        ("k4", tripod_union([("a", "a", "a")])),
        ("two_at_one", tripod_union([("a", "a", "a")] * 2)),
        ("aab_abb_aab", tripod_union([("a", "a", "b"), ("a", "b", "b"), ("a", "a", "b")])),
        ("truncated_k33", truncate(k33, _colour_class(k33))),
        ("three_at_one", tripod_union([("a", "a", "a")] * 3)),
        ("truncated_cube", truncate(cube, _colour_class(cube))),
        ("truncated_heawood", truncate(heawood, _colour_class(heawood))),
    ]

"""Ears, ear decompositions, ear labellings, bonus and ψ-removal."""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import NamedTuple

from .flows import (
    Z3,
    EdgeLabelling,
    FlowCertificate,
    InvariantViolation,
    WeightedGraph,
    boundary,
    gain_of,
    is_flow_with_boundary,
)
from .graph import (
    GraphError,
    MultiGraph,
    components,
    delete_and_clean,
    is_k_edge_connected,
    path_vertices,
)

PATH = "path"
ANCHORED = "anchored"
CYCLE = "cycle"


class NotTwoEdgeConnected(GraphError):
    pass


@dataclass(frozen=True)
class Ear:
    """Vertex-edge sequence v1, e1, ..., em, v(m+1) inside a host graph."""

    vertices: tuple
    edges: tuple
    kind: str = PATH

    def __post_init__(self):
        if len(self.vertices) != len(self.edges) + 1 or not self.edges:
            raise ValueError("an ear needs m >= 1 edges and m + 1 vertices")

    @property
    def length(self) -> int:
        return len(self.edges)

    @property
    def ends(self) -> tuple:
        return self.vertices[0], self.vertices[-1]

    @property
    def interior(self) -> tuple:
        return self.vertices[1:-1]

    @property
    def edge_set(self) -> frozenset:
        return frozenset(self.edges)

    @property
    def closed(self) -> bool:
        return self.vertices[0] == self.vertices[-1]


def _walk(g: MultiGraph, start, first_edge, stop) -> Ear:
    verts = [start]
    edges = [first_edge]
    cur = g.other_end(first_edge, start)
    verts.append(cur)
    while not stop(cur) and cur != start:
        nxt = next(f for f in g.incident(cur) if f != edges[-1] or g.is_loop(f))
        if nxt == edges[-1]:
            break
        edges.append(nxt)
        cur = g.other_end(nxt, cur)
        verts.append(cur)
    return Ear(tuple(verts), tuple(edges))


def find_ears(g: MultiGraph) -> list:
    """Partition E(g) into maximal chains through degree-2 vertices.

    Paths end at vertices of degree >= 3; a chain returning to its start
    is an anchored cycle; a component that is a plain cycle yields one
    whole-cycle ear starting at its smallest vertex.  Raises if some vertex
    has degree 1 (pendant chains are not ears).
    """
    deg = g.degrees()
    pendant = [v for v, d in deg.items() if d == 1]
    if pendant:
        raise NotTwoEdgeConnected(f"vertex {pendant[0]!r} has degree 1")
    branch = {v for v, d in deg.items() if d >= 3}
    used = set()
    ears = []
    for b in sorted(branch):
        for e in g.incident(b):
            if e in used:
                continue
            ear = _walk(g, b, e, lambda v: v in branch)
            kind = ANCHORED if ear.closed else PATH
            ears.append(Ear(ear.vertices, ear.edges, kind))
            used.update(ear.edges)
    for comp in components(g):
        if any(v in branch for v in comp) or deg[comp[0]] == 0:
            continue
        start = comp[0]
        ear = _walk(g, start, g.incident(start)[0], lambda v: False)
        ears.append(Ear(ear.vertices, ear.edges, CYCLE))
        used.update(ear.edges)
    ears.sort(key=lambda p: min(p.edges))
    return ears


def ear_of_edge(ears: Iterable[Ear], e) -> Ear:
    for p in ears:
        if e in p.edge_set:
            return p
    raise GraphError(f"edge {e!r} lies in no ear")


def is_ear_of(h: MultiGraph, p: Ear) -> bool:
    """Does ``p`` satisfy the ear definition inside graph ``h``?"""
    if not all(h.has_edge(e) for e in p.edges) or len(set(p.edges)) != len(p.edges):
        return False
    for i, e in enumerate(p.edges):
        if sorted(h.endpoints(e)) != sorted((p.vertices[i], p.vertices[i + 1])):
            return False
    interior = p.interior
    if len(set(interior)) != len(interior) or any(h.degree(v) != 2 for v in interior):
        return False
    if p.closed:
        if p.vertices[0] in interior:
            return False
        if h.degree(p.vertices[0]) == 2:
            # the whole graph must be this cycle
            return h.m == p.length and h.n == len(set(p.vertices))
        return True
    a, b = p.ends
    if a in interior or b in interior:
        return False
    return h.degree(a) >= 3 and h.degree(b) >= 3


# ---------------------------------------------------------------------------
# decompositions


@dataclass(frozen=True)
class EarDecomposition:
    """Ears P1..Pl; Pj must be an ear after removing Pl, ..., P(j+1)."""

    ears: tuple
    full: bool = True

    def edge_union(self) -> frozenset:
        return frozenset(e for p in self.ears for e in p.edges)

    def gain(self) -> int:
        """Σ 8·r where r is each ear's length mod 3."""
        return sum(8 * (p.length % 3) for p in self.ears)

    def validate(self, g: MultiGraph) -> None:
        seen = set()
        for p in self.ears:
            if seen & p.edge_set:
                raise GraphError("ears share an edge")
            seen |= p.edge_set
        if self.full and seen != set(g.edges):
            raise GraphError("a full decomposition must cover every edge")
        h = g
        for j in range(len(self.ears) - 1, -1, -1):
            p = self.ears[j]
            if not is_ear_of(h, p):
                raise GraphError(f"ear {j + 1} is not an ear of the remaining graph")
            h = delete_and_clean(h, p.edges)
        if self.full:
            for j in range(1, len(self.ears) + 1):
                prefix = g.edge_subgraph(e for p in self.ears[:j] for e in p.edges)
                if not is_k_edge_connected(prefix, 2):
                    raise GraphError(f"prefix of {j} ears is not 2-edge-connected")


def _bfs_path(g: MultiGraph, src, targets, allowed_edges, forbid_vertices=frozenset()):
    """Shortest edge path from ``src`` to any vertex of ``targets``."""
    parent = {src: None}
    queue = deque([src])
    while queue:
        v = queue.popleft()
        for e in g.incident(v):
            if e not in allowed_edges:
                continue
            u = g.other_end(e, v)
            if u in parent or u in forbid_vertices:
                continue
            parent[u] = (v, e)
            if u in targets:
                path = []
                while parent[u] is not None:
                    v, e = parent[u]
                    path.append(e)
                    u = v
                return path[::-1]
            queue.append(u)
    return None


def _ear_through(g: MultiGraph, e, covered_vertices, free_edges):
    """An ear through uncovered edge ``e`` attached to ``covered_vertices``."""
    a, b = g.endpoints(e)
    others = free_edges - {e}
    if a in covered_vertices and b in covered_vertices:
        return Ear((a, b), (e,))
    if b in covered_vertices:
        a, b = b, a
    if a in covered_vertices:
        tail = _bfs_path(g, b, covered_vertices, others)
        if tail is None:
            return None
        verts = [a] + path_vertices(g, b, tail)
        return Ear(tuple(verts), (e, *tail))
    return _ear_through_disjoint(g, e, covered_vertices, others)


def _ear_through_disjoint(g: MultiGraph, e, covered, free):
    """Both ends uncovered: two internally disjoint paths into ``covered``."""
    import networkx as nx

    a, b = g.endpoints(e)
    hub = ("covered",)
    src = ("source",)
    h = nx.Graph()
    for f in sorted(free):
        u, v = g.endpoints(f)
        if u == v:
            continue
        u2 = hub if u in covered else u
        v2 = hub if v in covered else v
        if u2 == v2:
            continue
        h.add_edge(u2, v2)
    if a not in h or b not in h or hub not in h:
        return None
    h.add_edge(src, a)
    h.add_edge(src, b)
    try:
        paths = list(nx.node_disjoint_paths(h, src, hub))
    except nx.NetworkXNoPath:
        return None
    if len(paths) < 2:
        return None
    by_start = {p[1]: p[1:] for p in paths[:2]}
    if set(by_start) != {a, b}:
        return None

    def realise(vpath):
        # vertex path start..hub -> concrete edges, ending in a covered vertex
        edges = []
        verts = [vpath[0]]
        for x, y in zip(vpath, vpath[1:]):
            cands = [
                f
                for f in g.incident(x)
                if f in free and (g.other_end(f, x) == y or (y == hub and g.other_end(f, x) in covered))
            ]
            f = min(cands)
            edges.append(f)
            verts.append(g.other_end(f, x))
        return verts, edges

    va, ea = realise(by_start[a])
    vb, eb = realise(by_start[b])
    verts = va[::-1] + vb
    edges = ea[::-1] + [e] + eb
    return Ear(tuple(verts), tuple(edges))


def full_ear_decomposition(g: MultiGraph) -> EarDecomposition:
    """Greedy full decomposition with a canonical, reproducible order.

    P1 is a shortest cycle through the smallest edge id.  Each later ear is
    the shortest ear through the smallest uncovered edge id that can be
    attached to the covered part.
    """
    if g.m == 0 or not is_k_edge_connected(g, 2) or not _no_isolated(g):
        raise NotTwoEdgeConnected("full ear decompositions exist only for 2-edge-connected graphs")
    e0 = min(g.edges)
    a, b = g.endpoints(e0)
    if a == b:
        first = Ear((a, a), (e0,), CYCLE)
    else:
        back = _bfs_path(g, b, {a}, set(g.edges) - {e0})
        first = Ear(tuple([a] + path_vertices(g, b, back)), (e0, *back), CYCLE)
    ears = [first]
    covered_edges = set(first.edges)
    covered_vertices = set(first.vertices)
    while len(covered_edges) < g.m:
        free = set(g.edges) - covered_edges
        for e in sorted(free):
            ear = _ear_through(g, e, covered_vertices, free)
            if ear is not None:
                break
        else:  # pragma: no cover - excluded by 2-edge-connectivity
            raise InvariantViolation("no attachable ear found")
        kind = ANCHORED if ear.closed else PATH
        ears.append(Ear(ear.vertices, ear.edges, kind))
        covered_edges |= ear.edge_set
        covered_vertices |= set(ear.vertices)
    return EarDecomposition(tuple(ears), True)


def _no_isolated(g: MultiGraph) -> bool:
    return all(g.degree(v) > 0 for v in g.vertices) or g.n == 1


# ---------------------------------------------------------------------------
# labellings


@dataclass(frozen=True)
class EarLabelling:
    """One of the three ear labellings; values are in host orientation."""

    ear: Ear
    labelling: EdgeLabelling
    forward: tuple

    @property
    def support_size(self) -> int:
        return self.labelling.support_size

    @property
    def gain(self) -> int:
        return gain_of(self.support_size, self.ear.length)

    def __getitem__(self, e):
        return self.labelling[e]


def _signs(wg: WeightedGraph, p: Ear) -> list:
    out = []
    for i, e in enumerate(p.edges):
        out.append(1 if wg.orientation[e][0] == p.vertices[i] else -1)
    return out


def ear_labellings(p: Ear, wg: WeightedGraph) -> tuple:
    """The three labellings matching μ at every interior vertex.

    In the ear's own forward orientation they are ψ, ψ+1, ψ+2 with ψ(e1)=0;
    values are stored converted to the host orientation.
    """
    mu = wg.mu
    offsets = [0]
    for v in p.vertices[1:-1]:
        offsets.append((offsets[-1] + mu[v]) % 3)
    signs = _signs(wg, p)
    out = []
    for c in range(3):
        fwd = tuple((c + o) % 3 for o in offsets)
        host = {e: (s * x) % 3 for e, s, x in zip(p.edges, signs, fwd)}
        out.append(EarLabelling(p, EdgeLabelling(host, Z3), fwd))
    return tuple(out)


class Equitability(NamedTuple):
    equitable: bool
    bonus: int


def bonus_rule(length: int, equitable: bool) -> int:
    if equitable:
        return 0
    return 3 if length % 3 == 2 else 4


def classify_equitable(p: Ear, wg: WeightedGraph) -> Equitability:
    """Equitable iff each of the three labellings has support exactly 2|E(P)|/3."""
    labs = ear_labellings(p, wg)
    eq = p.length % 3 == 0 and all(3 * lab.support_size == 2 * p.length for lab in labs)
    return Equitability(eq, bonus_rule(p.length, eq))


def best_labelling(p: Ear, wg: WeightedGraph) -> EarLabelling:
    """A maximum-support labelling; ties go to the smaller host value on e1."""
    labs = ear_labellings(p, wg)
    e1 = p.edges[0]
    return max(labs, key=lambda lab: (lab.support_size, -lab[e1]))


def _interior_ok(wg: WeightedGraph, psi: EarLabelling) -> bool:
    p = psi.ear
    sub = wg.graph.edge_subgraph(p.edges)
    b = boundary(sub, wg.orientation.restrict(p.edges), psi.labelling)
    return all(b[v] == wg.mu[v] for v in p.interior)


def psi_removal(wg: WeightedGraph, p: Ear, psi: EarLabelling) -> WeightedGraph:
    """Delete the ear, drop isolated vertices, and fold ∂ψ into the weights."""
    if psi.ear.edge_set != p.edge_set:
        raise ValueError("labelling belongs to a different ear")
    if not _interior_ok(wg, psi):
        raise ValueError("ψ violates the boundary condition at an interior vertex")
    sub = wg.graph.edge_subgraph(p.edges)
    bpsi = boundary(sub, wg.orientation.restrict(p.edges), psi.labelling)
    rest = delete_and_clean(wg.graph, p.edges)
    mu = {}
    for v, x in wg.mu.items():
        y = (x - bpsi.get(v, 0)) % 3
        if rest.has_vertex(v):
            mu[v] = y
        elif y:
            raise InvariantViolation(f"removed vertex {v} keeps nonzero weight {y}")
    return WeightedGraph(rest, wg.orientation.restrict(rest.edges), mu, Z3)


def putback(wg: WeightedGraph, psi: EarLabelling, phi_prime: EdgeLabelling) -> EdgeLabelling:
    """Combine a labelling of the ψ-removal with ψ itself."""
    removed = psi_removal(wg, psi.ear, psi)
    b = boundary(removed.graph, removed.orientation, phi_prime)
    if any(b[v] != removed.mu[v] for v in b):
        raise ValueError("φ' does not have boundary μ of the ψ-removal")
    phi = phi_prime.union(psi.labelling)
    b = boundary(wg.graph, wg.orientation, phi)
    if any(b[v] != wg.mu[v] for v in b):  # pragma: no cover - guaranteed
        raise InvariantViolation("put-back labelling has the wrong boundary")
    return phi


def construct_flow_via_decomposition(wg: WeightedGraph, d: EarDecomposition) -> FlowCertificate:
    """Peel ears Pl..P1 with best labellings; gain >= Σ 8·r_i."""
    if not d.full:
        raise ValueError("a full ear decomposition is required")
    d.validate(wg.graph)
    cur = wg
    pieces = []
    for p in reversed(d.ears):
        psi = best_labelling(p, cur)
        pieces.append(psi.labelling)
        cur = psi_removal(cur, p, psi)
    values = {}
    for lab in pieces:
        values.update(lab.values)
    cert = is_flow_with_boundary(wg, EdgeLabelling(values, Z3))
    if not cert.boundary_ok:  # pragma: no cover - guaranteed
        raise InvariantViolation("decomposition flow misses the boundary")
    if cert.gain < d.gain():  # pragma: no cover - guaranteed
        raise InvariantViolation("decomposition flow falls short of the decomposition gain")
    return cert


def choose_labelling_inequitable_merge(wg: WeightedGraph, p: Ear, q: Ear, q_prime: Ear) -> EarLabelling:
    """Nonzero ψ on a single-edge ear so that Q ∪ Q' stays inequitable.

    ``p``, ``q``, ``q_prime`` are the three ears at a degree-3 vertex ``v``;
    ``q`` must be inequitable.  Both nonzero labellings of ``p`` are tried.
    """
    if p.length != 1:
        raise ValueError("P must be a single edge")
    shared = set(p.ends) & set(q.ends) & set(q_prime.ends)
    vs = [v for v in shared if wg.graph.degree(v) == 3]
    if not vs:
        raise ValueError("P, Q, Q' must meet at a vertex of degree 3")
    if len({p.edge_set, q.edge_set, q_prime.edge_set}) != 3:
        raise ValueError("ears must be distinct")
    if classify_equitable(q, wg).equitable:
        raise ValueError("Q must be inequitable")
    candidates = [lab for lab in ear_labellings(p, wg) if lab.support_size == 1]
    candidates.sort(key=lambda lab: lab[p.edges[0]])
    for psi in candidates:
        removed = psi_removal(wg, p, psi)
        merged = ear_of_edge(find_ears(removed.graph), q.edges[0])
        if not merged.edge_set >= q.edge_set | q_prime.edge_set:
            raise InvariantViolation("Q and Q' did not merge after removing P")
        if not classify_equitable(merged, removed).equitable:
            return psi
    raise InvariantViolation("no nonzero labelling keeps Q ∪ Q' inequitable")


def decomposition_for_ears(ears: Sequence[Ear]) -> EarDecomposition:
    return EarDecomposition(tuple(ears), full=False)

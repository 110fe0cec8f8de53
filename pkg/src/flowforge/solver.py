"""Exact maximum-support flows by walking the solution coset of ∂φ = μ.

Every labelling with boundary μ is φ0 + Σ c_j·z_j where φ0 is a particular
solution and z_j are the fundamental cycles of a spanning forest.  The coset
is walked in modular Gray-code order so each step touches one cycle.
"""

from __future__ import annotations

import os
import random
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from . import kernels
from .flows import (
    Z2,
    Z2Z2,
    Z2Z3,
    Z3,
    EdgeLabelling,
    FlowCertificate,
    GroupSpec,
    InvariantViolation,
    WeightedGraph,
    boundary,
    certificate_payload,
    eulerian_two_flow,
    is_flow_with_boundary,
    lift_modular_to_integer,
    SCHEMA_VERSION,
)
from .graph import MultiGraph, Orientation

DEFAULT_BUDGET = 3**20
K_GROUPS = {2: Z2, 3: Z3, 4: Z2Z2, 6: Z2Z3}


def default_budget() -> int:
    env = os.environ.get("FLOWFORGE_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


class InfeasibleBoundary(ValueError):
    """Some component's weights do not sum to zero."""


class BudgetExceeded(RuntimeError):
    def __init__(self, report: RatioReport):
        super().__init__(
            f"coset has {report.coset_size} elements, budget allows {report.enumerated}"
        )
        self.report = report


# ---------------------------------------------------------------------------
# cycle space


@dataclass(frozen=True)
class FlowSpaceBasis:
    """Spanning forest plus one signed fundamental cycle per non-tree edge."""

    graph: MultiGraph
    orientation: Orientation
    tree_edges: frozenset
    cycles: tuple  # each a tuple of (edge id, ±1)
    parent: dict = field(repr=False)
    order: tuple = field(repr=False)

    @property
    def nullity(self) -> int:
        return len(self.cycles)

    def cycle_labelling(self, j: int, x, group: GroupSpec) -> EdgeLabelling:
        vals = dict.fromkeys(self.graph.edges, group.zero)
        for e, s in self.cycles[j]:
            vals[e] = group.add(vals[e], group.scale(x, s))
        return EdgeLabelling(vals, group)


def flow_space_basis(g: MultiGraph, o: Orientation | None = None) -> FlowSpaceBasis:
    """BFS forest rooted at the smallest vertex of each component."""
    o = o or g.orientation()
    parent = {}
    order = []
    depth = {}
    tree = set()
    for root in g.vertices:
        if root in parent:
            continue
        parent[root] = None
        depth[root] = 0
        order.append(root)
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for e in g.incident(v):
                u = g.other_end(e, v)
                if u in parent:
                    continue
                parent[u] = (v, e)
                depth[u] = depth[v] + 1
                tree.add(e)
                order.append(u)
                queue.append(u)

    def step(a):
        p, f = parent[a]
        return p, (f, 1 if o[f] == (a, p) else -1)

    cycles = []
    for e in g.edge_ids:
        if e in tree:
            continue
        t, h = o[e]
        cyc = [(e, 1)]
        if t != h:
            # e runs t -> h; close the cycle along the tree from h back to t
            up_h, up_t = [], []
            a, b = h, t
            while depth[a] > depth[b]:
                a, s = step(a)
                up_h.append(s)
            while depth[b] > depth[a]:
                b, s = step(b)
                up_t.append(s)
            while a != b:
                a, s = step(a)
                up_h.append(s)
                b, s = step(b)
                up_t.append(s)
            cyc.extend(up_h)
            cyc.extend((f, -s) for f, s in reversed(up_t))
        cycles.append(tuple(cyc))
    return FlowSpaceBasis(g, o, frozenset(tree), tuple(cycles), parent, tuple(order))


def particular_solution(wg: WeightedGraph, basis: FlowSpaceBasis | None = None) -> EdgeLabelling | None:
    """Tree labelling with ∂φ = μ, or None when some component is not zero-sum."""
    g, o, grp = wg.graph, wg.orientation, wg.group
    basis = basis or flow_space_basis(g, o)
    vals = dict.fromkeys(g.edges, grp.zero)
    excess = {v: grp.zero for v in g.vertices}  # current boundary from set edges
    for v in reversed(basis.order):
        if basis.parent[v] is None:
            if excess[v] != wg.mu[v]:
                return None
            continue
        p, f = basis.parent[v]
        need = grp.sub(wg.mu[v], excess[v])
        x = need if o.tail(f) == v else grp.neg(need)
        vals[f] = x
        excess[v] = wg.mu[v]
        excess[p] = grp.sub(excess[p], need)
    return EdgeLabelling(vals, grp)


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class RatioReport:
    certificate: FlowCertificate
    support: int
    ratio: Fraction
    group: GroupSpec
    coset_size: int
    enumerated: int
    optimal: bool
    histogram: tuple
    wall_time: float = field(default=0.0, compare=False)
    integer_witness: EdgeLabelling | None = None
    hit: bool = False

    @property
    def min_support(self) -> int:
        return next(s for s, c in enumerate(self.histogram) if c)

    @property
    def gain(self) -> int:
        return self.certificate.gain

    def to_json(self, timing: bool = False) -> dict:
        out = {
            "schema": SCHEMA_VERSION,
            "kind": "ratio_report",
            "group": self.group.name,
            "edges": len(self.certificate.labelling),
            "support": self.support,
            "ratio": f"{self.ratio.numerator}/{self.ratio.denominator}",
            "gain": self.certificate.gain,
            "optimal": self.optimal,
            "coset_size": self.coset_size,
            "enumerated": self.enumerated,
            "histogram": list(self.histogram),
            "certificate": certificate_payload(self.certificate),
        }
        if self.integer_witness is not None:
            out["integer_witness"] = {
                "bound": self.integer_witness.bound,
                "values": [[e, x] for e, x in self.integer_witness.values.items()],
            }
        if timing:
            out["wall_time"] = self.wall_time
        return out


# ---------------------------------------------------------------------------
# enumeration


@dataclass(frozen=True)
class _Tables:
    order: int
    add: list
    neg: list
    diff: list
    elements: list


def _tables(grp: GroupSpec) -> _Tables:
    els = grp.elements()
    q = len(els)
    add = [grp.encode(grp.add(a, b)) for a in els for b in els]
    neg = [grp.encode(grp.neg(a)) for a in els]
    # stepping coefficient code c -> c+1 (wrapping) adds element(c+1) - element(c)
    diff = [grp.encode(grp.sub(els[(c + 1) % q], els[c])) for c in range(q)]
    return _Tables(q, add, neg, diff, els)


def _flatten(basis: FlowSpaceBasis, index: dict, cycles: range):
    ptr, edge, neg = [0], [], []
    for j in cycles:
        for e, s in basis.cycles[j]:
            edge.append(index[e])
            neg.append(1 if s < 0 else 0)
        ptr.append(len(edge))
    return ptr, edge, neg


def _shifted(start: list, basis: FlowSpaceBasis, j: int, x, grp: GroupSpec, index: dict) -> list:
    out = list(start)
    for e, s in basis.cycles[j]:
        i = index[e]
        out[i] = grp.encode(grp.add(grp.decode(out[i]), grp.scale(x, s)))
    return out


def _better(a, b) -> bool:
    """Merge order: larger support first, then lexicographically smaller values."""
    return a[0] > b[0] or (a[0] == b[0] and a[1] < b[1])


def max_support_flow(
    wg: WeightedGraph,
    group: GroupSpec | None = None,
    budget: int | None = None,
    workers: int = 1,
    stop_at: int | None = None,
    partial_ok: bool = False,
    check_samples: int = 100,
    impl=None,
) -> RatioReport:
    """Maximum support of φ with ∂φ = μ over ``group`` (exhaustive).

    ``stop_at`` turns the walk into a search for the first labelling with at
    least that support.  If the coset exceeds ``budget`` the best labelling of
    the enumerated prefix is reported with ``optimal=False``; unless
    ``partial_ok`` is set that report travels inside ``BudgetExceeded``.
    """
    t0 = time.perf_counter()
    grp = group or wg.group
    if grp != wg.group:
        if not wg.is_zero:
            raise ValueError("a non-zero weight fixes the group")
        wg = WeightedGraph.zero(wg.graph, wg.orientation, grp)
    g = wg.graph
    budget = default_budget() if budget is None else int(budget)
    basis = flow_space_basis(g, wg.orientation)
    phi0 = particular_solution(wg, basis)
    if phi0 is None:
        raise InfeasibleBoundary("weight is not zero-sum on every component")
    tab = _tables(grp)
    ids = g.edge_ids
    index = {e: i for i, e in enumerate(ids)}
    start = [grp.encode(phi0[e]) for e in ids]
    k = basis.nullity
    coset_size = tab.order**k
    limit = min(coset_size, budget)
    target = -1 if stop_at is None else int(stop_at)

    if k >= 2 and workers > 1 and limit == coset_size:
        # shard on the last (slowest) coefficient; merge deterministically
        sub = _flatten(basis, index, range(k - 1))
        starts = [_shifted(start, basis, k - 1, x, grp, index) for x in tab.elements]
        per = tab.order ** (k - 1)

        def run(s):
            return kernels.coset_scan(s, *sub, tab.order, tab.add, tab.neg, tab.diff, per, target, impl=impl)

        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, starts))
        if target >= 0:
            hits = [r for r in results if r[4]]
            results = hits[:1] or results
        best = results[0]
        hist = [0] * (len(ids) + 1)
        count = 0
        for r in results:
            if _better(r, best):
                best = r
            for s, c in enumerate(r[2]):
                hist[s] += c
            count += r[3]
        best_supp, best_vals, hit = best[0], best[1], best[4]
    else:
        ptr, edge, neg = _flatten(basis, index, range(k))
        best_supp, best_vals, hist, count, hit = kernels.coset_scan(
            start, ptr, edge, neg, tab.order, tab.add, tab.neg, tab.diff, limit, target, impl=impl
        )

    phi = EdgeLabelling({e: grp.decode(best_vals[i]) for i, e in enumerate(ids)}, grp)
    cert = is_flow_with_boundary(wg, phi)
    if not cert.boundary_ok or cert.support_size != best_supp:
        raise InvariantViolation("enumerated labelling fails the boundary check")
    if check_samples:
        _check_coset_samples(wg, basis, phi0, check_samples)
    m = len(ids)
    report = RatioReport(
        certificate=cert,
        support=best_supp,
        ratio=Fraction(best_supp, m) if m else Fraction(1),
        group=grp,
        coset_size=coset_size,
        enumerated=count,
        optimal=count == coset_size,
        histogram=tuple(hist),
        wall_time=time.perf_counter() - t0,
        hit=bool(hit),
    )
    if count < coset_size and not hit and not partial_ok:
        raise BudgetExceeded(report)
    return report


def coset_member(basis: FlowSpaceBasis, phi0: EdgeLabelling, coeffs, group: GroupSpec) -> EdgeLabelling:
    vals = dict(phi0.values)
    for j, x in enumerate(coeffs):
        if x == group.zero:
            continue
        for e, s in basis.cycles[j]:
            vals[e] = group.add(vals[e], group.scale(x, s))
    return EdgeLabelling(vals, group)


def sample_coset(wg: WeightedGraph, count: int, seed: int = 0) -> list:
    """Random members of the solution coset (seeded)."""
    basis = flow_space_basis(wg.graph, wg.orientation)
    phi0 = particular_solution(wg, basis)
    if phi0 is None:
        raise InfeasibleBoundary("weight is not zero-sum on every component")
    rng = random.Random(seed)
    els = wg.group.elements()
    return [
        coset_member(basis, phi0, [rng.choice(els) for _ in basis.cycles], wg.group)
        for _ in range(count)
    ]


def _check_coset_samples(wg, basis, phi0, count):
    rng = random.Random(0)
    els = wg.group.elements()
    for _ in range(count if basis.cycles else 1):
        phi = coset_member(basis, phi0, [rng.choice(els) for _ in basis.cycles], wg.group)
        b = boundary(wg.graph, wg.orientation, phi)
        if any(b[v] != wg.mu[v] for v in b):
            raise InvariantViolation("coset member misses the prescribed boundary")


# ---------------------------------------------------------------------------
# h(G, k)


def integer_witness(g: MultiGraph, o: Orientation, phi: EdgeLabelling, k: int) -> EdgeLabelling:
    """An integer k-flow with the same support as the group flow ``phi``."""
    grp = phi.group
    if k == 3:
        return lift_modular_to_integer(g, o, phi)
    if k == 2:
        supp = phi.support()
        return eulerian_two_flow(g, o, supp)
    if k in (4, 6):
        # split into per-factor flows and recombine as a·f1 + f2
        parts = []
        for i, q in enumerate(grp.orders):
            comp = EdgeLabelling({e: x[i] for e, x in phi.values.items()}, GroupSpec((q,)))
            if q == 2:
                parts.append(eulerian_two_flow(g, o, comp.support()))
            else:
                parts.append(lift_modular_to_integer(g, o, comp))
        f1, f2 = parts
        scale = 2 if k == 4 else 3
        # Z2xZ2: f = 2·f1 + f2; Z2xZ3: f = 3·f1 + f2
        vals = {e: scale * f1[e] + f2[e] for e in g.edges}
        out = EdgeLabelling(vals, None, k)
        if out.support() != phi.support():  # pragma: no cover - guaranteed
            raise InvariantViolation("integer witness changed the support")
        return out
    raise ValueError(f"unsupported k={k}")


def h_ratio(g: MultiGraph, k: int, budget: int | None = None, workers: int = 1, impl=None) -> RatioReport:
    """Best support fraction of a k-flow, with an integer witness."""
    if k not in K_GROUPS:
        raise ValueError("k must be one of 2, 3, 4, 6")
    grp = K_GROUPS[k]
    wg = WeightedGraph.zero(g, g.orientation(), grp)
    rep = max_support_flow(wg, grp, budget=budget, workers=workers, impl=impl)
    wit = integer_witness(g, wg.orientation, rep.certificate.labelling, k)
    b = boundary(g, wg.orientation, wit)
    if any(b.values()) or wit.support() != rep.certificate.labelling.support():
        raise InvariantViolation("integer witness is not a k-flow with the optimal support")
    return RatioReport(**{**rep.__dict__, "integer_witness": wit})

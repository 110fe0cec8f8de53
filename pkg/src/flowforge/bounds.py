"""Constructive support bounds: 3/4 for Z3, 14/15 for 4-flows, 2j/(2j+1) for 2-flows."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil

import numpy as np

from .flows import (
    Z2Z2,
    Z3,
    Z3Z3,
    EdgeLabelling,
    FlowCertificate,
    InvariantViolation,
    WeightedGraph,
    certify,
    eulerian_two_flow,
    pair_class_counts,
)
from .graph import (
    MultiGraph,
    PreconditionError,
    is_cyclically_k_edge_connected,
    is_eulerian,
    is_k_edge_connected,
    suppress_degree_two,
)
from .solver import BudgetExceeded, default_budget, flow_space_basis, max_support_flow


class MatchingBudgetExceeded(RuntimeError):
    pass


def _require_2ec(g: MultiGraph, k: int = 2) -> None:
    if g.m == 0 or not is_k_edge_connected(g, k):
        raise PreconditionError(f"input must be {k}-edge-connected")


def _eulerian_cert(g: MultiGraph, group) -> FlowCertificate:
    o = g.orientation()
    f = eulerian_two_flow(g, o)
    if group is None:
        return certify(g, o, f)
    one = 1 if group.cyclic else (1,) + (0,) * (len(group.orders) - 1)
    vals = {e: group.scale(one, x) for e, x in f.values.items()}
    return certify(g, o, EdgeLabelling(vals, group))


def _check_bound(cert: FlowCertificate, frac: Fraction) -> FlowCertificate:
    m = cert.edge_count
    if not cert.boundary_ok:
        raise InvariantViolation("constructed labelling is not a flow")
    if cert.support_size < ceil(frac * m):
        raise InvariantViolation(f"support {cert.support_size} below {frac} of {m}")
    return cert


# ---------------------------------------------------------------------------
# 3/4 via Z3 x Z3

# GF(3)-linear maps sending pair class i onto {(1,2),(2,1)}
_TO_LAST = (
    lambda x, y: ((x + y) % 3, 2 * y % 3),
    lambda x, y: (x, (2 * x + y) % 3),
    lambda x, y: (x, (x + y) % 3),
    lambda x, y: (x, y),
)


SAMPLE_BATCH = 4096
SAMPLE_CAP = 1 << 18


def _sample_nowhere_zero(g: MultiGraph, o, budget: int, seed: int = 0) -> EdgeLabelling | None:
    """Seeded random search for a nowhere-zero Z3×Z3 flow.

    Every cycle coefficient is drawn from the eight nonzero elements, which
    already makes the non-tree edges nonzero; such flows are dense, while
    the Gray walk keeps its slowest digits at zero for a long time.
    """
    basis = flow_space_basis(g, o)
    ids = g.edge_ids
    col = {e: i for i, e in enumerate(ids)}
    mat = np.zeros((basis.nullity, len(ids)), dtype=np.int64)
    for j, cyc in enumerate(basis.cycles):
        for e, sgn in cyc:
            mat[j, col[e]] = (mat[j, col[e]] + sgn) % 3
    nonzero = np.array([x for x in Z3Z3.elements() if x != (0, 0)], dtype=np.int64)
    rng = np.random.default_rng(seed)
    drawn = 0
    while drawn < min(budget, SAMPLE_CAP):
        coeffs = nonzero[rng.integers(0, len(nonzero), size=(SAMPLE_BATCH, basis.nullity))]
        xs = coeffs[:, :, 0] @ mat % 3
        ys = coeffs[:, :, 1] @ mat % 3
        good = np.flatnonzero(np.all((xs != 0) | (ys != 0), axis=1))
        if good.size:
            i = good[0]
            return EdgeLabelling({e: (int(xs[i, c]), int(ys[i, c])) for e, c in col.items()}, Z3Z3)
        drawn += SAMPLE_BATCH
    return None


def three_quarter_flow(g: MultiGraph, budget: int | None = None, workers: int = 1) -> FlowCertificate:
    """A Z3 flow with support at least 3|E|/4, built from a nowhere-zero Z3×Z3 flow.

    The Z3×Z3 flow comes from a seeded random search, then from the
    exhaustive first-hit walk if sampling finds nothing.
    """
    _require_2ec(g)
    if is_eulerian(g):
        return _check_bound(_eulerian_cert(g, Z3), Fraction(1))
    wg = WeightedGraph.zero(g, g.orientation(), Z3Z3)
    budget = default_budget() if budget is None else int(budget)
    phi2 = _sample_nowhere_zero(g, wg.orientation, budget)
    if phi2 is None:
        try:
            rep = max_support_flow(wg, Z3Z3, budget=budget, workers=workers, stop_at=g.m, partial_ok=True)
        except BudgetExceeded as exc:  # pragma: no cover - partial_ok set
            rep = exc.report
        if not rep.hit:
            raise BudgetExceeded(rep)
        phi2 = rep.certificate.labelling
    counts = pair_class_counts(phi2)
    i = counts.index(min(counts))
    vals = {}
    for e, (x, y) in phi2.values.items():
        a, b = _TO_LAST[i](x, y)
        vals[e] = a + b
    cert = certify(g, wg.orientation, EdgeLabelling(vals, Z3))
    if cert.support_size != g.m - counts[i]:  # pragma: no cover - algebraic identity
        raise InvariantViolation("support does not match the pair-class count")
    return _check_bound(cert, Fraction(3, 4))


# ---------------------------------------------------------------------------
# perfect matchings


def perfect_matchings(g: MultiGraph, limit: int | None = None):
    """Yield every perfect matching as a frozenset of edge ids (loops never used).

    Branches on the smallest unmatched vertex; dead branches are cut as soon
    as some unmatched vertex has no usable edge left.
    """
    verts = g.vertices
    if len(verts) % 2:
        return
    options = {v: [e for e in g.incident(v) if not g.is_loop(e)] for v in verts}
    matched = set()
    chosen = []
    count = 0

    def alive():
        for v in verts:
            if v not in matched and not any(g.other_end(e, v) not in matched for e in options[v]):
                return False
        return True

    def rec():
        nonlocal count
        if limit is not None and count >= limit:
            return
        free = next((v for v in verts if v not in matched), None)
        if free is None:
            count += 1
            yield frozenset(chosen)
            return
        for e in options[free]:
            u = g.other_end(e, free)
            if u in matched:
                continue
            matched.update((free, u))
            chosen.append(e)
            if alive():
                yield from rec()
            chosen.pop()
            matched.difference_update((free, u))

    yield from rec()


def _is_cubic(g: MultiGraph) -> bool:
    return all(d == 3 for d in g.degrees().values())


def matching_pair_small_intersection(g: MultiGraph, w: dict | None = None, limit: int = 200000):
    """Two perfect matchings minimising w(M1 ∩ M2); asserts the 1/15 bound."""
    if not _is_cubic(g):
        raise PreconditionError("graph must be cubic")
    _require_2ec(g)
    w = {e: 1 for e in g.edges} if w is None else dict(w)
    pms = sorted((tuple(sorted(m)) for m in perfect_matchings(g, limit + 1)))
    if not pms:
        raise InvariantViolation("bridgeless cubic graph without a perfect matching")
    if len(pms) > limit:
        raise MatchingBudgetExceeded(f"more than {limit} perfect matchings")
    best = None
    pairs = itertools.combinations(pms, 2) if len(pms) > 1 else [(pms[0], pms[0])]
    for m1, m2 in pairs:
        cost = sum(w[e] for e in set(m1) & set(m2))
        if best is None or cost < best[0]:
            best = (cost, m1, m2)
    cost, m1, m2 = best
    total = sum(w.values())
    if 15 * cost > total:
        raise InvariantViolation(f"matching pair intersection {cost} exceeds w(E)/15 = {total}/15")
    return frozenset(m1), frozenset(m2)


# ---------------------------------------------------------------------------
# lifting


@dataclass(frozen=True)
class WeightedCubicReduction:
    source: MultiGraph
    lifted: MultiGraph
    suppressed: MultiGraph
    paths: dict
    weights: dict
    lifts: tuple = ()
    loops: tuple = ()
    cyclic3: bool = False
    notes: tuple = field(default=())

    def path_of(self) -> dict:
        """Lifted-graph edge id -> edge of the suppressed graph containing it."""
        return {f: e for e, path in self.paths.items() for f in path}


def _lift(g: MultiGraph, v, e, f, x) -> MultiGraph:
    edges = dict(g.edges)
    for h in (e, f):
        a, b = edges[h]
        edges[h] = (x, b) if a == v else (a, x)
    return MultiGraph(list(g.vertices) + [x], edges)


def _too_big(deg: int, j: int | None) -> bool:
    if j is None:
        return deg > 3
    return deg >= 4 if deg % 2 == 0 else deg >= 2 * j + 3


def mader_lift_to_subcubic(g: MultiGraph, j: int | None = None) -> WeightedCubicReduction:
    """Split off edge pairs until the degree targets hold, then suppress.

    ``j=None`` targets a subcubic graph; an integer ``j`` lifts vertices of
    even degree >= 4 and odd degree >= 2j+3.  2-edge-connectivity is
    rechecked after every lift, and cyclic 3-edge-connectivity too when the
    input has it.  Candidate pairs are tried in edge-id order.
    """
    _require_2ec(g)
    if is_eulerian(g):
        raise PreconditionError("Eulerian graphs need no reduction")
    loops = tuple(e for e in g.edge_ids if g.is_loop(e))
    h = g.without_edges(loops) if loops else g
    cyc3 = j is None and is_cyclically_k_edge_connected(h, 3)

    def ok(c):
        if not is_k_edge_connected(c, 2):
            return False
        return not cyc3 or is_cyclically_k_edge_connected(c, 3)

    lifts = []
    while True:
        todo = [v for v in h.vertices if _too_big(h.degree(v), j)]
        if not todo:
            break
        v = todo[0]
        x = max(h.vertices) + 1
        for e, f in itertools.combinations(sorted(h.incident(v)), 2):
            cand = _lift(h, v, e, f, x)
            if ok(cand):
                h = cand
                lifts.append((v, e, f, x))
                break
        else:
            raise InvariantViolation(f"no admissible lift at vertex {v}")
    sup, paths = suppress_degree_two(h)
    weights = {e: len(p) for e, p in paths.items()}
    if sum(weights.values()) + len(loops) != g.m:  # pragma: no cover - bookkeeping
        raise InvariantViolation("path weights do not add up to |E|")
    return WeightedCubicReduction(g, h, sup, paths, weights, tuple(lifts), loops, cyc3)


# ---------------------------------------------------------------------------
# 14/15 and 2j/(2j+1)


def fourteen_fifteenths_flow(g: MultiGraph) -> FlowCertificate:
    """A Z2×Z2 flow with support at least 14|E|/15 from two perfect matchings."""
    _require_2ec(g)
    if is_eulerian(g):
        return _check_bound(_eulerian_cert(g, Z2Z2), Fraction(1))
    red = mader_lift_to_subcubic(g)
    m1, m2 = matching_pair_small_intersection(red.suppressed, red.weights)
    owner = red.path_of()
    vals = {}
    for e in g.edges:
        if e in red.loops:
            vals[e] = (1, 1)
            continue
        p = owner[e]
        vals[e] = (0 if p in m1 else 1, 0 if p in m2 else 1)
    cert = certify(g, g.orientation(), EdgeLabelling(vals, Z2Z2))
    return _check_bound(cert, Fraction(14, 15))


def two_flow_bound(g: MultiGraph, j: int = 1) -> FlowCertificate:
    """An integer 2-flow with support at least 2j|E|/(2j+1).

    Values of j >= 2 are experimental: the lifting schedule may leave a
    non-regular suppressed graph, which is reported as a precondition error.
    """
    if j < 1:
        raise ValueError("j must be positive")
    _require_2ec(g, 2 * j)
    if is_eulerian(g):
        return _check_bound(_eulerian_cert(g, None), Fraction(1))
    red = mader_lift_to_subcubic(g, j)
    degs = set(red.suppressed.degrees().values())
    if degs != {2 * j + 1}:
        raise PreconditionError(f"suppressed graph is not {2 * j + 1}-regular")
    best = None
    for m in perfect_matchings(red.suppressed):
        key = (sum(red.weights[e] for e in m), tuple(sorted(m)))
        if best is None or key < best:
            best = key
    if best is None:
        raise InvariantViolation("suppressed graph has no perfect matching")
    cost, m = best
    if (2 * j + 1) * cost > g.m:
        raise InvariantViolation("lightest perfect matching exceeds |E|/(2j+1)")
    dropped = {f for e in m for f in red.paths[e]}
    keep = [e for e in g.edges if e not in dropped]
    o = g.orientation()
    cert = certify(g, o, eulerian_two_flow(g, o, keep))
    return _check_bound(cert, Fraction(2 * j, 2 * j + 1))

"""Bonus accounting, contractible/reducible checks, G• and GΔ, and exhaustive sweeps."""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from pathlib import Path

from .ears import (
    Ear,
    EarDecomposition,
    EarLabelling,
    NotTwoEdgeConnected,
    best_labelling,
    classify_equitable,
    ear_labellings,
    find_ears,
    is_ear_of,
    psi_removal,
)
from .flows import (
    SCHEMA_VERSION,
    Z3,
    EdgeLabelling,
    InvariantViolation,
    WeightedGraph,
    certificate_payload,
    gain_of,
)
from .generators import tightness_instance
from .graph import (
    GraphError,
    MultiGraph,
    Orientation,
    PreconditionError,
    bond_cuts,
    cut_size,
    cyclomatic_number,
    is_cyclically_k_edge_connected,
    is_k_edge_connected,
    is_subdivision_of_3ec,
    small_cuts,
    suppress_degree_two,
)
from .graphio import write_edgelist
from .solver import BudgetExceeded, max_support_flow, sample_coset

CUT_SEARCH_LIMIT = 20


# ---------------------------------------------------------------------------
# bonus


@dataclass(frozen=True)
class BonusEntry:
    ear: Ear
    equitable: bool
    bonus: int
    residue: int
    usable: bool = True


@dataclass(frozen=True)
class BonusLedger:
    entries: tuple

    @property
    def total(self) -> int:
        return sum(x.bonus for x in self.entries)

    @property
    def total_usable(self) -> int:
        return sum(x.bonus for x in self.entries if x.usable)

    def to_json(self) -> dict:
        return {
            "total": self.total,
            "total_usable": self.total_usable,
            "ears": [
                {
                    "edges": list(x.ear.edges),
                    "length": x.ear.length,
                    "equitable": x.equitable,
                    "bonus": x.bonus,
                    "usable": x.usable,
                }
                for x in self.entries
            ],
        }


def bonus_of(wg: WeightedGraph, unusable: frozenset = frozenset()) -> BonusLedger:
    """Per-ear bonus over the ear partition; ``unusable`` holds edge ids of flagged ears."""
    g = wg.graph
    if g.m and not is_k_edge_connected(g, 2):
        raise NotTwoEdgeConnected("bonus needs a 2-edge-connected graph")
    entries = []
    for p in find_ears(g):
        eq = classify_equitable(p, wg)
        entries.append(BonusEntry(p, eq.equitable, eq.bonus, p.length % 3, not (p.edge_set & unusable)))
    return BonusLedger(tuple(entries))


def _bonus_total(wg: WeightedGraph) -> int:
    return bonus_of(wg).total if wg.graph.m else 0


# ---------------------------------------------------------------------------
# contractible / reducible


def _ears_covering(wg: WeightedGraph, edges: frozenset) -> list:
    ears = find_ears(wg.graph)
    inside = []
    for p in ears:
        common = p.edge_set & edges
        if common and common != p.edge_set:
            raise PreconditionError("subgraph is not a union of ears")
        if common:
            inside.append(p)
    return inside


def verify_contractible(wg: WeightedGraph, h, d: EarDecomposition) -> bool:
    """Does the full decomposition ``d`` of ``h`` have gain at least bonus(h)?"""
    edges = frozenset(h.edges if isinstance(h, MultiGraph) else h)
    ears = _ears_covering(wg, edges)
    sub = wg.graph.edge_subgraph(edges)
    if not d.full:
        raise PreconditionError("a full ear decomposition of H is required")
    d.validate(sub)
    return d.gain() >= sum(classify_equitable(p, wg).bonus for p in ears)


@dataclass(frozen=True)
class ReducibleCheck:
    ok: bool
    clauses: dict
    diagnosis: str = ""
    gain: int = 0
    bonus_drop: int | None = None

    def __bool__(self):
        return self.ok


def _as_ear_labelling(p: Ear, psi) -> EarLabelling:
    if isinstance(psi, EarLabelling):
        return psi
    lab = psi if isinstance(psi, EdgeLabelling) else EdgeLabelling(dict(psi), Z3)
    return EarLabelling(p, lab, ())


def verify_reducible(wg: WeightedGraph, ears, labellings) -> ReducibleCheck:
    """Check the four reducibility clauses for ears P1..Pl and labellings ψ1..ψl.

    Clause 1: the ears form a partial ear decomposition (checked while
    peeling Pl first).  Clause 2: what remains is empty or a subdivision of
    a 3-edge-connected graph.  Clause 3: each ψj is an ear labelling in the
    current removal graph.  Clause 4: Σ gain(ψj) >= bonus(G) - bonus(G').
    """
    ears = list(ears)
    labs = [_as_ear_labelling(p, x) for p, x in zip(ears, labellings)]
    clauses = {1: True, 2: False, 3: True, 4: False}
    if len(labs) != len(ears) or not ears:
        clauses[1] = False
        return ReducibleCheck(False, clauses, "clause 1: need one labelling per ear")
    seen = set()
    for p in ears:
        if seen & p.edge_set:
            clauses[1] = False
            return ReducibleCheck(False, clauses, "clause 1: ears share an edge")
        seen |= p.edge_set
    cur = wg
    gain = 0
    for j in range(len(ears) - 1, -1, -1):
        p, psi = ears[j], labs[j]
        if not is_ear_of(cur.graph, p):
            clauses[1] = False
            return ReducibleCheck(False, clauses, f"clause 1: P{j + 1} is not an ear of the current graph")
        if set(psi.labelling.values) != p.edge_set:
            clauses[3] = False
            return ReducibleCheck(False, clauses, f"clause 3: ψ{j + 1} is not defined on exactly E(P{j + 1})")
        try:
            cur = psi_removal(cur, p, EarLabelling(p, psi.labelling, psi.forward))
        except (ValueError, InvariantViolation) as exc:
            clauses[3] = False
            return ReducibleCheck(False, clauses, f"clause 3: ψ{j + 1}: {exc}")
        gain += gain_of(psi.labelling.support_size, p.length)
    rest = cur.graph
    clauses[2] = rest.m == 0 or is_subdivision_of_3ec(rest)
    if not clauses[2]:
        return ReducibleCheck(False, clauses, "clause 2: remainder is not a subdivision of a 3-edge-connected graph", gain)
    drop = _bonus_total(wg) - _bonus_total(cur)
    clauses[4] = gain >= drop
    diag = "" if clauses[4] else f"clause 4: gain {gain} < bonus drop {drop}"
    return ReducibleCheck(clauses[4], clauses, diag, gain, drop)


def find_reducible_witness(wg: WeightedGraph, max_ears: int = 2):
    """Shallow search over single ears and ordered ear pairs; None if nothing found."""
    base = find_ears(wg.graph)
    for p in base:
        for psi in ear_labellings(p, wg):
            if verify_reducible(wg, [p], [psi]).ok:
                return [p], [psi]
    if max_ears < 2:
        return None
    for p2 in base:
        for psi2 in ear_labellings(p2, wg):
            try:
                mid = psi_removal(wg, p2, psi2)
            except (ValueError, InvariantViolation):
                continue
            try:
                nxt = find_ears(mid.graph)
            except GraphError:
                continue
            for p1 in nxt:
                for psi1 in ear_labellings(p1, mid):
                    if verify_reducible(wg, [p1, p2], [psi1, psi2]).ok:
                        return [p1, p2], [psi1, psi2]
    return None


# ---------------------------------------------------------------------------
# G•


@dataclass(frozen=True)
class BulletGraph:
    weighted: WeightedGraph
    x: frozenset
    w: int
    source: WeightedGraph = field(repr=False)
    crossing_ears: tuple = field(repr=False, default=())
    unusable: frozenset = frozenset()  # edge ids of the ears at w

    @property
    def graph(self) -> MultiGraph:
        return self.weighted.graph

    def ears(self) -> list:
        return find_ears(self.graph)

    def is_usable(self, p: Ear) -> bool:
        return not (p.edge_set & self.unusable)

    def ledger(self) -> BonusLedger:
        return bonus_of(self.weighted, self.unusable)


def _lift_vertices(paths: dict, g: MultiGraph, xs: set) -> set:
    """Add interior vertices of suppressed paths whose two ends lie in ``xs``."""
    out = set(xs)
    for path in paths.values():
        verts = set()
        for e in path:
            verts.update(g.endpoints(e))
        inner = verts - {v for v in verts if g.degree(v) != 2}
        outer = verts - inner
        if outer and outer <= xs:
            out |= inner
    return out


def minimal_three_cut(g: MultiGraph):
    """Smallest X with d(X) = 3 whose induced graph has cyclomatic number >= 2.

    Search runs on the suppressed graph and the answer is lifted back
    through the subdivided paths.  Small graphs use the subset scan, larger
    ones delete edge triples (equivalent once the graph is 2-edge-connected).
    """
    s, paths = suppress_degree_two(g)
    if s.n <= CUT_SEARCH_LIMIT:
        sides = [xs for xs, d in small_cuts(s, 3, half=False) if d == 3]
    else:
        sides = bond_cuts(s, 3, half=False)
    cands = []
    for xs in sides:
        if cyclomatic_number(s, xs) >= 2:
            cands.append((len(xs), tuple(sorted(xs))))
    if not cands:
        return None
    xs = set(min(cands)[1])
    # map back: suppressed edges keep original edge ids via ``paths``
    return frozenset(_lift_vertices(paths, g, xs))


def push_three_cut(wg: WeightedGraph) -> BulletGraph:
    """Identify everything beyond the minimal cyclic 3-cut into a new vertex w."""
    g = wg.graph
    if not is_subdivision_of_3ec(g):
        raise PreconditionError("input must be a subdivision of a 3-edge-connected graph")
    x = minimal_three_cut(g)
    if x is None:
        raise PreconditionError("no 3-edge-cut with at least two cycles on one side")
    cut = {e for e, (u, v) in g.edges.items() if (u in x) != (v in x)}
    ears = find_ears(g)
    crossing = [p for p in ears if p.edge_set & cut]
    interior = {v for p in crossing for v in p.interior}
    big_w = [v for v in g.vertices if v not in x and v not in interior]
    w = max(g.vertices) + 1
    ws = set(big_w)
    fold = lambda v: w if v in ws else v  # noqa: E731
    edges = {}
    direction = {}
    for e, (t, h) in wg.orientation.direction.items():
        a, b = fold(t), fold(h)
        if a == w and b == w:
            continue
        edges[e] = (a, b)
        direction[e] = (a, b)
    keep = [v for v in g.vertices if v not in ws] + [w]
    mu = {v: wg.mu[v] for v in keep if v != w}
    mu[w] = sum(wg.mu[v] for v in big_w) % 3
    h = MultiGraph(keep, edges)
    bw = WeightedGraph(h, Orientation(direction), mu, Z3)
    at_w = frozenset(e for p in find_ears(h) if w in p.ends for e in p.edges)
    return BulletGraph(bw, x, w, wg, tuple(crossing), at_w)


def check_bullet3ec(b: BulletGraph) -> list:
    """3-cuts δ(Z) with w ∉ Z violating: X ⊆ Z or Z induces at most one cycle."""
    g = b.graph
    if g.n <= CUT_SEARCH_LIMIT:
        sides = [zs for zs, d in small_cuts(g, 3, half=True) if d == 3]
    else:
        sides = bond_cuts(g, 3, half=True)
    bad = []
    for zs in sides:  # w is the largest vertex, never in Z
        if b.x <= zs or cyclomatic_number(g, zs) <= 1:
            continue
        bad.append(frozenset(zs))
    return bad


# ---------------------------------------------------------------------------
# GΔ


@dataclass(frozen=True)
class InnerTriangle:
    vertices: tuple  # branch vertices in the suppressed G•
    ears: tuple  # G• edge ids per side
    lengths: tuple


@dataclass(frozen=True)
class TriangleType:
    kind: str | None
    residues: tuple
    violation: bool


def triangle_type(lengths) -> TriangleType:
    residues = tuple(sorted(x % 3 for x in lengths))
    kind = "".join(map(str, residues))
    ok = kind in ("111", "112", "222")
    return TriangleType(kind if ok else None, residues, not ok)


def inner_triangles(b: BulletGraph) -> list:
    s, paths = suppress_degree_two(b.graph)
    out = []
    verts = [v for v in s.vertices if v != b.w]
    for tri in itertools.combinations(verts, 3):
        sub = s.induced(tri)
        if sub.m != 3 or any(s.is_loop(e) for e in sub.edges):
            continue
        pairs = {frozenset(s.endpoints(e)) for e in sub.edges}
        if len(pairs) != 3 or cut_size(s, tri) != 3:
            continue
        sides = tuple(paths[e] for e in sorted(sub.edges))
        out.append(InnerTriangle(tri, sides, tuple(len(p) for p in sides)))
    used = {}
    for t in out:
        for v in t.vertices:
            if v in used:
                raise InvariantViolation(f"inner triangles {used[v]} and {t.vertices} share vertex {v}")
            used[v] = t.vertices
    return out


def classify_triangle(b: BulletGraph, t: InnerTriangle) -> TriangleType:
    if t not in inner_triangles(b):
        raise ValueError("not an inner triangle of this G•")
    return triangle_type(t.lengths)


@dataclass(frozen=True)
class DeltaGraph:
    graph: MultiGraph
    provenance: dict
    residue: dict
    length: dict
    triangles: tuple
    cubic: bool
    cyclically_4ec: bool
    violations: tuple = ()

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "kind": "delta",
            "edgelist": write_edgelist(self.graph),
            "vertices": [[v, self.provenance[v]] for v in self.graph.vertices],
            "residues": [[e, self.residue[e], self.length[e]] for e in self.graph.edge_ids],
            "triangles": [
                {"vertices": list(t.vertices), "lengths": list(t.lengths), "type": triangle_type(t.lengths).kind}
                for t in self.triangles
            ],
            "cubic": self.cubic,
            "cyclically_4ec": self.cyclically_4ec,
            "violations": list(self.violations),
        }


def build_delta(b: BulletGraph) -> DeltaGraph:
    """Contract inner triangles of G•, suppress degree-2 vertices, record residues."""
    s, paths = suppress_degree_two(b.graph)
    tris = inner_triangles(b)
    nxt = max(s.vertices) + 1
    rep = {}
    prov = {}
    for i, t in enumerate(tris):
        for v in t.vertices:
            rep[v] = nxt
        prov[nxt] = f"triangle:{i}"
        nxt += 1
    edges = {}
    for e, (u, v) in s.edges.items():
        a, c = rep.get(u, u), rep.get(v, v)
        if a == c and u in rep:
            continue  # triangle side
        edges[e] = (a, c)
    h = MultiGraph([rep.get(v, v) for v in s.vertices], edges)
    d, dpaths = suppress_degree_two(h)
    lengths = {e: sum(len(paths[f]) for f in dpaths[e]) for e in d.edges}
    for v in d.vertices:
        prov.setdefault(v, "w" if v == b.w else "triad")
    prov = {v: prov[v] for v in d.vertices}
    cubic = all(x == 3 for x in d.degrees().values())
    cyc4 = d.m > 0 and is_cyclically_k_edge_connected(d, 4)
    violations = []
    if not cubic:
        violations.append("not cubic")
    if not cyc4:
        violations.append("not cyclically 4-edge-connected")
    for t in tris:
        tt = triangle_type(t.lengths)
        if tt.violation:
            violations.append(f"triangle {list(t.vertices)} has residues {''.join(map(str, tt.residues))}")
    return DeltaGraph(
        d, prov, {e: x % 3 for e, x in lengths.items()}, lengths, tuple(tris), cubic, cyc4, tuple(violations)
    )


def is_conforming(wg: WeightedGraph) -> bool:
    """Inputs for which GΔ must come out cubic and cyclically 4-edge-connected:
    subdivisions of cubic 3-edge-connected graphs admitting the 3-cut push."""
    g = wg.graph
    if not is_subdivision_of_3ec(g):
        return False
    s, _ = suppress_degree_two(g)
    if any(d != 3 for d in s.degrees().values()):
        return False
    return minimal_three_cut(g) is not None


# ---------------------------------------------------------------------------
# workhorse


@dataclass(frozen=True)
class WorkhorseReport:
    ok: bool
    gain: int
    bonus: int
    slack: int
    support: int
    edges: int
    optimal: bool
    certificate: object = field(repr=False, default=None)
    ledger: BonusLedger | None = field(repr=False, default=None)

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.support, self.edges)

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "kind": "workhorse",
            "ok": self.ok,
            "gain": self.gain,
            "bonus": self.bonus,
            "slack": self.slack,
            "support": self.support,
            "edges": self.edges,
            "optimal": self.optimal,
        }


def workhorse_verify(wg: WeightedGraph, budget: int | None = None, mode: str = "optimum", workers: int = 1) -> WorkhorseReport:
    """Compare the best achievable gain with bonus(G).

    ``mode="witness"`` stops at the first labelling meeting the bonus (and
    5/6 of |E| when μ = 0); the reported slack is then only a lower bound.
    """
    g = wg.graph
    if not is_subdivision_of_3ec(g):
        raise PreconditionError("graph must be a subdivision of a 3-edge-connected graph")
    ledger = bonus_of(wg)
    bonus = ledger.total
    stop = None
    if mode == "witness":
        stop = ceil(Fraction(bonus + 16 * g.m, 24))
        if wg.is_zero:
            stop = max(stop, ceil(Fraction(5 * g.m, 6)))
    elif mode != "optimum":
        raise ValueError(f"unknown mode {mode!r}")
    rep = max_support_flow(wg, budget=budget, stop_at=stop, workers=workers, partial_ok=stop is not None)
    if stop is not None and not rep.hit and rep.enumerated < rep.coset_size:
        raise BudgetExceeded(rep)
    gain = rep.certificate.gain
    return WorkhorseReport(gain >= bonus, gain, bonus, gain - bonus, rep.support, g.m, rep.optimal, rep.certificate, ledger)


def zero_sum_weights(vertices, mode="exhaustive", seed=None, count=None):
    """Z3 weights summing to zero; the last vertex completes the sum."""
    vs = list(vertices)
    if not vs:
        return [{}]
    if mode == "exhaustive":
        out = []
        for vals in itertools.product(range(3), repeat=len(vs) - 1):
            out.append(dict(zip(vs, (*vals, -sum(vals) % 3))))
        return out
    if mode == "sampled":
        if seed is None or count is None:
            raise ValueError("sampled weights need an explicit seed and count")
        rng = random.Random(seed)
        out = []
        for _ in range(count):
            vals = [rng.randrange(3) for _ in vs[:-1]]
            out.append(dict(zip(vs, (*vals, -sum(vals) % 3))))
        return out
    raise ValueError(f"unknown weight mode {mode!r}")


@dataclass
class SweepSummary:
    instances: int = 0
    runs: int = 0
    failures: list = field(default_factory=list)
    ratio_failures: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    min_slack: int | None = None
    tight: list = field(default_factory=list)
    min_ratio: Fraction | None = None

    @property
    def ok(self) -> bool:
        return not self.failures and not self.ratio_failures

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "kind": "sweep",
            "ok": self.ok,
            "instances": self.instances,
            "runs": self.runs,
            "failures": self.failures,
            "ratio_failures": self.ratio_failures,
            "skipped": self.skipped,
            "min_slack": self.min_slack,
            "min_ratio": None if self.min_ratio is None else f"{self.min_ratio.numerator}/{self.min_ratio.denominator}",
            "tight": self.tight,
        }


def _bundle(name, wg, report) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "kind": "reproduction",
        "name": name,
        "edgelist": write_edgelist(wg.graph),
        "orientation": [[e, t, h] for e, (t, h) in wg.orientation.direction.items()],
        "mu": [[v, x] for v, x in wg.mu.items()],
        "gain": report.gain,
        "bonus": report.bonus,
        "ledger": report.ledger.to_json() if report.ledger else None,
        "certificate": certificate_payload(report.certificate) if report.certificate else None,
    }


def counterexample_sweep(
    entries,
    mu_mode="zero",
    seed: int | None = None,
    count: int | None = None,
    exhaustive_max_n: int = 6,
    budget: int | None = None,
    mode: str = "optimum",
    bundle_dir: str | Path | None = None,
    workers: int = 1,
) -> SweepSummary:
    """Run workhorse_verify over catalog entries and weightings.

    ``entries`` holds (name, graph) pairs or objects with ``name``/``graph``.
    ``mu_mode`` is "zero", "exhaustive" (all zero-sum weights on graphs with
    at most ``exhaustive_max_n`` vertices, zero weight otherwise) or
    "sampled" (needs ``seed`` and ``count``).
    """
    out = SweepSummary()
    tight = []
    for item in entries:
        name, g = (item.name, item.graph) if hasattr(item, "graph") else item
        if not is_subdivision_of_3ec(g):
            out.skipped.append({"name": name, "reason": "not a subdivision of a 3-edge-connected graph"})
            continue
        out.instances += 1
        o = g.orientation()
        zero = dict.fromkeys(g.vertices, 0)
        if mu_mode == "zero":
            weights = [zero]
        elif mu_mode == "exhaustive":
            weights = zero_sum_weights(g.vertices) if g.n <= exhaustive_max_n else [zero]
        elif mu_mode == "sampled":
            weights = [zero] + zero_sum_weights(g.vertices, "sampled", seed, count)
        else:
            raise ValueError(f"unknown mu mode {mu_mode!r}")
        for mu in weights:
            wg = WeightedGraph(g, o, mu, Z3)
            try:
                rep = workhorse_verify(wg, budget=budget, mode=mode, workers=workers)
            except BudgetExceeded:
                out.skipped.append({"name": name, "reason": "budget exceeded", "mu": [mu[v] for v in g.vertices]})
                continue
            out.runs += 1
            if out.min_slack is None or rep.slack < out.min_slack:
                out.min_slack = rep.slack
            if rep.slack == 0 and name not in tight:
                tight.append(name)
            if not rep.ok:
                bundle = _bundle(name, wg, rep)
                out.failures.append(bundle)
                if bundle_dir is not None:
                    p = Path(bundle_dir)
                    p.mkdir(parents=True, exist_ok=True)
                    (p / f"{name.replace('/', '_')}_{len(out.failures)}.json").write_text(
                        json.dumps(bundle, indent=2, sort_keys=True)
                    )
            if wg.is_zero:
                if out.min_ratio is None or rep.ratio < out.min_ratio:
                    out.min_ratio = rep.ratio
                if 6 * rep.support < 5 * g.m:
                    out.ratio_failures.append({"name": name, "support": rep.support, "edges": g.m})
    out.tight = tight
    return out


# ---------------------------------------------------------------------------
# tightness of the boundary version


@dataclass(frozen=True)
class TightnessReport:
    ok: bool
    edges: int
    coset_size: int
    supports: tuple
    histogram: tuple

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "kind": "tightness",
            "ok": self.ok,
            "edges": self.edges,
            "coset_size": self.coset_size,
            "supports": list(self.supports),
        }


def verify_subdivision_tightness(base: MultiGraph, budget: int | None = None, samples: int = 100) -> TightnessReport:
    """Every φ with ∂φ = μ on the twice-subdivided base has support exactly 2|E|/3."""
    wg = tightness_instance(base)
    rep = max_support_flow(wg, budget=budget)
    m = wg.graph.m
    supports = tuple(s for s, c in enumerate(rep.histogram) if c)
    ok = rep.optimal and supports == (2 * m // 3,)
    # every 3-edge path must carry three distinct values in host-forward terms
    for phi in sample_coset(wg, samples, seed=1):
        for i, _ in enumerate(base.edge_ids):
            path = [3 * i, 3 * i + 1, 3 * i + 2]
            vals = [phi[f] for f in path]
            ok = ok and len(set(vals)) == 3
    return TightnessReport(ok, m, rep.coset_size, supports, rep.histogram)


__all__ = [
    "BonusLedger",
    "BulletGraph",
    "DeltaGraph",
    "PreconditionError",
    "bonus_of",
    "best_labelling",
    "build_delta",
    "check_bullet3ec",
    "classify_triangle",
    "counterexample_sweep",
    "find_reducible_witness",
    "inner_triangles",
    "push_three_cut",
    "verify_contractible",
    "verify_reducible",
    "verify_subdivision_tightness",
    "workhorse_verify",
]

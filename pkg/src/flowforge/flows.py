"""Group-valued edge labellings, boundaries, certificates and integer lifts."""

from __future__ import annotations

import hashlib
import itertools
import json
import re
from collections import deque
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType

from .graph import GraphError, MultiGraph, Orientation

SCHEMA_VERSION = 1


class InvariantViolation(RuntimeError):
    """A guaranteed property failed; indicates a bug or a false theorem."""


class NotAFlowError(ValueError):
    pass


# ---------------------------------------------------------------------------
# groups


@dataclass(frozen=True)
class GroupSpec:
    """A finite abelian group given as a product of cyclic factors.

    Elements of single-factor groups are plain ints; products use tuples.
    """

    orders: tuple

    def __post_init__(self):
        orders = tuple(int(q) for q in self.orders)
        if not orders or any(q < 2 for q in orders):
            raise ValueError(f"bad cyclic orders {self.orders!r}")
        object.__setattr__(self, "orders", orders)

    @classmethod
    def parse(cls, name: str) -> GroupSpec:
        factors = re.findall(r"z(\d+)", name.lower())
        if not factors or "".join(f"z{f}" for f in factors) != name.lower():
            raise ValueError(f"unknown group {name!r}")
        return cls(tuple(int(f) for f in factors))

    @property
    def name(self) -> str:
        return "".join(f"z{q}" for q in self.orders)

    @property
    def order(self) -> int:
        out = 1
        for q in self.orders:
            out *= q
        return out

    @property
    def cyclic(self) -> bool:
        return len(self.orders) == 1

    @property
    def zero(self):
        return 0 if self.cyclic else (0,) * len(self.orders)

    def normalize(self, x):
        if self.cyclic:
            if isinstance(x, (tuple, list)):
                (x,) = x
            return int(x) % self.orders[0]
        x = tuple(x)
        if len(x) != len(self.orders):
            raise ValueError(f"element {x!r} does not match group {self.name}")
        return tuple(int(a) % q for a, q in zip(x, self.orders))

    def add(self, a, b):
        if self.cyclic:
            return (a + b) % self.orders[0]
        return tuple((x + y) % q for x, y, q in zip(a, b, self.orders))

    def neg(self, a):
        if self.cyclic:
            return -a % self.orders[0]
        return tuple(-x % q for x, q in zip(a, self.orders))

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def scale(self, a, k: int):
        if self.cyclic:
            return a * k % self.orders[0]
        return tuple(x * k % q for x, q in zip(a, self.orders))

    def is_zero(self, a) -> bool:
        return a == self.zero

    def elements(self) -> list:
        """All elements in lexicographic order (matches ``encode``)."""
        if self.cyclic:
            return list(range(self.orders[0]))
        return list(itertools.product(*(range(q) for q in self.orders)))

    def encode(self, a) -> int:
        if self.cyclic:
            return a
        code = 0
        for x, q in zip(a, self.orders):
            code = code * q + x
        return code

    def decode(self, code: int):
        if self.cyclic:
            return code
        out = []
        for q in reversed(self.orders):
            code, r = divmod(code, q)
            out.append(r)
        return tuple(reversed(out))

    def to_json(self, a):
        return a if self.cyclic else list(a)


Z2 = GroupSpec((2,))
Z3 = GroupSpec((3,))
Z2Z2 = GroupSpec((2, 2))
Z3Z3 = GroupSpec((3, 3))
Z2Z3 = GroupSpec((2, 3))


# ---------------------------------------------------------------------------
# labellings and weighted graphs


@dataclass(frozen=True)
class EdgeLabelling:
    """Edge id -> group element, or -> integer when ``group`` is None.

    Integer mode carries the flow bound ``k``: every |value| <= k - 1.
    """

    values: Mapping
    group: GroupSpec | None = Z3
    bound: int | None = None

    def __post_init__(self):
        if self.group is None:
            if self.bound is None:
                raise ValueError("integer labellings need a bound k")
            vals = {e: int(x) for e, x in self.values.items()}
            for e, x in vals.items():
                if abs(x) > self.bound - 1:
                    raise ValueError(f"edge {e}: |{x}| exceeds k-1 = {self.bound - 1}")
        else:
            vals = {e: self.group.normalize(x) for e, x in self.values.items()}
        object.__setattr__(self, "values", MappingProxyType(dict(sorted(vals.items()))))

    def __getitem__(self, e):
        return self.values[e]

    def __len__(self):
        return len(self.values)

    @property
    def zero(self):
        return 0 if self.group is None else self.group.zero

    def support(self) -> frozenset:
        z = self.zero
        return frozenset(e for e, x in self.values.items() if x != z)

    @property
    def support_size(self) -> int:
        return len(self.support())

    def restrict(self, edges: Iterable) -> EdgeLabelling:
        keep = set(edges)
        return EdgeLabelling({e: x for e, x in self.values.items() if e in keep}, self.group, self.bound)

    def union(self, other: EdgeLabelling) -> EdgeLabelling:
        if other.group != self.group:
            raise ValueError("cannot merge labellings over different groups")
        overlap = set(self.values) & set(other.values)
        if overlap:
            raise ValueError(f"labellings overlap on edges {sorted(overlap)[:5]}")
        return EdgeLabelling({**self.values, **other.values}, self.group, self.bound)


def _check_zero_sum(group: GroupSpec, mu: Mapping) -> None:
    total = group.zero
    for x in mu.values():
        total = group.add(total, x)
    if total != group.zero:
        raise ValueError(f"vertex weight is not zero-sum (total {total!r})")


@dataclass(frozen=True)
class WeightedGraph:
    """A graph with an orientation and a zero-sum vertex weight."""

    graph: MultiGraph
    orientation: Orientation
    mu: Mapping
    group: GroupSpec = Z3

    def __post_init__(self):
        self.orientation.check(self.graph)
        mu = {v: self.group.normalize(x) for v, x in self.mu.items()}
        if set(mu) != set(self.graph.vertices):
            raise ValueError("weight must be defined on exactly the vertex set")
        _check_zero_sum(self.group, mu)
        object.__setattr__(self, "mu", MappingProxyType(dict(sorted(mu.items()))))

    @classmethod
    def zero(cls, g: MultiGraph, orientation: Orientation | None = None, group: GroupSpec = Z3):
        return cls(g, orientation or g.orientation(), dict.fromkeys(g.vertices, group.zero), group)

    @classmethod
    def of(cls, g: MultiGraph, mu: Mapping, orientation: Orientation | None = None, group: GroupSpec = Z3):
        return cls(g, orientation or g.orientation(), mu, group)

    @property
    def is_zero(self) -> bool:
        return all(x == self.group.zero for x in self.mu.values())


def boundary(g: MultiGraph, o: Orientation, phi: EdgeLabelling) -> dict:
    """Out-sum minus in-sum at every vertex; a loop contributes nothing."""
    if set(phi.values) != set(g.edges):
        raise GraphError("labelling domain does not match the edge set")
    grp = phi.group
    if grp is None:
        out = dict.fromkeys(g.vertices, 0)
        for e, x in phi.values.items():
            t, h = o[e]
            out[t] += x
            out[h] -= x
        return out
    out = dict.fromkeys(g.vertices, grp.zero)
    for e, x in phi.values.items():
        t, h = o[e]
        if t == h:
            continue
        out[t] = grp.add(out[t], x)
        out[h] = grp.sub(out[h], x)
    return out


def gain_of(support: int, edges: int) -> int:
    """Surplus over the two-thirds baseline: 24|supp| - 16|E|."""
    return 24 * support - 16 * edges


def labelling_gain(phi: EdgeLabelling) -> int:
    return gain_of(phi.support_size, len(phi))


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class FlowCertificate:
    labelling: EdgeLabelling
    boundary_ok: bool
    support_size: int
    gain: int
    ratio: Fraction
    orientation: Orientation = field(repr=False)
    mu: Mapping = field(repr=False)

    @property
    def edge_count(self) -> int:
        return len(self.labelling)

    def digest(self) -> str:
        return certificate_digest(certificate_payload(self, with_digest=False))

    def to_json(self) -> dict:
        return certificate_payload(self)


def is_flow_with_boundary(wg: WeightedGraph, phi: EdgeLabelling) -> FlowCertificate:
    """Check ∂φ = μ and compute support, gain and support ratio."""
    b = boundary(wg.graph, wg.orientation, phi)
    if phi.group is None:
        ok = all(b[v] == 0 for v in b) and wg.is_zero
    else:
        if phi.group != wg.group and not wg.is_zero:
            raise ValueError("labelling group differs from the weight group")
        target = wg.mu if phi.group == wg.group else dict.fromkeys(wg.graph.vertices, phi.group.zero)
        ok = all(b[v] == target[v] for v in b)
    s = phi.support_size
    m = len(phi)
    return FlowCertificate(
        labelling=phi,
        boundary_ok=ok,
        support_size=s,
        gain=gain_of(s, m),
        ratio=Fraction(s, m) if m else Fraction(1),
        orientation=wg.orientation,
        mu=wg.mu,
    )


def certify(g: MultiGraph, o: Orientation, phi: EdgeLabelling, mu: Mapping | None = None) -> FlowCertificate:
    grp = phi.group
    if mu is None:
        wg = WeightedGraph.zero(g, o, grp or Z3)
    else:
        wg = WeightedGraph(g, o, mu, grp or Z3)
    return is_flow_with_boundary(wg, phi)


def _fmt_ratio(r: Fraction) -> str:
    return f"{r.numerator}/{r.denominator}"


def certificate_payload(cert: FlowCertificate, with_digest: bool = True) -> dict:
    phi = cert.labelling
    grp = phi.group
    out = {
        "schema": SCHEMA_VERSION,
        "kind": "flow-certificate",
        "group": "int" if grp is None else grp.name,
    }
    if grp is None:
        out["bound"] = phi.bound
    out["edges"] = [
        {
            "id": e,
            "tail": cert.orientation[e][0],
            "head": cert.orientation[e][1],
            "value": x if grp is None else grp.to_json(x),
        }
        for e, x in phi.values.items()
    ]
    mu_group = grp or Z3
    out["mu"] = [[v, mu_group.to_json(x) if not isinstance(x, int) else x] for v, x in cert.mu.items()]
    out["boundary_ok"] = cert.boundary_ok
    out["support"] = cert.support_size
    out["gain"] = cert.gain
    out["ratio"] = _fmt_ratio(cert.ratio)
    if with_digest:
        out["digest"] = certificate_digest(out)
    return out


def certificate_digest(payload: Mapping) -> str:
    body = {k: v for k, v in payload.items() if k != "digest"}
    blob = json.dumps(body, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


@dataclass
class CertificateCheck:
    ok: bool
    reason: str = ""
    failing_vertex: object = None
    graph_mismatch: bool = False


def check_certificate(g: MultiGraph, payload: Mapping) -> CertificateCheck:
    """Recompute every claim in a serialized certificate against ``g``."""
    try:
        edges = payload["edges"]
        ids = [int(r["id"]) for r in edges]
        if sorted(ids) != sorted(g.edges):
            return CertificateCheck(False, "certificate edges do not match the graph", graph_mismatch=True)
        direction = {}
        for r in edges:
            e, t, h = int(r["id"]), r["tail"], r["head"]
            if sorted((t, h)) != sorted(g.endpoints(e)):
                return CertificateCheck(False, f"edge {e} endpoints differ from the graph", graph_mismatch=True)
            direction[e] = (t, h)
        mu_vertices = [v for v, _ in payload["mu"]]
        if sorted(mu_vertices) != list(g.vertices):
            return CertificateCheck(False, "certificate vertices do not match the graph", graph_mismatch=True)
        gname = payload["group"]
        if gname == "int":
            grp = None
            phi = EdgeLabelling({int(r["id"]): r["value"] for r in edges}, None, int(payload["bound"]))
            mu_group = Z3
        else:
            grp = GroupSpec.parse(gname)
            phi = EdgeLabelling({int(r["id"]): r["value"] for r in edges}, grp)
            mu_group = grp
        mu = {v: mu_group.normalize(x) for v, x in payload["mu"]}
        o = Orientation(direction)
        wg = WeightedGraph(g, o, mu, mu_group)
    except (KeyError, TypeError, ValueError) as exc:
        return CertificateCheck(False, f"malformed certificate: {exc}")
    b = boundary(g, o, phi)
    for v in g.vertices:
        target = 0 if grp is None else mu[v]
        if b[v] != target:
            return CertificateCheck(False, f"boundary mismatch at vertex {v}", failing_vertex=v)
    cert = is_flow_with_boundary(wg, phi)
    claims = {
        "boundary_ok": cert.boundary_ok,
        "support": cert.support_size,
        "gain": cert.gain,
        "ratio": _fmt_ratio(cert.ratio),
    }
    for key, value in claims.items():
        if payload.get(key) != value:
            return CertificateCheck(False, f"claimed {key}={payload.get(key)!r}, recomputed {value!r}")
    if "digest" in payload and payload["digest"] != certificate_digest(payload):
        return CertificateCheck(False, "digest mismatch")
    if not cert.boundary_ok:
        return CertificateCheck(False, "boundary_ok is false")
    return CertificateCheck(True)


# ---------------------------------------------------------------------------
# integer lifts


def lift_modular_to_integer(g: MultiGraph, o: Orientation, phi: EdgeLabelling) -> EdgeLabelling:
    """Turn a Z3 flow into an integer 3-flow with the same support.

    Start from the representative in {1, 2} on the support, then push ±3
    corrections along residual paths from surplus to deficit vertices.
    """
    if phi.group != Z3:
        raise ValueError("lift expects a Z3 labelling")
    b3 = boundary(g, o, phi)
    bad = [v for v, x in b3.items() if x]
    if bad:
        raise NotAFlowError(f"not a Z3 flow: boundary {b3[bad[0]]} at vertex {bad[0]}")
    f = {e: x for e, x in phi.values.items()}
    bnd = dict.fromkeys(g.vertices, 0)
    for e, x in f.items():
        t, h = o[e]
        bnd[t] += x
        bnd[h] -= x
    cap = sum(abs(x) for x in bnd.values()) // 6 + 1
    for _ in range(cap + 1):
        sources = [v for v in g.vertices if bnd[v] > 0]
        if not sources:
            break
        src = sources[0]
        parent = {src: None}
        queue = deque([src])
        sink = None
        while queue and sink is None:
            a = queue.popleft()
            for e in g.incident(a):
                t, h = o[e]
                if t == h or f[e] == 0:
                    continue
                if t == a and f[e] > 0:
                    nxt = h
                elif h == a and f[e] < 0:
                    nxt = t
                else:
                    continue
                if nxt in parent:
                    continue
                parent[nxt] = (a, e)
                if bnd[nxt] < 0:
                    sink = nxt
                    break
                queue.append(nxt)
        if sink is None:
            raise InvariantViolation(f"no residual path from surplus vertex {src}")
        v = sink
        while parent[v] is not None:
            a, e = parent[v]
            f[e] += -3 if o[e][0] == a else 3
            v = a
        bnd[src] -= 3
        bnd[sink] += 3
    else:
        raise InvariantViolation("integer lift did not converge")
    if any(bnd.values()):
        raise InvariantViolation("integer lift did not converge")
    out = EdgeLabelling(f, None, 3)
    for e in f:
        if (f[e] - phi[e]) % 3 or (f[e] == 0) != (phi[e] == 0):
            raise InvariantViolation(f"lift broke congruence on edge {e}")
    return out


def eulerian_two_flow(g: MultiGraph, o: Orientation, edges: Iterable | None = None) -> EdgeLabelling:
    """A ±1 integer flow on an even subgraph (0 on the remaining edges).

    Each component of the subgraph is traversed by an Euler circuit; an
    edge gets +1 when traversed tail to head.
    """
    chosen = set(g.edges) if edges is None else set(edges)
    h = g.edge_subgraph(chosen)
    odd = [v for v in h.vertices if h.degree(v) % 2]
    if odd:
        raise ValueError(f"subgraph is not even (vertex {odd[0]} has odd degree)")
    f = dict.fromkeys(g.edges, 0)
    used = set()
    for start in h.vertices:
        if all(e in used for e in h.incident(start)):
            continue
        # Hierholzer on edge ids
        stack = [(start, None)]
        while stack:
            v, _ = stack[-1]
            nxt = next((e for e in h.incident(v) if e not in used), None)
            if nxt is None:
                stack.pop()
                continue
            used.add(nxt)
            w = h.other_end(nxt, v)
            f[nxt] = 1 if o[nxt][0] == v else -1
            stack.append((w, nxt))
    return EdgeLabelling(f, None, 2)


PAIR_CLASSES = (
    ((0, 1), (0, 2)),
    ((1, 0), (2, 0)),
    ((1, 1), (2, 2)),
    ((1, 2), (2, 1)),
)


def pair_class_counts(phi2: EdgeLabelling) -> tuple:
    """Edge counts in the four inverse-pair classes of nonzero Z3×Z3 elements."""
    if phi2.group != Z3Z3:
        raise ValueError("pair classes are defined for Z3xZ3 labellings")
    lookup = {x: i for i, pair in enumerate(PAIR_CLASSES) for x in pair}
    counts = [0, 0, 0, 0]
    for e, x in phi2.values.items():
        if x == (0, 0):
            raise ValueError(f"edge {e} carries zero; labelling must be nowhere-zero")
        counts[lookup[x]] += 1
    return tuple(counts)

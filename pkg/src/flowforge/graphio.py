"""Edgelist and graph6 ingestion, canonical hashing and catalog manifests."""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import networkx as nx

from . import generators
from .graph import MultiGraph


class GraphParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


# ---------------------------------------------------------------------------
# edgelist: "n m" header, then m lines "u v"; '#' starts a comment


def parse_edgelist(text: str) -> MultiGraph:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append((lineno, line.split()))
    if not rows:
        raise GraphParseError("empty input", 1)
    lineno, head = rows[0]
    if len(head) != 2 or not all(t.isdigit() for t in head):
        raise GraphParseError("header must be 'n m' with non-negative integers", lineno)
    n, m = int(head[0]), int(head[1])
    if len(rows) - 1 != m:
        where = rows[-1][0] if len(rows) - 1 > m else rows[-1][0] + 1
        raise GraphParseError(f"header announces {m} edges, found {len(rows) - 1}", where)
    edges = []
    for lineno, toks in rows[1:]:
        if len(toks) != 2 or not all(t.lstrip("-").isdigit() for t in toks):
            raise GraphParseError("edge line must be 'u v'", lineno)
        u, v = int(toks[0]), int(toks[1])
        if not (0 <= u < n and 0 <= v < n):
            raise GraphParseError(f"vertex out of range 0..{n - 1}", lineno)
        edges.append((u, v))
    return MultiGraph(range(n), edges)


def write_edgelist(g: MultiGraph) -> str:
    """Vertices are renumbered 0..n-1 in sorted order; edges follow id order."""
    index = {v: i for i, v in enumerate(g.vertices)}
    lines = [f"{g.n} {g.m}"]
    lines += [f"{index[u]} {index[v]}" for u, v in (g.endpoints(e) for e in g.edge_ids)]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# graph6 (simple graphs only)


def parse_graph6(text: str) -> MultiGraph:
    s = text.strip()
    if s.startswith(">>graph6<<"):
        s = s[len(">>graph6<<"):]
    try:
        h = nx.from_graph6_bytes(s.encode("ascii"))
    except (ValueError, nx.NetworkXError) as exc:
        raise GraphParseError(f"bad graph6 string: {exc}") from None
    return generators.from_networkx(h)


def write_graph6(g: MultiGraph) -> str:
    pairs = [tuple(sorted(g.endpoints(e))) for e in g.edge_ids]
    if any(u == v for u, v in pairs):
        raise ValueError("graph6 cannot encode loops; use the edgelist format")
    if len(set(pairs)) != len(pairs):
        raise ValueError("graph6 cannot encode parallel edges; use the edgelist format")
    h = nx.Graph()
    index = {v: i for i, v in enumerate(g.vertices)}
    h.add_nodes_from(range(g.n))
    h.add_edges_from((index[u], index[v]) for u, v in pairs)
    return nx.to_graph6_bytes(h, header=False).decode("ascii").strip()


def parse_graph6_lines(text: str) -> list:
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            out.append(parse_graph6(line))
        except GraphParseError as exc:
            raise GraphParseError(str(exc), lineno) from None
    return out


def parse(source, format: str | None = None) -> MultiGraph:
    """Read a graph from a path or literal text (format inferred when omitted)."""
    text = None
    suffix = ""
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source and Path(source).is_file()):
        p = Path(source)
        text = p.read_text()
        suffix = p.suffix.lower()
    else:
        text = str(source)
    fmt = format or ("graph6" if suffix in (".g6", ".graph6") else None)
    if fmt is None:
        first = next((ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")), "")
        fmt = "edgelist" if re.fullmatch(r"\d+\s+\d+", first) else "graph6"
    if fmt == "edgelist":
        return parse_edgelist(text)
    if fmt == "graph6":
        graphs = parse_graph6_lines(text)
        if len(graphs) != 1:
            raise GraphParseError(f"expected one graph6 line, found {len(graphs)}")
        return graphs[0]
    raise ValueError(f"unknown format {format!r}")


# ---------------------------------------------------------------------------
# hashing


def canonical_hash(g: MultiGraph, rounds: int = 4) -> str:
    """Colour-refinement invariant; equal for isomorphic graphs, not a full canonical form."""
    colour = {v: (g.degree(v), sum(1 for e in g.incident(v) if g.is_loop(e))) for v in g.vertices}
    for _ in range(rounds):
        colour = {
            v: (colour[v], tuple(sorted(colour[g.other_end(e, v)] for e in g.incident(v) if not g.is_loop(e))))
            for v in g.vertices
        }
        # compress to keep the nesting shallow
        names = {c: i for i, c in enumerate(sorted(set(colour.values())))}
        colour = {v: (names[c], repr(c)) for v, c in colour.items()}
        colour = {v: hashlib.sha1(c[1].encode()).hexdigest()[:16] for v, c in colour.items()}
    payload = f"{g.n}|{g.m}|" + ",".join(sorted(colour.values()))
    return hashlib.sha256(payload.encode()).hexdigest()


# ---------------------------------------------------------------------------
# catalogs


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    generator: str
    params: tuple
    graph: MultiGraph = field(repr=False)
    note: str = ""


def data_path(name: str) -> Path:
    return Path(str(resources.files("flowforge") / "data" / name))


def load_catalog(name: str) -> list:
    """Graphs from a packaged graph6 catalog file."""
    return parse_graph6_lines(data_path(name).read_text())


def _parse_params(raw: str) -> tuple:
    out = []
    for tok in (t.strip() for t in raw.split(",")):
        if not tok:
            continue
        out.append(int(tok) if re.fullmatch(r"-?\d+", tok) else tok)
    return tuple(out)


def _family(entry_name: str, gen: str, params: tuple) -> list:
    if gen == "named":
        return [CatalogEntry(entry_name, gen, params, generators.named(params[0]))]
    if gen == "catalog":
        graphs = load_catalog(params[0])
        limit = params[1] if len(params) > 1 else None
        graphs = graphs[:limit] if limit is not None else graphs
        return [
            CatalogEntry(f"{entry_name}#{i}", gen, params, h, f"{params[0]} line {i + 1}")
            for i, h in enumerate(graphs)
        ]
    if gen == "tripods":
        fam = generators.tripod_family()
        keep = set(params)
        return [CatalogEntry(f"{entry_name}:{nm}", gen, (nm,), h) for nm, h in fam if not keep or nm in keep]
    if gen == "subdivide":
        base, k = params[0], int(params[1])
        return [CatalogEntry(entry_name, gen, params, generators.subdivide(generators.named(base), k))]
    if gen == "truncate":
        return [CatalogEntry(entry_name, gen, params, generators.truncate(generators.named(params[0])))]
    if gen == "file":
        return [CatalogEntry(entry_name, gen, params, parse(params[0]))]
    raise ValueError(f"unknown generator {gen!r}")


_LINE = re.compile(r"^\s*([\w.#:+-]+)\s*:\s*(\w+)\s*\((.*)\)\s*$")


def parse_manifest(text: str) -> list:
    """``name: generator(params)`` per line; blank lines and '#' comments skipped."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip() if not raw.lstrip().startswith("#") else ""
        if not line:
            continue
        m = _LINE.match(line)
        if not m:
            raise GraphParseError("expected 'name: generator(params)'", lineno)
        name, gen, params = m.group(1), m.group(2), _parse_params(m.group(3))
        try:
            out.extend(_family(name, gen, params))
        except (KeyError, ValueError, IndexError, OSError) as exc:
            raise GraphParseError(str(exc), lineno) from None
    return out


def load_manifest(source) -> list:
    p = Path(source)
    if p.is_file():
        return parse_manifest(p.read_text())
    if "\n" not in str(source) and data_path(str(source)).is_file():
        return parse_manifest(data_path(str(source)).read_text())
    return parse_manifest(str(source))

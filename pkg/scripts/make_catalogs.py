"""Regenerate the packaged graph6 catalogs under src/flowforge/data/.

Small graphs come from the networkx graph atlas (every graph on at most 7
vertices); cubic graphs on up to 10 vertices are collected by seeded random
sampling with isomorphism filtering.  Run from the repository root:

    python3 scripts/make_catalogs.py
"""

from __future__ import annotations

import argparse
from pathlib import Path

import networkx as nx

from flowforge.generators import from_networkx, named
from flowforge.graph import is_cyclically_k_edge_connected, is_k_edge_connected
from flowforge.graphio import write_graph6

DATA = Path(__file__).resolve().parents[1] / "src" / "flowforge" / "data"


def atlas_graphs():
    for h in nx.graph_atlas_g():
        if h.number_of_nodes() >= 2 and nx.is_connected(h):
            yield from_networkx(h)


def cubic_graphs(n: int, expected: int, seed: int = 0, tries: int = 200000) -> list:
    """Connected cubic simple graphs on n vertices, one per isomorphism class.

    Seeded random sampling until ``expected`` classes are found (the known
    class counts are 1, 2, 5, 19 for n = 4, 6, 8, 10), sorted by graph6.
    """
    found = {}
    for i in range(tries):
        h = nx.random_regular_graph(3, n, seed=seed + i)
        if not nx.is_connected(h):
            continue
        bucket = found.setdefault(nx.weisfeiler_lehman_graph_hash(h), [])
        if not any(nx.is_isomorphic(h, k) for k in bucket):
            bucket.append(h)
        if sum(len(b) for b in found.values()) == expected:
            break
    graphs = [from_networkx(h) for b in found.values() for h in b]
    if len(graphs) != expected:
        raise RuntimeError(f"found {len(graphs)} cubic classes on {n} vertices, expected {expected}")
    return sorted(graphs, key=write_graph6)


def write(name: str, graphs, header: str) -> None:
    lines = [f"# {header}"] + [write_graph6(g) for g in graphs]
    (DATA / name).write_text("\n".join(lines) + "\n")
    print(f"{name}: {len(lines) - 1} graphs", flush=True)


def main(argv=None) -> None:
    argparse.ArgumentParser(description=__doc__).parse_args(argv)
    DATA.mkdir(parents=True, exist_ok=True)
    small = list(atlas_graphs())
    write("3ec_le7.g6", [g for g in small if g.n >= 2 and is_k_edge_connected(g, 3)],
          "3-edge-connected simple graphs on at most 7 vertices")
    write("2ec_le7.g6", [g for g in small if g.n >= 3 and is_k_edge_connected(g, 2)],
          "2-edge-connected simple graphs on at most 7 vertices")
    cubic = [g for n, k in ((4, 1), (6, 2), (8, 5), (10, 19)) for g in cubic_graphs(n, k)]
    write("cubic_bridgeless_le10.g6", [g for g in cubic if is_k_edge_connected(g, 2)],
          "bridgeless connected cubic graphs on at most 10 vertices")
    write("cubic_3ec_le8.g6", [g for g in cubic if g.n <= 8 and is_k_edge_connected(g, 3)],
          "3-edge-connected cubic graphs on at most 8 vertices")
    extra = [named(x) for x in ("petersen", "heawood", "mobius_kantor", "dodecahedron", "desargues")]
    write("cubic_named.g6", [g for g in extra if is_cyclically_k_edge_connected(g, 3)],
          "named cubic graphs")


if __name__ == "__main__":
    main()

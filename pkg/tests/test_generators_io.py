import random

import networkx as nx
import pytest
from hypothesis import given, settings

from conftest import multigraphs
from flowforge.generators import (
    named,
    named_graphs,
    subdivide,
    tightness_instance,
    to_networkx,
    tripod_family,
    tripod_union,
    truncate,
)
from flowforge.ears import find_ears
from flowforge.graph import GraphError, MultiGraph, cyclomatic_number, is_k_edge_connected
from flowforge.graphio import (
    GraphParseError,
    canonical_hash,
    data_path,
    load_catalog,
    load_manifest,
    parse,
    parse_edgelist,
    parse_graph6,
    parse_manifest,
    write_edgelist,
    write_graph6,
)


def girth(g):
    return nx.girth(nx.Graph(to_networkx(g)))


@pytest.mark.parametrize(
    "name,n,m,gir",
    [("petersen", 10, 15, 5), ("v8", 8, 12, 4), ("heawood", 14, 21, 6), ("k33", 6, 9, 4), ("cube", 8, 12, 4)],
)
def test_named_graph_parameters(name, n, m, gir):
    g = named(name)
    assert (g.n, g.m) == (n, m)
    assert girth(g) == gir


def test_theta_and_patterns():
    t = named("theta")
    assert (t.n, t.m) == (2, 3)
    assert named("c7").m == 7 and named("k6").m == 15 and named("k2_3").m == 6
    assert "petersen" in named_graphs()
    with pytest.raises(KeyError):
        named("nonsense")


def test_v8_is_the_wagner_graph():
    # Wagner graph: 8-cycle plus its four long diagonals; non-planar, bipartite no
    h = nx.Graph(to_networkx(named("v8")))
    assert not nx.check_planarity(h)[0]
    assert not nx.is_bipartite(h)
    assert all(d == 3 for _, d in h.degree())


def test_single_tripod_is_k4():
    assert nx.is_isomorphic(nx.Graph(to_networkx(tripod_union([("a", "a", "a")]))), nx.complete_graph(4))


def test_tripod_union_warns_when_not_3ec():
    with pytest.warns(UserWarning):
        tripod_union([("a", "a", "b"), ("a", "b", "b")])


def test_tripod_family_shape():
    fam = tripod_family()
    assert len(fam) >= 5
    assert any(name == "truncated_k33" for name, _ in fam)
    for _, g in fam:
        assert is_k_edge_connected(g, 3)
        assert cyclomatic_number(g) <= 16
        # each tripod contributes six edges
        assert g.m % 6 == 0


def test_truncation_of_a_colour_class_is_a_tripod_union():
    k33 = named("k33")
    h = truncate(k33, [0, 1, 2])
    assert (h.n, h.m) == (12, 18)
    assert is_k_edge_connected(h, 3)
    with pytest.raises(GraphError):
        truncate(named("c4"))


def test_subdivide_examples(theta):
    k4 = named("k4")
    assert subdivide(k4, 1) == k4
    assert subdivide(theta, 3).m == 9
    lengths = {0: 1, 1: 2, 2: 3, 3: 1, 4: 2, 5: 3}
    h = subdivide(k4, lengths)
    assert sorted(p.length for p in find_ears(h)) == sorted(lengths.values())


def test_tightness_instance_shape(theta):
    wg = tightness_instance(theta)
    assert (wg.graph.n, wg.graph.m) == (8, 9)
    assert sum(1 for x in wg.mu.values() if x == 1) == 6
    wg = tightness_instance(named("k33"))
    assert (wg.graph.n, wg.graph.m) == (24, 27)
    with pytest.raises(ValueError):
        tightness_instance(named("c4"))


def test_parse_examples():
    t = parse_edgelist("2 3\n0 1\n0 1\n0 1")
    assert t == named("theta")
    loop = parse("1 1\n0 0")
    assert (loop.n, loop.m) == (1, 1) and loop.is_loop(0)
    pet = parse_graph6(write_graph6(named("petersen")))
    assert (pet.n, pet.m) == (10, 15)
    assert nx.is_isomorphic(nx.Graph(to_networkx(pet)), nx.petersen_graph())


@pytest.mark.parametrize(
    "text,line",
    [("", 1), ("x y\n", 1), ("2 2\n0 1\n", 3), ("2 1\n0 5\n", 2), ("2 1\n0\n", 2), ("2 1\n0 1\n1 0\n", 3)],
)
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(GraphParseError) as info:
        parse_edgelist(text)
    assert info.value.line == line


def test_graph6_rejects_multigraphs(theta):
    with pytest.raises(ValueError):
        write_graph6(theta)
    with pytest.raises(GraphParseError):
        parse_graph6("!!!")


@given(multigraphs(max_n=7, max_m=12))
@settings(max_examples=150, deadline=None)
def test_edgelist_round_trip(g):
    assert parse_edgelist(write_edgelist(g)) == g


def test_graph6_round_trip_over_catalog():
    for g in load_catalog("3ec_le7.g6"):
        assert parse_graph6(write_graph6(g)) == g


def test_canonical_hash_is_relabelling_invariant():
    rng = random.Random(1)
    for g in load_catalog("3ec_le7.g6")[::7]:
        perm = list(g.vertices)
        rng.shuffle(perm)
        h = g.relabel(dict(zip(g.vertices, perm)))
        assert canonical_hash(g) == canonical_hash(h)
    # colour refinement separates degree patterns but not equal-degree regular graphs
    assert canonical_hash(named("k33")) == canonical_hash(named("prism"))
    star_plus = MultiGraph(range(4), [(0, 1), (1, 2), (2, 3), (3, 1)])
    assert canonical_hash(named("c4")) != canonical_hash(star_plus)


def test_catalog_contents():
    assert len(load_catalog("3ec_le7.g6")) == 173
    assert len(load_catalog("2ec_le7.g6")) == 577
    cubic = load_catalog("cubic_bridgeless_le10.g6")
    assert len(cubic) == 26
    assert all(set(g.degrees().values()) == {3} and is_k_edge_connected(g, 2) for g in cubic)
    # pairwise non-isomorphic
    nxs = [nx.Graph(to_networkx(g)) for g in cubic]
    assert not any(nx.is_isomorphic(a, b) for i, a in enumerate(nxs) for b in nxs[i + 1:])
    assert len(load_catalog("cubic_3ec_le8.g6")) == 7


def test_3ec_catalog_matches_networkx_atlas():
    oracle = [
        h for h in nx.graph_atlas_g()
        if h.number_of_nodes() >= 2 and nx.is_connected(h) and nx.edge_connectivity(h) >= 3
    ]
    assert len(oracle) == len(load_catalog("3ec_le7.g6"))


def test_manifests():
    entries = load_manifest("3ec_le7.manifest")
    assert len(entries) == 173 and entries[0].name == "small3ec#0"
    assert [e.params[0] for e in load_manifest("tripods.manifest")][:2] == ["k4", "two_at_one"]
    text = "a: named(petersen)\n# comment\n\nb: subdivide(k4, 2)\nc: truncate(k33)\n"
    got = parse_manifest(text)
    assert [e.name for e in got] == ["a", "b", "c"] and got[1].graph.m == 12
    with pytest.raises(GraphParseError) as info:
        parse_manifest("a: named(petersen)\nb: bogus(1)\n")
    assert info.value.line == 2
    assert data_path("conforming.manifest").is_file()


def test_file_generator(tmp_path):
    p = tmp_path / "t.txt"
    p.write_text(write_edgelist(named("theta")))
    (entry,) = parse_manifest(f"t: file({p})")
    assert entry.graph == named("theta")
    assert parse(p) == named("theta")

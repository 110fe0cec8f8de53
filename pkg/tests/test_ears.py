from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flowforge.ears import (
    CYCLE,
    EarDecomposition,
    NotTwoEdgeConnected,
    best_labelling,
    choose_labelling_inequitable_merge,
    classify_equitable,
    construct_flow_via_decomposition,
    ear_labellings,
    ear_of_edge,
    find_ears,
    full_ear_decomposition,
    psi_removal,
    putback,
)
from flowforge.flows import EdgeLabelling, WeightedGraph, boundary
from flowforge.generators import named, subdivide
from flowforge.graph import MultiGraph, is_k_edge_connected
from flowforge.graphio import load_catalog
from flowforge.solver import max_support_flow


def long_ear(theta, length, interior_mu):
    """Theta with edge 0 stretched to ``length``; returns (weighted graph, that ear)."""
    g = subdivide(theta, {0: length})
    mu = dict.fromkeys(g.vertices, 0)
    ear = ear_of_edge(find_ears(g), 0)
    for v, x in zip(ear.interior, interior_mu):
        mu[v] = x
    mu[0] = (mu[0] - sum(mu.values())) % 3
    return WeightedGraph.of(g, mu), ear


def test_find_ears_examples():
    pet = named("petersen")
    assert sorted(p.edges for p in find_ears(pet)) == [(e,) for e in pet.edge_ids]
    (ring,) = find_ears(named("c6"))
    assert ring.kind == CYCLE and ring.length == 6
    k4 = subdivide(named("k4"), {0: 3})
    ears = find_ears(k4)
    assert len(ears) == 6 and sorted(p.length for p in ears) == [1, 1, 1, 1, 1, 3]
    with pytest.raises(NotTwoEdgeConnected):
        find_ears(MultiGraph(range(3), [(0, 1), (1, 2), (2, 0), (0, 0)] + [(2, 3)]))


def test_full_decomposition_examples(theta):
    (only,) = full_ear_decomposition(named("c5")).ears
    assert only.length == 5
    d = full_ear_decomposition(theta)
    assert [p.length for p in d.ears] == [2, 1]
    d = full_ear_decomposition(named("k4"))
    assert sorted(p.length for p in d.ears) == [1, 2, 3]
    d.validate(named("k4"))


def test_full_decomposition_over_catalog():
    for g in load_catalog("2ec_le7.g6")[::3]:
        d = full_ear_decomposition(g)
        d.validate(g)
        assert d.edge_union() == frozenset(g.edges)
        for j in range(1, len(d.ears) + 1):
            prefix = g.edge_subgraph(e for p in d.ears[:j] for e in p.edges)
            assert is_k_edge_connected(prefix, 2)


def test_ear_labelling_examples(theta):
    wg = WeightedGraph.zero(theta)
    single = ear_of_edge(find_ears(theta), 0)
    assert sorted(lab[0] for lab in ear_labellings(single, wg)) == [0, 1, 2]
    wg2, p2 = long_ear(theta, 2, [1])
    assert [lab.forward for lab in ear_labellings(p2, wg2)] == [(0, 1), (1, 2), (2, 0)]
    wg3, p3 = long_ear(theta, 3, [1, 1])
    labs = ear_labellings(p3, wg3)
    assert [lab.forward for lab in labs] == [(0, 1, 2), (1, 2, 0), (2, 0, 1)]
    assert all(lab.support_size == 2 for lab in labs)


def test_equitability_examples(theta):
    wg3, p3 = long_ear(theta, 3, [1, 1])
    assert classify_equitable(p3, wg3) == (True, 0)
    wg2, p2 = long_ear(theta, 2, [1])
    assert classify_equitable(p2, wg2) == (False, 3)
    wg0, p0 = long_ear(theta, 3, [0, 0])
    assert classify_equitable(p0, wg0) == (False, 4)


def test_best_labelling_examples(theta):
    wg = WeightedGraph.zero(theta)
    best = best_labelling(ear_of_edge(find_ears(theta), 0), wg)
    assert best.support_size == 1 and best.gain == 8
    wg2, p2 = long_ear(theta, 2, [1])
    best = best_labelling(p2, wg2)
    assert best.forward == (1, 2) and best.gain == 16
    wg3, p3 = long_ear(theta, 3, [1, 1])
    assert best_labelling(p3, wg3).gain == 0


@given(st.integers(1, 10), st.lists(st.integers(0, 2), min_size=9, max_size=9), st.booleans())
@settings(max_examples=150, deadline=None)
def test_labelling_triple_structure(length, mus, flip):
    theta = MultiGraph([0, 1], [(0, 1)] * 3)
    wg, p = long_ear(theta, length, mus[: length - 1])
    if flip:
        o = wg.orientation.reversed(p.edges[::2])
        wg = WeightedGraph(wg.graph, o, wg.mu)
    labs = ear_labellings(p, wg)
    for e in p.edges:
        assert sum(1 for lab in labs if lab[e] == 0) == 1
    assert Fraction(sum(lab.support_size for lab in labs), 3) == Fraction(2 * length, 3)
    sub = wg.graph.edge_subgraph(p.edges)
    for lab in labs:
        b = boundary(sub, wg.orientation.restrict(p.edges), lab.labelling)
        assert all(b[v] == wg.mu[v] for v in p.interior)


def test_psi_removal_examples(theta):
    ring = named("c4")
    wg = WeightedGraph.zero(ring)
    (p,) = find_ears(ring)
    out = psi_removal(wg, p, best_labelling(p, wg))
    assert out.graph.n == 0 and out.graph.m == 0
    wg = WeightedGraph.zero(theta)
    single = ear_of_edge(find_ears(theta), 0)
    psi = next(lab for lab in ear_labellings(single, wg) if lab[0] == 1)
    out = psi_removal(wg, single, psi)
    assert out.graph.m == 2 and dict(out.mu) == {0: 2, 1: 1}


def test_putback_restores_boundary(theta):
    wg = WeightedGraph.zero(theta)
    single = ear_of_edge(find_ears(theta), 0)
    psi = ear_labellings(single, wg)[1]
    rest = psi_removal(wg, single, psi)
    phi_prime = max_support_flow(rest).certificate.labelling
    phi = putback(wg, psi, phi_prime)
    assert all(x == 0 for x in boundary(theta, wg.orientation, phi).values())
    ring = named("c3")
    wgr = WeightedGraph.zero(ring)
    (whole,) = find_ears(ring)
    lab = best_labelling(whole, wgr)
    assert putback(wgr, lab, EdgeLabelling({})).values == lab.labelling.values


def test_decomposition_flow_examples(theta):
    ring = named("c4")
    d = full_ear_decomposition(ring)
    assert d.gain() == 8
    cert = construct_flow_via_decomposition(WeightedGraph.zero(ring), d)
    assert cert.support_size == 4 and cert.gain == 32
    d = full_ear_decomposition(theta)
    assert d.gain() == 24
    assert construct_flow_via_decomposition(WeightedGraph.zero(theta), d).gain >= 24


def test_decomposition_flow_meets_gain_on_catalog():
    for g in load_catalog("3ec_le7.g6")[::4]:
        d = full_ear_decomposition(g)
        cert = construct_flow_via_decomposition(WeightedGraph.zero(g), d)
        assert cert.boundary_ok and cert.gain >= d.gain()


def test_partial_decomposition_is_not_full(theta):
    ears = find_ears(theta)
    assert not EarDecomposition(tuple(ears[:1]), full=False).full


def _merge_instance(q_prime_length):
    # K4 with the edge 0-3 stretched; P = 0-1, Q = 0-2, Q' = 0..3
    g = subdivide(named("k4"), {2: q_prime_length})
    ears = find_ears(g)
    return WeightedGraph.zero(g), ear_of_edge(ears, 0), ear_of_edge(ears, 1), ear_of_edge(ears, 2)


def test_merge_with_non_multiple_of_three_accepts_any_nonzero():
    wg, p, q, qp = _merge_instance(3)
    assert (q.length + qp.length) % 3 == 1
    psi = choose_labelling_inequitable_merge(wg, p, q, qp)
    assert psi.support_size == 1


def test_merge_one_plus_two_checked_exhaustively():
    wg, p, q, qp = _merge_instance(2)
    psi = choose_labelling_inequitable_merge(wg, p, q, qp)
    rest = psi_removal(wg, p, psi)
    merged = ear_of_edge(find_ears(rest.graph), q.edges[0])
    assert merged.edge_set == q.edge_set | qp.edge_set
    counts = sorted(lab.support_size for lab in ear_labellings(merged, rest))
    # a length-3 ear is equitable exactly when all three labellings have support 2
    assert counts != [2, 2, 2]

import itertools
from math import ceil

import pytest

from flowforge.bounds import (
    fourteen_fifteenths_flow,
    mader_lift_to_subcubic,
    matching_pair_small_intersection,
    perfect_matchings,
    three_quarter_flow,
    two_flow_bound,
)
from flowforge.flows import Z2, Z3Z3, WeightedGraph, certificate_payload, check_certificate, pair_class_counts
from flowforge.generators import named
from flowforge.graph import MultiGraph, PreconditionError, is_k_edge_connected, is_eulerian
from flowforge.graphio import load_catalog
from flowforge.solver import h_ratio, max_support_flow


def _verified(g, cert):
    assert cert.boundary_ok
    assert check_certificate(g, certificate_payload(cert)).ok
    return cert.support_size


def test_three_quarter_examples():
    k5 = named("k5")
    assert _verified(k5, three_quarter_flow(k5)) == k5.m
    assert _verified(named("petersen"), three_quarter_flow(named("petersen"))) >= 12
    k4 = named("k4")
    assert _verified(k4, three_quarter_flow(k4)) == 5 == max_support_flow(WeightedGraph.zero(k4)).support


def test_three_quarter_support_is_m_minus_smallest_class():
    g = named("cube")
    rep = max_support_flow(WeightedGraph.zero(g, group=Z3Z3), Z3Z3, stop_at=g.m, partial_ok=True)
    counts = pair_class_counts(rep.certificate.labelling)
    assert three_quarter_flow(g).support_size >= g.m - min(counts)
    assert 4 * min(counts) <= g.m


def test_three_quarter_over_catalog():
    for g in load_catalog("2ec_le7.g6")[::11]:
        assert _verified(g, three_quarter_flow(g)) >= ceil(3 * g.m / 4)


def test_bridge_is_rejected():
    g = MultiGraph(range(6), [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3)])
    for fn in (three_quarter_flow, fourteen_fifteenths_flow, two_flow_bound):
        with pytest.raises(PreconditionError):
            fn(g)


def _matchings_oracle(g):
    half = g.n // 2
    out = set()
    for es in itertools.combinations(g.edge_ids, half):
        ends = [v for e in es for v in g.endpoints(e)]
        if len(set(ends)) == g.n:
            out.add(frozenset(es))
    return out


@pytest.mark.parametrize("name", ["k4", "k33", "prism", "cube", "petersen", "v8"])
def test_perfect_matchings_match_oracle(name):
    g = named(name)
    assert set(perfect_matchings(g)) == _matchings_oracle(g)


def test_matching_pair_examples():
    m1, m2 = matching_pair_small_intersection(named("k4"))
    assert not m1 & m2
    assert len(set(perfect_matchings(named("k33")))) == 6
    m1, m2 = matching_pair_small_intersection(named("k33"))
    assert not m1 & m2
    m1, m2 = matching_pair_small_intersection(named("petersen"))
    assert len(m1 & m2) == 1


def test_fourteen_fifteenths_examples():
    pet = named("petersen")
    assert _verified(pet, fourteen_fifteenths_flow(pet)) == 14
    k4 = named("k4")
    assert _verified(k4, fourteen_fifteenths_flow(k4)) == 6
    k5 = named("k5")
    assert _verified(k5, fourteen_fifteenths_flow(k5)) == 10


def test_fourteen_fifteenths_over_catalog():
    for g in load_catalog("cubic_bridgeless_le10.g6") + load_catalog("3ec_le7.g6")[::9]:
        assert _verified(g, fourteen_fifteenths_flow(g)) >= ceil(14 * g.m / 15)


def test_two_flow_examples():
    k4 = named("k4")
    cert = two_flow_bound(k4)
    assert _verified(k4, cert) == 4
    assert h_ratio(k4, 2).support == 4
    pet = named("petersen")
    assert _verified(pet, two_flow_bound(pet)) >= 10
    assert two_flow_bound(named("c5")).support_size == 5


def test_two_flow_over_catalog():
    for g in load_catalog("cubic_bridgeless_le10.g6"):
        cert = two_flow_bound(g)
        assert _verified(g, cert) >= ceil(2 * g.m / 3)
        assert all(abs(x) <= 1 for x in cert.labelling.values.values())


def test_mader_identity_on_subcubic():
    g = named("petersen")
    red = mader_lift_to_subcubic(g)
    assert red.lifts == () and red.lifted == g and set(red.weights.values()) == {1}


def test_mader_on_k5_minus_edge():
    g = named("k5").without_edges([0])
    red = mader_lift_to_subcubic(g)
    assert set(red.suppressed.degrees().values()) == {3}
    assert sum(red.weights.values()) == g.m
    assert is_k_edge_connected(red.lifted, 2)


def test_mader_rejects_eulerian():
    with pytest.raises(PreconditionError):
        mader_lift_to_subcubic(named("k5"))


def test_mader_invariants_over_catalog():
    count = 0
    for g in load_catalog("2ec_le7.g6"):
        if is_eulerian(g) or max(g.degrees().values()) <= 3:
            continue
        red = mader_lift_to_subcubic(g)
        assert max(red.lifted.degrees().values()) <= 3
        assert is_k_edge_connected(red.lifted, 2)
        assert sum(red.weights.values()) + len(red.loops) == g.m
        # every lift keeps edge ids, so the lifted graph partitions E(G)
        assert sorted(red.lifted.edge_ids) == sorted(g.edge_ids)
        count += 1
    assert count > 100


def test_mader_is_deterministic():
    g = named("k5").without_edges([3])
    a, b = mader_lift_to_subcubic(g), mader_lift_to_subcubic(g)
    assert a.lifts == b.lifts


def test_z2_two_flow_support_agrees_with_solver_on_small_cubic():
    for g in load_catalog("cubic_3ec_le8.g6"):
        best = max_support_flow(WeightedGraph.zero(g, group=Z2), Z2).support
        assert two_flow_bound(g).support_size <= best

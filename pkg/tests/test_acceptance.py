"""Acceptance criteria 1-10; each test writes one PASS/FAIL line to the terminal."""

import contextlib
import json
import random
import time
from fractions import Fraction
from math import ceil

import pytest

from conftest import brute_force_best
from flowforge.bounds import fourteen_fifteenths_flow, three_quarter_flow, two_flow_bound
from flowforge.cli import main
from flowforge.ears import ear_labellings, find_ears
from flowforge.flows import (
    Z2,
    Z3,
    EdgeLabelling,
    WeightedGraph,
    boundary,
    certificate_payload,
    check_certificate,
    lift_modular_to_integer,
)
from flowforge.generators import named, tripod_family
from flowforge.graph import cut_size, cyclomatic_number
from flowforge.graphio import load_catalog, load_manifest, write_edgelist
from flowforge.reduction import (
    build_delta,
    counterexample_sweep,
    is_conforming,
    push_three_cut,
    verify_subdivision_tightness,
)
from flowforge.solver import max_support_flow, sample_coset

CATALOGS = ("2ec_le7.g6", "3ec_le7.g6", "cubic_bridgeless_le10.g6", "cubic_3ec_le8.g6", "cubic_named.g6")


@pytest.fixture
def criterion(request):
    reporter = request.config.pluginmanager.get_plugin("terminalreporter")

    @contextlib.contextmanager
    def run(number, title, limit):
        t0 = time.perf_counter()
        status = "FAIL"
        try:
            yield
            elapsed = time.perf_counter() - t0
            assert elapsed <= limit, f"took {elapsed:.1f}s, limit {limit}s"
            status = "PASS"
        finally:
            elapsed = time.perf_counter() - t0
            line = f"ACCEPTANCE {number:>2} {status}  {title} ({elapsed:.2f}s, limit {limit}s)"
            if reporter is not None:
                reporter.write_line("")
                reporter.write_line(line)
            else:  # pragma: no cover
                print(line)

    return run


def test_01_k4_optimum(criterion, tmp_path, capsys):
    p = tmp_path / "k4.txt"
    p.write_text(write_edgelist(named("k4")))
    with criterion(1, "K4 solve: support 5, ratio 5/6", 1):
        code = main(["solve", str(p)])
        payload = json.loads(capsys.readouterr().out)
        assert code == 0
        assert payload["support"] == 5 and payload["ratio"] == "5/6"


def test_02_tripod_family(criterion):
    with criterion(2, "tripod unions have exact ratio 5/6", 120):
        fam = tripod_family()
        names = [name for name, _ in fam]
        assert len(fam) >= 5 and "truncated_k33" in names
        for name, g in fam:
            assert cyclomatic_number(g) <= 16
            rep = max_support_flow(WeightedGraph.zero(g))
            assert rep.optimal and rep.ratio == Fraction(5, 6), name


def test_03_small_graph_sweep(criterion):
    with criterion(3, "3-ec graphs on <=7 vertices: gain >= bonus, ratio >= 5/6", 1800):
        entries = load_manifest("3ec_le7.manifest")
        s = counterexample_sweep(entries, mu_mode="exhaustive", exhaustive_max_n=5)
        assert s.instances == 173 and not s.skipped
        assert s.failures == [] and s.ratio_failures == []
        assert s.min_ratio >= Fraction(5, 6)
        assert s.runs > s.instances  # the small graphs contributed every zero-sum weight


def test_04_subdivision_tightness(criterion):
    with criterion(4, "twice-subdivided Theta and K33: every solution has support 2|E|/3", 60):
        for base, support in (("theta", 6), ("k33", 18)):
            rep = verify_subdivision_tightness(named(base))
            assert rep.ok and rep.supports == (support,)
            assert 3 * support == 2 * rep.edges


def test_05_three_quarter_bound(criterion):
    with criterion(5, "3/4 construction on 20 catalog 2-ec graphs", 300):
        graphs = load_catalog("2ec_le7.g6")
        pick = graphs[:: len(graphs) // 20][:20]
        assert len(pick) == 20
        for g in pick:
            cert = three_quarter_flow(g)
            assert check_certificate(g, certificate_payload(cert)).ok
            assert cert.support_size >= ceil(Fraction(3 * g.m, 4))


def test_06_fourteen_fifteenths_bound(criterion):
    with criterion(6, "14/15 construction: Petersen exactly 14, 10 cubic catalog graphs", 300):
        pet = named("petersen")
        assert fourteen_fifteenths_flow(pet).support_size == 14
        cubic = load_catalog("cubic_bridgeless_le10.g6")[-10:]
        assert len(cubic) == 10
        for g in cubic:
            cert = fourteen_fifteenths_flow(g)
            assert check_certificate(g, certificate_payload(cert)).ok
            assert cert.support_size >= ceil(Fraction(14 * g.m, 15))


def test_07_two_flow_on_k4(criterion):
    with criterion(7, "2-flow construction on K4 gives 4 of 6, and 4 is optimal", 60):
        k4 = named("k4")
        cert = two_flow_bound(k4, 1)
        assert cert.support_size == 4 and cert.edge_count == 6
        assert check_certificate(k4, certificate_payload(cert)).ok
        assert max_support_flow(WeightedGraph.zero(k4, group=Z2), Z2).support == 4


def _solver_flows(count):
    """Optimal flows over the 2-ec catalog, then seeded coset samples, all with random orientations."""
    rng = random.Random(8)
    graphs = load_catalog("2ec_le7.g6")
    out = []
    for g in graphs:
        o = g.orientation().reversed({e for e in g.edge_ids if rng.random() < 0.5})
        out.append((g, o, max_support_flow(WeightedGraph.zero(g, o)).certificate.labelling))
    while len(out) < count:
        g = rng.choice(graphs)
        o = g.orientation().reversed({e for e in g.edge_ids if rng.random() < 0.5})
        out.extend((g, o, phi) for phi in sample_coset(WeightedGraph.zero(g, o), 4, seed=rng.randrange(10**6)))
    return out[:count]


def test_08_integer_lift(criterion):
    with criterion(8, "1000 Z3 flows lift to integer 3-flows", 600):
        flows = _solver_flows(1000)
        assert len(flows) == 1000
        for g, o, phi in flows:
            z = lift_modular_to_integer(g, o, phi)
            assert all(x == 0 for x in boundary(g, o, z).values())
            assert all(abs(x) <= 2 for x in z.values.values())
            assert all((z[e] - phi[e]) % 3 == 0 for e in g.edge_ids)
            assert z.support() == phi.support()


def test_09_property_suites(criterion):
    with criterion(9, "uncrossing, boundary identity, ear triples, brute-force oracle", 600):
        rng = random.Random(9)
        graphs = load_catalog("2ec_le7.g6")
        for _ in range(1000):
            g = rng.choice(graphs)
            x = {v for v in g.vertices if rng.random() < 0.5}
            y = {v for v in g.vertices if rng.random() < 0.5}
            d = lambda s: cut_size(g, s)  # noqa: E731
            assert d(x) + d(y) >= d(x & y) + d(x | y)
            assert d(x) + d(y) >= d(x - y) + d(y - x)
        for _ in range(1000):
            g = rng.choice(graphs)
            phi = EdgeLabelling({e: rng.randrange(3) for e in g.edge_ids}, Z3)
            assert sum(boundary(g, g.orientation(), phi).values()) % 3 == 0
        for g in load_catalog("cubic_bridgeless_le10.g6")[:5] + graphs[::40]:
            mu = {v: rng.randrange(3) for v in g.vertices}
            mu[g.vertices[-1]] = (mu[g.vertices[-1]] - sum(mu.values())) % 3
            wg = WeightedGraph.of(g, mu)
            for p in find_ears(g):
                labs = ear_labellings(p, wg)
                assert all(sum(1 for lab in labs if lab[e] == 0) == 1 for e in p.edges)
                assert Fraction(sum(lab.support_size for lab in labs), 3) == Fraction(2 * p.length, 3)
        small = {write_edgelist(g): g for c in CATALOGS for g in load_catalog(c) if g.m <= 8}
        assert small
        for g in small.values():
            o = g.orientation()
            mu = {v: rng.randrange(3) for v in g.vertices}
            mu[g.vertices[-1]] = (mu[g.vertices[-1]] - sum(mu.values())) % 3
            for weight in (dict.fromkeys(g.vertices, 0), mu):
                assert max_support_flow(WeightedGraph(g, o, weight)).support == brute_force_best(g, o, weight)


def test_10_reduction_constructions(criterion):
    with criterion(10, "Prism push picks a vertex complement; delta graphs cubic and cyclically 4-ec", 600):
        prism = named("prism")
        b = push_three_cut(WeightedGraph.zero(prism))
        (outside,) = set(prism.vertices) - b.x
        assert prism.degree(outside) == 3 and cut_size(prism, b.x) == 3
        seen = 0
        for manifest in ("3ec_le7.manifest", "cubic_3ec_le8.manifest", "conforming.manifest", "tripods.manifest"):
            for entry in load_manifest(manifest):
                wg = WeightedGraph.zero(entry.graph)
                if not is_conforming(wg):
                    continue
                d = build_delta(push_three_cut(wg))
                assert d.cubic and d.cyclically_4ec, (entry.name, d.violations)
                seen += 1
        assert seen >= 15

import os
import subprocess
import sys

import pytest
from hypothesis import given, settings

from conftest import multigraphs
from flowforge import kernels
from flowforge.flows import WeightedGraph
from flowforge.generators import named
from flowforge.graph import _adjacency
from flowforge.solver import max_support_flow


def test_fallback_is_selected_by_environment():
    env = dict(os.environ, FLOWFORGE_PURE="1")
    out = subprocess.run(
        [sys.executable, "-c", "import flowforge.kernels as k; print(k.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"


def test_compiled_backend_is_default_when_built():
    if "cython" not in kernels.backends() or os.environ.get("FLOWFORGE_PURE"):
        pytest.skip("compiled kernels not built or disabled")
    assert kernels.BACKEND == "cython"


@given(multigraphs(min_n=2, max_n=8, max_m=14))
@settings(max_examples=120, deadline=None)
def test_cut_scan_backends_agree(g):
    impls = kernels.backends()
    _, ptr, idx = _adjacency(g)
    for threshold in (-1, 2, 3):
        for half in (True, False):
            results = {name: kernels.cut_scan(g.n, ptr, idx, threshold, half, impl=m) for name, m in impls.items()}
            assert len({repr(r) for r in results.values()}) == 1


@pytest.mark.parametrize("name", ["k4", "prism", "petersen", "k33"])
def test_coset_scan_backends_agree(name):
    g = named(name)
    wg = WeightedGraph.zero(g)
    outs = [max_support_flow(wg, impl=m) for m in kernels.backends().values()]
    assert len({(r.support, tuple(r.histogram), r.certificate.digest()) for r in outs}) == 1


def test_empty_coset_short_circuit():
    assert kernels.coset_scan([], [0], [], [], 3, [], [], [], 1) == (0, [], [1], 1, False)


def test_benchmark_quick_run(capsys):
    import importlib.util
    from pathlib import Path

    path = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"
    spec = importlib.util.spec_from_file_location("bench_kernels", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    mod.main(["--quick", "--repeat", "1"])
    out = capsys.readouterr().out
    assert "coset" in out and "cut" in out

"""Compare the compiled and pure-Python kernels on coset enumeration and cut scans.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--quick]
"""

from __future__ import annotations

import argparse
import statistics
import time

from flowforge import kernels
from flowforge.flows import Z3, Z3Z3, WeightedGraph
from flowforge.generators import named, tripod_family
from flowforge.graph import _adjacency
from flowforge.solver import max_support_flow


def _time(fn, repeat):
    runs = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        runs.append(time.perf_counter() - t0)
    return statistics.median(runs)


def coset_cases(quick):
    yield "petersen z3", WeightedGraph.zero(named("petersen")), Z3
    yield "k33 z3z3", WeightedGraph.zero(named("k33"), group=Z3Z3), Z3Z3
    if not quick:
        yield "three_at_one z3", WeightedGraph.zero(dict(tripod_family())["three_at_one"]), Z3
        yield "dodecahedron z3", WeightedGraph.zero(named("dodecahedron")), Z3


def cut_cases(quick):
    yield "cube", named("cube")
    yield "heawood", named("heawood")
    if not quick:
        yield "dodecahedron", named("dodecahedron")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="small instances only")
    args = ap.parse_args(argv)
    impls = kernels.backends()
    if "cython" not in impls:
        print("compiled kernels not built; only the pure-Python timings are shown")
    names = list(impls)
    print(f"{'kernel':<8} {'instance':<20} {'size':>10} " + " ".join(f"{n:>10}" for n in names) + "   speedup")
    for label, wg, grp in coset_cases(args.quick):
        size = None
        times = []
        for n in names:
            def go(m=impls[n]):
                return max_support_flow(wg, grp, impl=m, check_samples=0)
            size = go().coset_size
            times.append(_time(go, args.repeat))
        _row("coset", label, size, times)
    for label, g in cut_cases(args.quick):
        _, ptr, idx = _adjacency(g)
        times = [_time(lambda m=impls[n]: kernels.cut_scan(g.n, ptr, idx, 3, True, impl=m), args.repeat) for n in names]
        _row("cut", label, 2 ** (g.n - 1), times)


def _row(kind, label, size, times):
    speed = f"{times[0] / times[-1]:8.1f}x" if len(times) > 1 and times[-1] > 0 else ""
    print(f"{kind:<8} {label:<20} {size:>10} " + " ".join(f"{t:>9.3f}s" for t in times) + "  " + speed)


if __name__ == "__main__":
    main()

"""The ``flowforge`` command: solve, verify, sweep, bounds, reduce.

JSON goes to stdout and prose to stderr.  Exit codes: 0 success, 1 failed
verification, 2 parse error (or certificate for another graph), 3 budget
exceeded, 4 infeasible weight or violated precondition.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .bounds import fourteen_fifteenths_flow, three_quarter_flow, two_flow_bound
from .flows import SCHEMA_VERSION, GroupSpec, InvariantViolation, WeightedGraph, certificate_payload, check_certificate
from .graph import GraphError, MultiGraph, PreconditionError
from .graphio import GraphParseError, load_manifest, parse
from .reduction import build_delta, counterexample_sweep, push_three_cut
from .solver import DEFAULT_BUDGET, BudgetExceeded, InfeasibleBoundary, max_support_flow

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_PARSE = 2
EXIT_BUDGET = 3
EXIT_INFEASIBLE = 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def read_config(path) -> dict:
    """``key = value`` lines; '#' comments; values stay strings (quotes stripped)."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line or line.startswith("["):
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected 'key = value'", EXIT_PARSE)
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value.strip("\"'")
    return out


def _emit(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


def _load_graph(path: str) -> MultiGraph:
    try:
        return parse(Path(path))
    except (OSError, GraphParseError, ValueError) as exc:
        raise CliError(f"cannot read graph {path}: {exc}", EXIT_PARSE) from None


def _budget(args, config) -> int:
    if args.budget is not None:
        return args.budget
    if os.environ.get("FLOWFORGE_BUDGET"):
        return int(os.environ["FLOWFORGE_BUDGET"])
    if "budget" in config:
        return int(config["budget"])
    return DEFAULT_BUDGET


def _load_mu(spec: str, g: MultiGraph, group: GroupSpec) -> dict:
    if spec == "zero":
        return dict.fromkeys(g.vertices, group.zero)
    mu = dict.fromkeys(g.vertices, group.zero)
    try:
        text = Path(spec).read_text()
    except OSError as exc:
        raise CliError(f"cannot read weights {spec}: {exc}", EXIT_PARSE) from None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        try:
            v, vals = int(line[0]), [int(t) for t in line[1:]]
        except ValueError:
            raise CliError(f"{spec}:{lineno}: expected 'vertex value'", EXIT_PARSE) from None
        if v not in mu or not vals:
            raise CliError(f"{spec}:{lineno}: unknown vertex or missing value", EXIT_PARSE)
        mu[v] = group.normalize(vals if len(vals) > 1 else vals[0])
    return mu


# ---------------------------------------------------------------------------
# commands


def cmd_solve(args, config) -> int:
    g = _load_graph(args.graph)
    try:
        group = GroupSpec.parse(args.group or config.get("group", "z3"))
    except ValueError as exc:
        raise CliError(str(exc), EXIT_PARSE) from None
    mu = _load_mu(args.mu, g, group)
    try:
        wg = WeightedGraph(g, g.orientation(), mu, group)
    except ValueError as exc:
        raise CliError(f"infeasible weight: {exc}", EXIT_INFEASIBLE) from None
    workers = args.workers or int(config.get("workers", 1))
    try:
        rep = max_support_flow(wg, group, budget=_budget(args, config), workers=workers)
    except InfeasibleBoundary as exc:
        raise CliError(f"infeasible weight: {exc}", EXIT_INFEASIBLE) from None
    except BudgetExceeded as exc:
        _emit(exc.report.to_json())
        raise CliError(str(exc), EXIT_BUDGET) from None
    _emit(rep.to_json())
    _say(f"support {rep.support}/{g.m} (ratio {rep.ratio}) over {group.name}, coset size {rep.coset_size}")
    return EXIT_OK


def cmd_verify(args, config) -> int:
    g = _load_graph(args.graph)
    try:
        payload = json.loads(Path(args.certificate).read_text())
    except (OSError, ValueError) as exc:
        raise CliError(f"cannot read certificate: {exc}", EXIT_PARSE) from None
    if isinstance(payload, dict) and payload.get("kind") == "ratio_report":
        payload = payload["certificate"]
    chk = check_certificate(g, payload)
    _emit(
        {
            "schema": SCHEMA_VERSION,
            "kind": "verify",
            "ok": chk.ok,
            "reason": chk.reason,
            "failing_vertex": chk.failing_vertex,
        }
    )
    if chk.ok:
        _say("certificate verified")
        return EXIT_OK
    _say(f"certificate rejected: {chk.reason}")
    return EXIT_PARSE if chk.graph_mismatch else EXIT_FAILED


def _parse_mu_mode(text: str):
    if text in ("zero", "exhaustive"):
        return text, None, None
    parts = text.split(":")
    if len(parts) == 3 and parts[0] == "sampled":
        try:
            return "sampled", int(parts[1]), int(parts[2])
        except ValueError:
            pass
    raise CliError("--mu must be zero, exhaustive or sampled:SEED:COUNT", EXIT_PARSE)


def cmd_sweep(args, config) -> int:
    mode, seed, count = _parse_mu_mode(args.mu)
    try:
        entries = load_manifest(args.manifest)
    except (OSError, GraphParseError) as exc:
        raise CliError(f"cannot read manifest: {exc}", EXIT_PARSE) from None
    summary = counterexample_sweep(
        entries,
        mu_mode=mode,
        seed=seed,
        count=count,
        exhaustive_max_n=args.max_n,
        budget=_budget(args, config),
        mode=args.mode or config.get("mode", "optimum"),
        bundle_dir=args.bundles,
    )
    _emit(summary.to_json())
    _say(
        f"{summary.instances} instances, {summary.runs} runs, {len(summary.failures)} failures, "
        f"{len(summary.skipped)} skipped, min slack {summary.min_slack}"
    )
    return EXIT_OK if summary.ok else EXIT_FAILED


_BOUNDS = {
    "3/4": lambda g, a: three_quarter_flow(g, budget=a.budget),
    "14/15": lambda g, a: fourteen_fifteenths_flow(g),
    "2flow": lambda g, a: two_flow_bound(g, a.j),
}


def cmd_bounds(args, config) -> int:
    g = _load_graph(args.graph)
    try:
        cert = _BOUNDS[args.which](g, args)
    except PreconditionError as exc:
        raise CliError(f"precondition failed: {exc}", EXIT_INFEASIBLE) from None
    except BudgetExceeded as exc:
        raise CliError(str(exc), EXIT_BUDGET) from None
    _emit(certificate_payload(cert))
    _say(f"support {cert.support_size}/{cert.edge_count} ({args.which} construction)")
    return EXIT_OK


def cmd_reduce(args, config) -> int:
    g = _load_graph(args.graph)
    wg = WeightedGraph.zero(g)
    try:
        b = push_three_cut(wg)
    except PreconditionError as exc:
        raise CliError(f"precondition failed: {exc}", EXIT_INFEASIBLE) from None
    if args.to == "bullet":
        from .graphio import write_edgelist

        _emit(
            {
                "schema": SCHEMA_VERSION,
                "kind": "bullet",
                "x": sorted(b.x),
                "w": b.w,
                "edges": [[e, u, v] for e, (u, v) in b.graph.edges.items()],
                "edgelist": write_edgelist(b.graph),
                "unusable": sorted(b.unusable),
                "ledger": b.ledger().to_json(),
            }
        )
        _say(f"X has {len(b.x)} vertices; w = {b.w}")
        return EXIT_OK
    try:
        d = build_delta(b)
    except InvariantViolation as exc:
        raise CliError(str(exc), EXIT_INFEASIBLE) from None
    _emit(d.to_json())
    _say(f"GΔ: n={d.graph.n}, m={d.graph.m}, cubic={d.cubic}, cyclically 4-ec={d.cyclically_4ec}")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="flowforge", description="Large-support group-valued flows on multigraphs.")
    p.add_argument("--version", action="version", version=f"flowforge {__version__}")
    p.add_argument("--config", help="file of 'key = value' defaults (budget, workers, group, mode)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="exact maximum-support flow")
    s.add_argument("graph")
    s.add_argument("--mu", default="zero", help="'zero' or a file of 'vertex value' lines")
    s.add_argument("--group", choices=["z2", "z3", "z2z2", "z3z3", "z2z3"])
    s.add_argument("--budget", type=int)
    s.add_argument("--workers", type=int)
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="check a certificate against a graph")
    v.add_argument("graph")
    v.add_argument("certificate")
    v.set_defaults(func=cmd_verify)

    w = sub.add_parser("sweep", help="gain-versus-bonus sweep over a catalog manifest")
    w.add_argument("manifest")
    w.add_argument("--mu", default="zero", help="zero | exhaustive | sampled:SEED:COUNT")
    w.add_argument("--budget", type=int)
    w.add_argument("--mode", choices=["optimum", "witness"])
    w.add_argument("--max-n", type=int, default=6, help="largest graph that gets exhaustive weights")
    w.add_argument("--bundles", help="directory for reproduction bundles of failures")
    w.set_defaults(func=cmd_sweep)

    b = sub.add_parser("bounds", help="constructive support bounds")
    b.add_argument("graph")
    b.add_argument("--which", required=True, choices=sorted(_BOUNDS))
    b.add_argument("--j", type=int, default=1)
    b.add_argument("--budget", type=int)
    b.set_defaults(func=cmd_bounds)

    r = sub.add_parser("reduce", help="3-cut push (bullet) or triangle contraction (delta)")
    r.add_argument("graph")
    r.add_argument("--to", required=True, choices=["bullet", "delta"])
    r.set_defaults(func=cmd_reduce)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        config = read_config(args.config) if args.config else {}
        return args.func(args, config)
    except CliError as exc:
        _say(f"flowforge: {exc}")
        return exc.code
    except GraphError as exc:
        _say(f"flowforge: {exc}")
        return EXIT_INFEASIBLE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""Command-line interface.

Exit codes: 0 success, 2 configuration/parse/graph error, 3 the data are
degenerate for the requested statistic.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

from . import __version__
from .dataio import (
    emit_report,
    load_dataset,
    load_graph,
    write_edge_list,
    write_outcomes,
)
from .dgp import DgpConfig, generate_outcomes, true_gc_monte_carlo
from .errors import ConfigError, DegeneracyError, InputError
from .estimator import estimate_gc, inbreeding_homophily, type_indicator
from .graph import degree_stats
from .permutation import asymptotic_ci, observed, permutation_inference
from .random_graphs import barabasi_albert, erdos_renyi
from .simulation import SimulationConfig, run_coverage_experiment

log = logging.getLogger("graph_concordance")

DENSENESS_THRESHOLD = 1.0


def _emit(payload, args):
    text = emit_report(payload, args.format, args.output)
    if args.output is None:
        sys.stdout.write(text)


def _need(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise ConfigError(f"--{name.replace('_', '-')} is required for '{args.command}'")


def cmd_estimate(args):
    _need(args, "graph", "outcomes")
    ds = load_dataset(args.graph, args.outcomes, args.vertices)
    est = estimate_gc(ds.graph, ds.outcomes, zero_gamma_c=args.zero_gamma_c)
    _emit(
        {
            "n": ds.graph.n,
            "n_edges": ds.graph.n_edges,
            "gamma_hat": est.gamma_hat,
            "gamma_hat_c": est.gamma_hat_c,
            "c_hat": est.c_hat,
            "v_hat": est.v_hat,
            "zero_gamma_c": args.zero_gamma_c,
        },
        args,
    )


def _inference(args):
    _need(args, "graph", "outcomes")
    ds = load_dataset(args.graph, args.outcomes, args.vertices)
    if args.method == "asymptotic":
        est, var = observed(ds.graph, ds.outcomes, args.zero_gamma_c)
        return asymptotic_ci(est, var, args.alpha, ds.graph.n, args.zero_gamma_c)
    return permutation_inference(
        ds.graph,
        ds.outcomes,
        alpha=args.alpha,
        permutations=args.permutations,
        seed=args.seed,
        exact=args.exact,
        zero_gamma_c=args.zero_gamma_c,
        workers=args.threads,
    )


def cmd_ci(args):
    _emit(_inference(args), args)


def cmd_test(args):
    res = _inference(args)
    verdict = "reject" if res.reject else "do not reject"
    print(
        f"H0: GC <= 0  T1={res.t_obs:.4f}  c_alpha,1={res.critical_value_one_sided:.4f}  "
        f"p={res.p_value:.4g}  -> {verdict} at alpha={res.alpha}",
        file=sys.stderr,
    )
    _emit(res, args)


def cmd_homophily(args):
    _need(args, "graph", "types", "type_label")
    ds = load_dataset(args.graph, None, args.vertices, args.types)
    h = inbreeding_homophily(ds.graph, ds.types, args.type_label)
    out = {"type_label": args.type_label, **asdict(h)}
    est = estimate_gc(ds.graph, type_indicator(ds.types, args.type_label), args.zero_gamma_c)
    out["c_hat"] = est.c_hat
    _emit(out, args)


def cmd_diagnose(args):
    _need(args, "graph")
    g = load_graph(args.graph, args.vertices, validate=False)
    s = degree_stats(g)
    if s.denseness_ratio > args.threshold:
        print(
            f"warning: d_mx2^4/n = {s.denseness_ratio:.4g} exceeds {args.threshold}; the graph "
            "may be too dense locally for the large-sample approximation to be reliable "
            "(heuristic, not a validity check)",
            file=sys.stderr,
        )
    _emit(s.to_dict(), args)


def cmd_gen_graph(args):
    _need(args, "n", "output")
    if args.family == "er":
        _need(args, "lam")
        g = erdos_renyi(args.n, args.lam, args.seed)
        config = {"family": "er", "n": args.n, "lambda": args.lam, "seed": args.seed}
    else:
        _need(args, "m")
        g = barabasi_albert(args.n, args.m, args.seed)
        config = {"family": "ba", "n": args.n, "m": args.m, "seed": args.seed}
    out = Path(args.output)
    vertices = out.with_name(out.name + ".vertices")
    write_edge_list(g, out, vertices)
    sidecar = {"config": config, "degree_stats": degree_stats(g).to_dict(), "vertices_file": vertices.name}
    out.with_name(out.name + ".json").write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"wrote {out} ({g.n} vertices, {g.n_edges} edges) and {vertices}", file=sys.stderr)


def cmd_gen_outcomes(args):
    _need(args, "graph", "c", "output")
    g = load_graph(args.graph, args.vertices)
    y = generate_outcomes(g, DgpConfig(args.c, args.seed))
    write_outcomes(g, y, args.output)


def cmd_true_gc(args):
    _need(args, "graph", "c")
    g = load_graph(args.graph, args.vertices)
    DgpConfig(args.c)
    res = true_gc_monte_carlo(g, args.c, args.reps, args.seed)
    _emit(asdict(res), args)


def cmd_simulate(args):
    _need(args, "config")
    try:
        raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{args.config}: invalid JSON ({exc})") from None
    single = isinstance(raw, dict) and "cells" not in raw
    if single:
        cells = [raw]
    elif isinstance(raw, dict):
        cells = raw["cells"]
    else:
        cells = raw
    configs = []
    for cell in cells:
        if args.threads > 1:
            cell = {**cell, "workers": args.threads}
        configs.append(SimulationConfig.from_dict(cell))
    reports = []
    for cfg in configs:
        rep = run_coverage_experiment(cfg)
        print(
            f"[{cfg.graph.to_dict()} c={cfg.c}] true GC={rep.true_gc:.4f} "
            f"coverage perm={rep.coverage_perm:.4f} asym={rep.coverage_asym:.4f} "
            f"length={rep.mean_ci_length:.4f} ({rep.wall_time:.1f}s)",
            file=sys.stderr,
        )
        reports.append(rep)
    _emit(reports[0] if single else reports, args)
    if args.csv:
        emit_report(reports, "csv", args.csv)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="graph-concordance",
        description="Graph concordance estimation and permutation inference on a single network.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--graph", help="edge-list file")
    common.add_argument("--vertices", help="optional vertex-list file (declares isolated vertices)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--zero-gamma-c", action="store_true",
                        help="fix the non-neighbor term at 0 (dependency-graph mode)")
    common.add_argument("-v", "--verbose", action="store_true")

    infer = argparse.ArgumentParser(add_help=False)
    infer.add_argument("--outcomes", help="CSV with columns node_label,value")
    infer.add_argument("--alpha", type=float, default=0.05)
    infer.add_argument("--permutations", type=int, default=1000)
    infer.add_argument("--exact", action="store_true", help="enumerate all permutations (n <= 8)")
    infer.add_argument("--method", choices=("permutation", "asymptotic"), default="permutation")

    s = sub.add_parser("estimate", parents=[common], help="point estimate of graph concordance")
    s.add_argument("--outcomes", help="CSV with columns node_label,value")
    s.set_defaults(func=cmd_estimate)

    s = sub.add_parser("ci", parents=[common, infer], help="confidence interval")
    s.set_defaults(func=cmd_ci)
    s = sub.add_parser("test", parents=[common, infer], help="one-sided test of positive concordance")
    s.set_defaults(func=cmd_test)

    s = sub.add_parser("homophily", parents=[common], help="inbreeding homophily of one type")
    s.add_argument("--types", help="CSV with columns node_label,type_label")
    s.add_argument("--type-label", help="the target type")
    s.set_defaults(func=cmd_homophily)

    s = sub.add_parser("diagnose", parents=[common], help="degree statistics and denseness ratio")
    s.add_argument("--threshold", type=float, default=DENSENESS_THRESHOLD)
    s.set_defaults(func=cmd_diagnose)

    s = sub.add_parser("gen-graph", parents=[common], help="generate an ER or BA graph")
    s.add_argument("--family", choices=("er", "ba"), default="er")
    s.add_argument("--n", type=int)
    s.add_argument("--lambda", dest="lam", type=float)
    s.add_argument("--m", type=int)
    s.set_defaults(func=cmd_gen_graph)

    s = sub.add_parser("gen-outcomes", parents=[common], help="simulate outcomes on a graph")
    s.add_argument("--c", type=float)
    s.set_defaults(func=cmd_gen_outcomes)

    s = sub.add_parser("true-gc", parents=[common], help="Monte Carlo true concordance")
    s.add_argument("--c", type=float)
    s.add_argument("--reps", type=int, default=100_000)
    s.set_defaults(func=cmd_true_gc)

    s = sub.add_parser("simulate", parents=[common], help="coverage experiment from a JSON config")
    s.add_argument("--config", help="JSON config (one cell, a list, or {'cells': [...]})")
    s.add_argument("--csv", help="also write one CSV row per cell here")
    s.set_defaults(func=cmd_simulate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        args.func(args)
    except DegeneracyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (InputError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""pebble-lab command line.

Graphs are given inline as family tokens (``path 5``, ``grid 3 2``,
``gnp 50 0.1 7``, ``petersen``) or as a path to a graph file.  Machine
output (CSV, JSON, graph files) goes to stdout, diagnostics to stderr.
Randomised commands print a ``# params: {...}`` line before their results
so every table records its own inputs, including a seed drawn from entropy
when none was given.

CSV columns
  threshold: graph_id,n,t,trials,successes,p_hat,ci_low,ci_high,seed
  lemmas flat/hole/full: experiment,n,d,m,t,trials,event_frequency,exact_reference,seed
  lemmas count: d,m,i,exact,bound,holds
  lemmas sum: j,n_terms,partial,limit,gap,below (gap and below are computed exactly)

The solver budget (explored configurations) defaults to PEBBLE_LAB_BUDGET
when that variable is set.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from typing import Sequence

from . import grid as gridlab
from .graph import GraphSpec, cartesian_product, format_graph, generate, metrics
from .pebbling import DEFAULT_BUDGET, Configuration, PebblingSolver, Status, class0, graham_check, pebbling_number, pi_bounds
from .random_model import find_threshold, fresh_seed, sweep, write_estimates_csv

BUDGET_ENV = "PEBBLE_LAB_BUDGET"


def default_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None:
        return DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError:
        raise SystemExit(f"error: {BUDGET_ENV}={raw!r} is not an integer")
    if value < 1:
        raise SystemExit(f"error: {BUDGET_ENV} must be positive")
    return value


def _graph(tokens: Sequence[str], seed: int | None = None):
    return generate(GraphSpec.parse(list(tokens), seed))


def _echo(out, params: dict) -> None:
    out.write("# params: " + json.dumps(params, sort_keys=True, default=str) + "\n")


def _seed(args) -> int:
    if args.seed is None:
        args.seed = fresh_seed()
    return args.seed


def _fmt(x) -> str:
    return "inf" if x == float("inf") else str(x)


def cmd_gen(args, out) -> int:
    g = _graph(args.graph, args.seed)
    text = format_graph(g)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        out.write(text)
    return 0


def cmd_metrics(args, out) -> int:
    g = _graph(args.graph, args.seed)
    m = metrics(g)
    row = {"graph": g.label, "n": g.n, "edges": g.edge_count, "diameter": _fmt(m.diameter),
           "girth": _fmt(m.girth), "min_degree": m.min_degree, "connectivity": m.connectivity}
    _emit(row, args.format, out)
    return 0


def _emit(row: dict, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(row, sort_keys=True) + "\n")
    elif fmt == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(row.keys())
        writer.writerow(row.values())
    else:
        width = max(map(len, row))
        for k, v in row.items():
            out.write(f"{k:<{width}}  {v}\n")


def cmd_pi(args, out) -> int:
    g = _graph(args.graph, args.seed)
    lower, upper = pi_bounds(g)
    result = pebbling_number(g, args.budget)
    if result.exact:
        verdict = "yes" if result.pi == g.n else "no"
    else:
        verdict = "no" if result.lower > g.n else "unknown"
    row = {
        "graph": g.label, "n": g.n, "pi": str(result), "bounds": f"[{lower}, {upper}]",
        "class0": verdict, "witness": str(result.witness_config), "witness_root": result.witness_root,
        "roots_checked": result.roots_checked, "nodes_explored": result.nodes_explored,
    }
    _emit(row, args.format, out)
    return 0 if result.exact else 3


def cmd_solvable(args, out) -> int:
    g = _graph(args.graph, args.seed)
    c = Configuration.parse(args.config)
    if len(c) != g.n:
        raise ValueError(f"configuration has {len(c)} entries, graph has {g.n} vertices")
    solver = PebblingSolver(g)
    verdict = solver.r_solvable(c, args.root, args.budget) if args.root is not None else solver.solvable(c, args.budget)
    row = {"graph": g.label, "config": str(c), "root": "all" if args.root is None else args.root,
           "status": verdict.status.value, "nodes_explored": verdict.nodes_explored}
    if verdict.witness is not None:
        row["witness"] = " ".join(f"{a}>{b}" for a, b in verdict.witness)
    if verdict.certificate:
        row["certificate"] = verdict.certificate
    _emit(row, args.format, out)
    return 3 if verdict.status is Status.UNKNOWN else 0


def _parse_range(text: str) -> range:
    lo, _, hi = text.partition(":")
    return range(int(lo), int(hi) + 1)


def cmd_threshold(args, out) -> int:
    seed = _seed(args)
    g = _graph(args.graph, seed)
    params = {"graph": g.label, "n": g.n, "target": args.target, "trials": args.trials, "seed": seed,
              "budget": args.budget, "sweep": args.sweep}
    _echo(out, params)
    if args.sweep:
        write_estimates_csv(sweep(g, _parse_range(args.sweep), args.trials, seed, args.budget, args.jobs), out)
        return 0
    bracket = find_threshold(g, args.target, args.trials, seed, args.budget, args.jobs)
    write_estimates_csv(bracket.estimates, out)
    out.write(f"# bracket: t_low={bracket.t_low} t_high={bracket.t_high} target={bracket.target}\n")
    return 0


def cmd_lemmas(args, out) -> int:
    writer = csv.writer(out, lineterminator="\n")
    if args.suite == "count":
        writer.writerow(["d", "m", "i", "exact", "bound", "holds"])
        for row in gridlab.boundary_counts(args.d, args.m, args.imax):
            writer.writerow([row.d, row.m, row.i, row.exact, row.bound, int(row.holds)])
        return 0
    if args.suite == "sum":
        writer.writerow(["j", "n_terms", "partial", "limit", "gap", "below"])
        for terms in ([args.terms] if args.terms is not None else range(0, 65, 8)):
            partial, limit = gridlab.sum_lemma(args.j, terms)
            writer.writerow([args.j, terms, f"{float(partial):.17g}", limit, f"{float(limit - partial):.6e}", int(partial < limit)])
        return 0
    seed = _seed(args)
    if args.suite == "hole":
        params = _resolve_lower(args)
        _echo(out, params)
        reports = [gridlab.run_hole_experiment(args.n, args.d, params["m"], params["t"], args.trials, seed)]
    elif args.suite == "flat":
        params = _resolve_lower(args)
        _echo(out, params)
        reports = [gridlab.run_flat_experiment(args.n, args.d, trials=args.trials, seed=seed, t=params["t"], p=params["p"])]
    else:
        params = _resolve_upper(args)
        _echo(out, params)
        reports = [gridlab.run_full_experiment(args.n, args.d, params["m"], params["t"], params["threshold"], args.trials, seed)]
    gridlab.write_reports_csv(reports, out)
    return 0


def _resolve_lower(args) -> dict:
    """Explicit --m/--t/--p win; missing ones come from GridParams.lower."""
    base: dict = {}
    if args.m is None or args.t is None or (args.suite == "flat" and args.p is None):
        base = gridlab.GridParams.lower(args.n, args.d, args.c, args.eps, args.delta).to_dict()
    params = dict(base, n=args.n, d=args.d, trials=args.trials, seed=args.seed)
    for key in ("m", "t", "p"):
        if getattr(args, key) is not None:
            params[key] = getattr(args, key)
    if args.s is not None:
        # an explicit density replaces the one derived from c
        N = args.n**args.d
        params["s"] = args.s
        if args.t is None:
            params["t"] = math.ceil(args.s * N)
        if args.p is None:
            params["p"] = math.ceil((1 + args.eps) * args.s * math.log(N))
    return params


def _resolve_upper(args) -> dict:
    base: dict = {}
    if args.m is None or args.t is None or args.threshold is None:
        base = gridlab.GridParams.upper(args.n, args.d, args.eps, args.preset).to_dict()
    params = dict(base, n=args.n, d=args.d, trials=args.trials, seed=args.seed)
    for key in ("m", "t", "threshold"):
        if getattr(args, key) is not None:
            params[key] = getattr(args, key)
    return params


def cmd_construct(args, out) -> int:
    from .girth import construct_candidate

    seed = _seed(args)
    g, report = construct_candidate(args.n, args.girth, seed, args.check_class0, args.budget)
    text = format_graph(g)
    if args.out_graph:
        with open(args.out_graph, "w") as fh:
            fh.write(text)
    report_json = report.to_json()
    if args.out_report:
        with open(args.out_report, "w") as fh:
            fh.write(report_json + "\n")
    _echo(out, {"n": args.n, "girth": args.girth, "seed": seed, "check_class0": args.check_class0})
    if not args.out_graph:
        out.write(text)
    if not args.out_report:
        out.write(report_json + "\n")
    if not report.certified:
        print("error: output failed girth/diameter certification", file=sys.stderr)
        return 1
    return 0


def cmd_graham(args, out) -> int:
    g, h = _graph(args.g.split(), args.seed), _graph(args.h.split(), args.seed)
    report = graham_check(g, h, args.budget)
    row = {
        "G": g.label, "H": h.label, "product": cartesian_product(g, h).label, "pi_G": str(report.pi_g),
        "pi_H": str(report.pi_h), "pi_product": str(report.pi_product),
        "holds": {True: "yes", False: "no", None: "unknown"}[report.holds],
        "slack": "" if report.slack is None else report.slack,
    }
    _emit(row, args.format, out)
    return 0 if report.holds is not None else 3


def _add_graph(p, nargs="+"):
    p.add_argument("graph", nargs=nargs, help="family tokens (path 5, grid 3 2, gnp 50 0.1 7, petersen) or a graph file")


def _add_common(p, seed=True, fmt=True, budget=False, jobs=False):
    if seed:
        p.add_argument("--seed", type=int, default=None, help="random seed (drawn from entropy and echoed if omitted)")
    if fmt:
        p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    if budget:
        p.add_argument("--budget", type=int, default=None, help=f"solver budget in explored configurations (env {BUDGET_ENV})")
    if jobs:
        p.add_argument("--jobs", type=int, default=1, help="worker processes for Monte Carlo trials")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pebble-lab", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--params-file", help="key = value file whose entries become default --key options")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a graph in the text format")
    _add_graph(p)
    _add_common(p, fmt=False)
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("metrics", help="diameter, girth, minimum degree, connectivity")
    _add_graph(p)
    _add_common(p)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("pi", help="pebbling number, bounds and Class 0 verdict")
    _add_graph(p)
    _add_common(p, budget=True)
    p.set_defaults(func=cmd_pi)

    p = sub.add_parser("solvable", help="decide solvability of one configuration")
    _add_graph(p)
    p.add_argument("--config", required=True, help='pebble counts, e.g. "4 0 0"')
    p.add_argument("--root", type=int, default=None, help="single root (default: every root)")
    _add_common(p, budget=True)
    p.set_defaults(func=cmd_solvable)

    p = sub.add_parser("threshold", help="Monte Carlo threshold bracket or sweep (CSV)")
    _add_graph(p)
    p.add_argument("--target", type=float, default=0.5)
    p.add_argument("--trials", type=int, default=400)
    p.add_argument("--sweep", help="t range lo:hi; emits one row per t instead of a bracket")
    _add_common(p, fmt=False, budget=True, jobs=True)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("lemmas", help="grid lemma suites (CSV)")
    p.add_argument("suite", choices=("count", "sum", "flat", "hole", "full"))
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--m", type=int, default=None, help="block side (count: box side)")
    p.add_argument("--imax", type=int, default=6)
    p.add_argument("--j", type=int, default=3)
    p.add_argument("--terms", type=int, default=None)
    p.add_argument("--n", type=int, default=16, help="grid side")
    p.add_argument("--t", type=int, default=None, help="pebbles")
    p.add_argument("--p", type=int, default=None, help="flatness level")
    p.add_argument("--s", type=float, default=None, help="pebbles per vertex (t = ceil(sN))")
    p.add_argument("--threshold", type=int, default=None, help="full-block threshold")
    p.add_argument("--c", type=float, default=0.5)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--preset", choices=("lemma", "theorem"), default="lemma")
    p.add_argument("--trials", type=int, default=10000)
    _add_common(p, fmt=False, jobs=True)
    p.set_defaults(func=cmd_lemmas)

    p = sub.add_parser("construct", help="large-girth small-diameter construction")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--girth", type=int, required=True)
    p.add_argument("--check-class0", action="store_true", help="also compute the pebbling number (small outputs only)")
    p.add_argument("--out-graph")
    p.add_argument("--out-report")
    _add_common(p, fmt=False, budget=True)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("graham", help="check pi(G x H) <= pi(G) pi(H)")
    p.add_argument("g", help='first factor, quoted, e.g. "path 3"')
    p.add_argument("h", help="second factor")
    _add_common(p, budget=True)
    p.set_defaults(func=cmd_graham)
    return parser


def _params_file_tokens(path: str) -> list[str]:
    tokens = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{path}: expected key = value, got {line!r}")
            key = key.strip().replace("_", "-")
            value = value.strip()
            if value.lower() in ("true", "yes"):
                tokens.append(f"--{key}")
            elif value.lower() not in ("false", "no"):
                tokens.extend([f"--{key}", value])
    return tokens


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.params_file:
        extra = _params_file_tokens(args.params_file)
        # file entries go after the command so explicit options still win
        at = argv.index(args.command) + 1
        args = parser.parse_args(argv[:at] + extra + argv[at:])
    if getattr(args, "budget", "absent") is None:
        args.budget = default_budget()
    try:
        return args.func(args, out)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point.

Exit codes: 0 on success, 2 on usage errors (argparse), 1 on runtime
failures. The worker count for precomputation is capped by the
FASTPPR_THREADS environment variable.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys

import numpy as np

from . import bench, oracle
from .estimators import QueryParams, balanced_fast_ppr, fast_ppr, local_update, monte_carlo
from .graph import load_edge_list_path


def _parse_delta(text, g):
    if text == "4/n":
        return 4.0 / g.n
    return float(text)


def _parse_eps_r(text, g, delta):
    if text == "auto":
        return math.sqrt(g.avg_degree * delta)
    return float(text)


def _add_graph_args(sp):
    sp.add_argument("--graph", required=True, help="edge-list file (u v per line)")
    sp.add_argument("--undirected", action="store_true",
                    help="treat each line as an undirected edge")
    sp.add_argument("--cache", action="store_true",
                    help="use a binary CSR cache next to the graph file")


def _build_parser():
    ap = argparse.ArgumentParser(prog="fastppr",
                                 description="Single-pair personalized PageRank estimation")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("estimate", help="estimate one source/target pair")
    _add_graph_args(sp)
    sp.add_argument("--source", required=True, type=int, help="source node (original id)")
    sp.add_argument("--target", required=True, type=int, help="target node (original id)")
    sp.add_argument("--algo", default="fastppr",
                    choices=["fastppr", "balanced", "montecarlo", "localupdate"])
    sp.add_argument("--delta", default="4/n", help="threshold, a float or '4/n'")
    sp.add_argument("--eps-r", default="auto", help="reverse threshold, a float or 'auto'")
    sp.add_argument("--alpha", type=float, default=0.2)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--store", help="frontier store file from 'precompute'")

    sp = sub.add_parser("benchmark", help="time algorithms over sampled pairs")
    _add_graph_args(sp)
    sp.add_argument("--pairs", type=int, default=100)
    sp.add_argument("--algos", default="fastppr,balanced,montecarlo,localupdate")
    sp.add_argument("--target-dist", default="uniform", choices=["uniform", "pagerank"])
    sp.add_argument("--delta", default="4/n")
    sp.add_argument("--eps-r", default="auto")
    sp.add_argument("--alpha", type=float, default=0.2)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True, help="output CSV path")

    sp = sub.add_parser("accuracy", help="near-threshold accuracy study")
    _add_graph_args(sp)
    sp.add_argument("--targets", type=int, default=25)
    sp.add_argument("--per-bin", type=int, default=50)
    sp.add_argument("--delta", default="4/n")
    sp.add_argument("--alpha", type=float, default=0.2)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("ccdf", help="CCDF of estimated PPR over random pairs")
    _add_graph_args(sp)
    sp.add_argument("--pairs", type=int, default=1000)
    sp.add_argument("--floor", default=None,
                    help="estimation accuracy floor (default 1/(10n))")
    sp.add_argument("--alpha", type=float, default=0.2)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("balance", help="forward/reverse time by target percentile")
    _add_graph_args(sp)
    sp.add_argument("--percentiles", type=int, default=100)
    sp.add_argument("--delta", default="4/n")
    sp.add_argument("--alpha", type=float, default=0.2)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("groundtruth", help="exact PPR vectors by power iteration/push")
    _add_graph_args(sp)
    grp = sp.add_mutually_exclusive_group(required=True)
    grp.add_argument("--source", type=int, help="forward vector from this node")
    grp.add_argument("--target", type=int, help="inverse vector to this node")
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.add_argument("--alpha", type=float, default=0.2)
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("precompute", help="build a frontier store for all targets")
    _add_graph_args(sp)
    sp.add_argument("--eps-r", required=True, type=float)
    sp.add_argument("--beta", type=float, default=1.0 / 6.0)
    sp.add_argument("--alpha", type=float, default=0.2)
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("gen", help="generate a synthetic power-law graph")
    sp.add_argument("--nodes", required=True, type=int)
    sp.add_argument("--edges", required=True, type=int)
    sp.add_argument("--exponent", type=float, default=2.5)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)

    return ap


def _load(args):
    return load_edge_list_path(args.graph, undirected=args.undirected,
                               use_cache=args.cache)


def _cmd_estimate(args):
    g = _load(args)
    delta = _parse_delta(args.delta, g)
    eps_r = _parse_eps_r(args.eps_r, g, delta)
    s = g.internal_id(args.source)
    t = g.internal_id(args.target)
    p = QueryParams(delta=delta, alpha=args.alpha, eps_r=eps_r, seed=args.seed)
    if args.store:
        store = oracle.FrontierStore.load(args.store, g=g)
        est = oracle.query_with_store(store, g, s, t, p)
    elif args.algo == "fastppr":
        est = fast_ppr(g, s, t, p)
    elif args.algo == "balanced":
        est = balanced_fast_ppr(g, s, t, p)
    elif args.algo == "montecarlo":
        est = monte_carlo(g, s, t, delta, alpha=args.alpha, seed=args.seed)
    else:
        est = local_update(g, s, t, delta, alpha=args.alpha)
    print(f"{est.value:.12g}")
    return 0


def _cmd_benchmark(args):
    g = _load(args)
    delta = _parse_delta(args.delta, g)
    eps_r = _parse_eps_r(args.eps_r, g, delta)
    p = QueryParams(delta=delta, alpha=args.alpha, eps_r=eps_r, seed=args.seed)
    rng = np.random.default_rng(args.seed)
    pairs = bench.sample_pairs(g, args.pairs, args.target_dist, rng)
    algos = [a for a in args.algos.split(",") if a]
    records = bench.run_timing(g, pairs, algos, p, graph_name=args.graph)
    bench.write_records_csv(records, args.out)
    print(f"wrote {len(records)} records to {args.out}")
    return 0


def _cmd_accuracy(args):
    g = _load(args)
    delta = _parse_delta(args.delta, g)
    p = QueryParams(delta=delta, alpha=args.alpha, seed=args.seed)
    records, summary = bench.accuracy_experiment(
        g, args.targets, args.per_bin, delta, p, seed=args.seed,
        graph_name=args.graph)
    bench.write_records_csv(records, args.out)
    for k, v in summary.items():
        print(f"{k}: {v}")
    return 0


def _cmd_ccdf(args):
    g = _load(args)
    floor = float(args.floor) if args.floor else 1.0 / (10.0 * g.n)
    p = QueryParams(delta=floor, alpha=args.alpha, seed=args.seed)
    rows = bench.ppr_ccdf(g, args.pairs, floor, p, seed=args.seed)
    bench.write_ccdf_csv(rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def _cmd_balance(args):
    g = _load(args)
    delta = _parse_delta(args.delta, g)
    p = QueryParams(delta=delta, alpha=args.alpha, seed=args.seed)
    rows = bench.balance_diagnostics(g, args.percentiles, p, seed=args.seed)
    bench.write_balance_csv(rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def _cmd_groundtruth(args):
    g = _load(args)
    if args.source is not None:
        vec = oracle.power_iteration_ppr(g, g.internal_id(args.source),
                                         args.alpha, args.tol)
    else:
        vec = oracle.exact_inverse_ppr(g, g.internal_id(args.target),
                                       args.alpha, args.tol)
    with open(args.out, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["node", "value"])
        for u, v in enumerate(vec.values):
            w.writerow([g.orig_ids[u], repr(float(v))])
    print(f"wrote {g.n} values to {args.out}")
    return 0


def _cmd_precompute(args):
    g = _load(args)
    store = oracle.precompute_frontiers(g, args.eps_r, args.beta, args.alpha,
                                        out=args.out)
    print(f"stored {len(store.records)} frontiers, "
          f"{store.total_entries} entries, to {args.out}")
    return 0


def _cmd_gen(args):
    g = bench.generate_power_law_graph(args.nodes, args.edges,
                                       exponent=args.exponent, seed=args.seed)
    with open(args.out, "w") as f:
        f.write(bench.graph_to_edge_text(g))
    print(f"wrote n={g.n} m={g.m} to {args.out}")
    return 0


_COMMANDS = {
    "estimate": _cmd_estimate,
    "benchmark": _cmd_benchmark,
    "accuracy": _cmd_accuracy,
    "ccdf": _cmd_ccdf,
    "balance": _cmd_balance,
    "groundtruth": _cmd_groundtruth,
    "precompute": _cmd_precompute,
    "gen": _cmd_gen,
}


def main(argv=None):
    ap = _build_parser()
    args = ap.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except BrokenPipeError:
        return 1
    except Exception as exc:  # runtime failures -> exit 1, not a traceback
        print(f"fastppr: error: {exc}", file=sys.stderr)
        return 1


dispatch = main


if __name__ == "__main__":
    sys.exit(main())

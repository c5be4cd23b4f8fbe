"""Experiment harness: pair sampling, timing runs, accuracy studies, CCDF,
and forward/reverse balance diagnostics, all emitting CSV rows.

Synthetic graphs come from a directed configuration model with power-law
degree weights so the suite stays hermetic (no dataset downloads).
"""

from __future__ import annotations

import csv
import io
import logging
import math
import time
from dataclasses import dataclass

import numpy as np

from .estimators import (QueryParams, balanced_fast_ppr, fast_ppr,
                         local_update, monte_carlo)
from .graph import from_edges
from .oracle import exact_inverse_ppr, global_pagerank

log = logging.getLogger(__name__)

CSV_HEADER = ("graph,algorithm,source,target,delta,estimate,truth,rel_err,"
              "forward_ms,reverse_ms,total_ms,walks,pushes,seed")

BALANCE_HEADER = "percentile,algorithm,forward_ms,reverse_ms"


@dataclass
class BenchRecord:
    graph: str
    algorithm: str
    source: int
    target: int
    delta: float
    estimate: float | None
    truth: float | None
    rel_err: float | None
    forward_ms: float
    reverse_ms: float
    total_ms: float
    walks: int
    pushes: int
    seed: int

    def to_row(self):
        def opt(x):
            return "" if x is None else repr(float(x))

        return [self.graph, self.algorithm, str(self.source), str(self.target),
                repr(float(self.delta)), opt(self.estimate), opt(self.truth),
                opt(self.rel_err), repr(self.forward_ms), repr(self.reverse_ms),
                repr(self.total_ms), str(self.walks), str(self.pushes),
                str(self.seed)]

    @classmethod
    def from_row(cls, row):
        def opt(x):
            return None if x == "" else float(x)

        return cls(graph=row[0], algorithm=row[1], source=int(row[2]),
                   target=int(row[3]), delta=float(row[4]), estimate=opt(row[5]),
                   truth=opt(row[6]), rel_err=opt(row[7]),
                   forward_ms=float(row[8]), reverse_ms=float(row[9]),
                   total_ms=float(row[10]), walks=int(row[11]),
                   pushes=int(row[12]), seed=int(row[13]))


def write_records_csv(records, path_or_buf):
    close = False
    if isinstance(path_or_buf, (str, bytes)):
        f = open(path_or_buf, "w", newline="")
        close = True
    else:
        f = path_or_buf
    try:
        w = csv.writer(f)
        w.writerow(CSV_HEADER.split(","))
        for r in records:
            w.writerow(r.to_row())
    finally:
        if close:
            f.close()


def read_records_csv(path_or_buf):
    close = False
    if isinstance(path_or_buf, (str, bytes)):
        f = open(path_or_buf, newline="")
        close = True
    else:
        f = path_or_buf
    try:
        rows = list(csv.reader(f))
    finally:
        if close:
            f.close()
    if not rows or rows[0] != CSV_HEADER.split(","):
        raise ValueError("not a benchmark CSV (bad header)")
    return [BenchRecord.from_row(r) for r in rows[1:]]


# ---------------------------------------------------------------------------
# Synthetic graphs


def generate_power_law_graph(n, m, exponent=2.5, seed=0):
    """Directed configuration-model graph with power-law degree weights.

    Out-degrees follow a discretized Pareto with tail exponent `exponent`;
    targets are drawn proportionally to an independent power-law weight, so
    in-degrees are skewed too. Duplicate edges are dropped, so the realized
    edge count lands a little under `m`.
    """
    rng = np.random.default_rng([seed, n, m])
    a = exponent - 1.0
    w_out = 1.0 + rng.pareto(a, n)
    w_in = 1.0 + rng.pareto(a, n)
    d_out = np.maximum(1, np.round(w_out * (m / w_out.sum()))).astype(np.int64)
    src = np.repeat(np.arange(n, dtype=np.int64), d_out)
    dst = rng.choice(n, size=len(src), p=w_in / w_in.sum()).astype(np.int64)
    return from_edges(np.stack([src, dst], axis=1), n=n)


def graph_to_edge_text(g):
    buf = io.StringIO()
    src = np.repeat(np.arange(g.n), g.out_deg)
    for u, v in zip(src, g.out_indices):
        buf.write(f"{u} {v}\n")
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Pair sampling


def sample_pairs(g, k, target_dist="uniform", rng=None):
    """Sample k (source, target) pairs: sources uniform, targets either
    uniform or proportional to global PageRank."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if rng is None:
        rng = np.random.default_rng(0)
    sources = rng.integers(0, g.n, size=k)
    if target_dist == "uniform":
        targets = rng.integers(0, g.n, size=k)
    elif target_dist == "pagerank":
        pr = global_pagerank(g, alpha=0.2).values
        targets = rng.choice(g.n, size=k, p=pr / pr.sum())
    else:
        raise ValueError(f"unknown target distribution {target_dist!r}")
    return [(int(s), int(t)) for s, t in zip(sources, targets)]


# ---------------------------------------------------------------------------
# Timing runs


def _run_algorithm(name, g, s, t, p):
    if name == "fastppr":
        return fast_ppr(g, s, t, p)
    if name == "balanced":
        return balanced_fast_ppr(g, s, t, p)
    if name == "montecarlo":
        return monte_carlo(g, s, t, p.delta, c_mc=p.c_mc, alpha=p.alpha, seed=p.seed)
    if name == "localupdate":
        return local_update(g, s, t, p.delta, alpha=p.alpha)
    raise ValueError(f"unknown algorithm {name!r}")


ALGORITHMS = ("fastppr", "balanced", "montecarlo", "localupdate")


def run_timing(g, pairs, algorithms, p, graph_name="graph", truth=None):
    """Time each algorithm on each pair; one record per (pair, algorithm).

    The graph must already be loaded; each algorithm gets one untimed
    warm-up query first so JIT compilation and per-graph calibration never
    land inside a measured query. Per-record failures are logged and the
    run continues. `truth` optionally maps (s, t) to oracle values.
    """
    records = []
    if not algorithms:
        return records
    if pairs:
        ws, wt = pairs[0]
        for name in algorithms:
            try:
                _run_algorithm(name, g, ws, wt, p)
            except Exception:
                log.exception("warmup failed for %s", name)
    for s, t in pairs:
        for name in algorithms:
            t0 = time.perf_counter()
            try:
                est = _run_algorithm(name, g, s, t, p)
            except Exception:
                log.exception("%s failed on pair (%d, %d)", name, s, t)
                records.append(BenchRecord(
                    graph=graph_name, algorithm=name, source=s, target=t,
                    delta=p.delta, estimate=None, truth=None, rel_err=None,
                    forward_ms=0.0, reverse_ms=0.0,
                    total_ms=(time.perf_counter() - t0) * 1e3, walks=0,
                    pushes=0, seed=p.seed))
                continue
            total_ms = (time.perf_counter() - t0) * 1e3
            tv = truth.get((s, t)) if truth else None
            rel = None
            if tv is not None and tv > 0:
                rel = abs(est.value - tv) / tv
            records.append(BenchRecord(
                graph=graph_name, algorithm=name, source=s, target=t,
                delta=p.delta, estimate=est.value, truth=tv, rel_err=rel,
                forward_ms=est.forward_time * 1e3,
                reverse_ms=est.reverse_time * 1e3, total_ms=total_ms,
                walks=est.walks_used, pushes=est.frontier_pushes, seed=p.seed))
    return records


# ---------------------------------------------------------------------------
# Accuracy study


def accuracy_experiment(g, targets, per_bin, delta, p, seed=0, graph_name="graph"):
    """Near-threshold accuracy protocol.

    For each sampled target, sources are binned by ground-truth value into
    [delta/4, delta] and [delta, 4*delta] (computed to tolerance delta/100),
    `per_bin` sources drawn from each, and the bidirectional estimator run
    on every pair. Targets with an empty bin are skipped (logged) and
    another drawn. Returns (records, summary dict).
    """
    rng = np.random.default_rng([seed, g.n])
    pool = rng.permutation(g.n)
    records = []
    done = 0
    params = QueryParams(delta=delta, alpha=p.alpha, eps_r=p.eps_r, c=p.c,
                         beta=p.beta, c_mc=p.c_mc, seed=p.seed)
    for t in pool:
        if done >= targets:
            break
        t = int(t)
        gt = exact_inverse_ppr(g, t, params.alpha, tol=delta / 100.0).values
        lo_bin = np.where((gt >= delta / 4.0) & (gt <= delta))[0]
        hi_bin = np.where((gt >= delta) & (gt <= 4.0 * delta))[0]
        if len(lo_bin) < per_bin or len(hi_bin) < per_bin:
            log.info("target %d resampled: bins %d/%d too small", t,
                     len(lo_bin), len(hi_bin))
            continue
        done += 1
        sources = np.concatenate([
            rng.choice(lo_bin, size=per_bin, replace=False),
            rng.choice(hi_bin, size=per_bin, replace=False),
        ])
        for s in sources:
            s = int(s)
            t0 = time.perf_counter()
            est = fast_ppr(g, s, t, params)
            total_ms = (time.perf_counter() - t0) * 1e3
            tv = float(gt[s])
            records.append(BenchRecord(
                graph=graph_name, algorithm="fastppr", source=s, target=t,
                delta=delta, estimate=est.value, truth=tv,
                rel_err=abs(est.value - tv) / tv,
                forward_ms=est.forward_time * 1e3,
                reverse_ms=est.reverse_time * 1e3, total_ms=total_ms,
                walks=est.walks_used, pushes=est.frontier_pushes,
                seed=params.seed))
    if done < targets:
        raise RuntimeError(f"only {done}/{targets} usable targets found")
    add_err = np.array([abs(r.estimate - r.truth) for r in records])
    rel_err = np.array([r.rel_err for r in records])
    summary = {
        "avg_additive_error": float(add_err.mean()),
        "max_additive_error": float(add_err.max()),
        "avg_relative_error": float(rel_err.mean()),
        "max_relative_error": float(rel_err.max()),
        "pairs": len(records),
    }
    return records, summary


# ---------------------------------------------------------------------------
# CCDF of estimated PPR values


def ppr_ccdf(g, k, delta_floor, p, seed=0, points_per_decade=5):
    """Estimate k uniform pairs at accuracy delta_floor and tabulate the
    fraction of pairs at or above log-spaced thresholds.

    The first row is (0.0, 1.0); every estimate is nonnegative, so the
    fractions are monotone nonincreasing in the threshold.
    """
    if not 0.0 < delta_floor < 1.0:
        raise ValueError("delta_floor must be in (0, 1)")
    rng = np.random.default_rng([seed, 0xCCDF])
    pairs = sample_pairs(g, k, "uniform", rng)
    params = QueryParams(delta=delta_floor, alpha=p.alpha, eps_r=p.eps_r,
                         c=p.c, beta=p.beta, seed=p.seed)
    estimates = np.array([fast_ppr(g, s, t, params).value for s, t in pairs])
    decades = max(1, int(math.ceil(-math.log10(delta_floor))))
    thresholds = np.logspace(math.log10(delta_floor), 0.0,
                             decades * points_per_decade + 1)
    rows = [(0.0, 1.0)]
    for thr in thresholds:
        rows.append((float(thr), float((estimates >= thr).mean())))
    return rows


def write_ccdf_csv(rows, path_or_buf):
    close = False
    if isinstance(path_or_buf, (str, bytes)):
        f = open(path_or_buf, "w", newline="")
        close = True
    else:
        f = path_or_buf
    try:
        w = csv.writer(f)
        w.writerow(["threshold", "fraction"])
        for thr, frac in rows:
            w.writerow([repr(thr), repr(frac)])
    finally:
        if close:
            f.close()


# ---------------------------------------------------------------------------
# Balance diagnostics


def _median_smooth(values, window=5):
    """5-point running median with shrinking windows at the ends."""
    out = np.empty(len(values))
    half = window // 2
    for i in range(len(values)):
        lo = max(0, i - half)
        hi = min(len(values), i + half + 1)
        out[i] = np.median(values[lo:hi])
    return out


def balance_diagnostics(g, percentiles, p, seed=0, sources_per_target=3):
    """Forward vs reverse time per target-PageRank percentile, both variants.

    Targets are ranked by global PageRank and one picked per percentile;
    times are medians over a few random sources, then 5-point median
    smoothed across percentiles. Returns one dict per (percentile, variant).
    """
    rng = np.random.default_rng([seed, 0xBA1A])
    pr = global_pagerank(g, alpha=p.alpha).values
    order = np.argsort(pr)
    # each percentile is represented by its highest-ranked node, so the
    # last row is the graph's top-PageRank target
    targets = [int(order[min(g.n, (q + 1) * g.n // percentiles) - 1])
               for q in range(percentiles)]
    series = {"fastppr": ([], []), "balanced": ([], [])}
    for t in targets:
        sources = rng.integers(0, g.n, size=sources_per_target)
        for name in ("fastppr", "balanced"):
            fwd, rev = [], []
            for s in sources:
                est = _run_algorithm(name, g, int(s), t, p)
                fwd.append(est.forward_time * 1e3)
                rev.append(est.reverse_time * 1e3)
            series[name][0].append(float(np.median(fwd)))
            series[name][1].append(float(np.median(rev)))
    rows = []
    for name, (fwd, rev) in series.items():
        fwd_s = _median_smooth(np.array(fwd))
        rev_s = _median_smooth(np.array(rev))
        for q in range(percentiles):
            rows.append({"percentile": q, "algorithm": name,
                         "forward_ms": float(fwd_s[q]),
                         "reverse_ms": float(rev_s[q])})
    return rows


def write_balance_csv(rows, path_or_buf):
    close = False
    if isinstance(path_or_buf, (str, bytes)):
        f = open(path_or_buf, "w", newline="")
        close = True
    else:
        f = path_or_buf
    try:
        w = csv.writer(f)
        w.writerow(BALANCE_HEADER.split(","))
        for r in rows:
            w.writerow([r["percentile"], r["algorithm"],
                        repr(r["forward_ms"]), repr(r["reverse_ms"])])
    finally:
        if close:
            f.close()

"""Reverse local-push computation of approximate inverse PPR around a target.

`frontier_push` runs the fixed-threshold loop: every estimate it returns is
an underestimate of the true inverse-PPR value by less than beta*eps_r.
`balanced_frontier` is the adaptive variant that keeps pushing only while
the projected forward (random-walk) cost at the current accuracy still
exceeds the reverse time already spent.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .walks import calibrate_walk_time

# Cost model for the balanced variant's reverse clock: one push costs
# (in-degree + _PUSH_OVERHEAD) edge-units; t_edge converts units to seconds.
_PUSH_OVERHEAD = 8.0


@dataclass
class FrontierResult:
    """Output of a reverse push around `target`.

    `estimates` covers the target set and frontier set only; `residuals`
    holds the leftover push mass for every touched node (diagnostics).
    For the balanced variant, `reverse_time` is the internal balance clock
    the stopping rule compared against the forward-time prediction; for the
    fixed variant it is measured wall time.
    """

    target: int
    eps_r: float
    eps_inv: float
    target_set: frozenset
    frontier_set: frozenset
    estimates: dict
    residuals: dict
    push_count: int
    reverse_time: float


def _validate(g, t, alpha, beta):
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if not 0.0 < beta < 0.5:
        raise ValueError(f"beta must be in (0, 1/2), got {beta}")
    if not 0 <= t < g.n:
        raise ValueError(f"target {t} out of range for n={g.n}")


def frontier_push(g, t, eps_r, beta, alpha):
    """Fixed-threshold reverse push at t (threshold alpha*beta*eps_r).

    Returns a FrontierResult whose estimates satisfy
    max_w |estimate(w) - true_inverse_ppr(w)| < beta * eps_r, one-sided
    from below. The target set is every node whose estimate exceeds eps_r
    (t always included); the frontier is the target set's in-neighborhood
    minus the target set itself.
    """
    _validate(g, t, alpha, beta)
    if not 0.0 < eps_r <= 1.0:
        raise ValueError(f"eps_r must be in (0, 1], got {eps_r}")
    eps_inv = beta * eps_r
    t0 = time.perf_counter()
    nodes, est, res, tgt, fro, pushes, _touches = _kernels.reverse_push(
        g.in_indptr, g.in_indices, g.out_deg, g.n, int(t), alpha, eps_r,
        eps_inv, True
    )
    elapsed = time.perf_counter() - t0
    return _build_result(t, eps_r, eps_inv, nodes, est, res, tgt, fro, pushes, elapsed)


def _build_result(t, eps_r, eps_inv, nodes, est, res, tgt, fro, pushes, elapsed):
    idx = {int(u): i for i, u in enumerate(nodes)}
    target_set = frozenset(int(u) for u in tgt)
    frontier_set = frozenset(int(u) for u in fro)
    estimates = {
        u: float(est[idx[u]]) if u in idx else 0.0
        for u in target_set | frontier_set
    }
    residuals = {int(u): float(r) for u, r in zip(nodes, res) if r != 0.0}
    return FrontierResult(
        target=int(t), eps_r=float(eps_r), eps_inv=float(eps_inv),
        target_set=target_set, frontier_set=frontier_set,
        estimates=estimates, residuals=residuals,
        push_count=int(pushes), reverse_time=float(elapsed),
    )


def push_arrays(g, t, eps_r, beta, alpha):
    """Array-level fixed push for the estimator hot path.

    Returns (touched nodes sorted, estimates, target nodes sorted, frontier
    nodes sorted, push count, wall seconds) without building dict/set
    results.
    """
    _validate(g, t, alpha, beta)
    if not 0.0 < eps_r <= 1.0:
        raise ValueError(f"eps_r must be in (0, 1], got {eps_r}")
    t0 = time.perf_counter()
    nodes, est, _res, tgt, fro, pushes, _touches = _kernels.reverse_push(
        g.in_indptr, g.in_indices, g.out_deg, g.n, int(t), alpha, eps_r,
        beta * eps_r, True
    )
    return nodes, est, tgt, fro, int(pushes), time.perf_counter() - t0


def balanced_arrays(g, t, delta, c, beta, alpha, t_walk=None):
    """Array-level balanced push; also returns the final dynamic eps_r.

    Returns (touched nodes, estimates, target nodes, frontier nodes,
    push count, eps_r, wall seconds).
    """
    _validate(g, t, alpha, beta)
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    if t_walk is None:
        t_walk = calibrate_walk_time(g, alpha)
    if t_walk < 0:
        raise ValueError("t_walk must be nonnegative")
    t_edge = calibrate_edge_time(g, alpha)
    t0 = time.perf_counter()
    nodes, est, _res, pushes, _touches, eps_r, _units = _kernels.balanced_reverse_push(
        g.in_indptr, g.in_indices, g.out_deg, g.n, int(t), alpha, beta,
        float(c), delta, float(t_walk) / t_edge, _PUSH_OVERHEAD, np.inf
    )
    tgt, fro = _kernels.enrollment_scan(
        g.in_indptr, g.in_indices, nodes, est, int(t), eps_r, g.n
    )
    return nodes, est, tgt, fro, int(pushes), float(eps_r), time.perf_counter() - t0


def lookup_values(nodes, est, query_nodes):
    """Estimates for query_nodes given the sorted touched-node arrays;
    untouched nodes score 0."""
    pos = np.searchsorted(nodes, query_nodes)
    pos = np.minimum(pos, len(nodes) - 1) if len(nodes) else pos
    vals = np.zeros(len(query_nodes))
    if len(nodes):
        found = nodes[pos] == query_nodes
        vals[found] = est[pos[found]]
    return vals


def inverse_estimates(g, t, eps_inv, alpha):
    """Reverse push without target/frontier bookkeeping.

    Returns (nodes, estimates, residuals, pushes): every touched node's
    estimate, each within eps_inv of the true inverse PPR (from below).
    """
    _validate(g, t, alpha, 0.25)
    nodes, est, res, _tg, _fr, pushes, _touches = _kernels.reverse_push(
        g.in_indptr, g.in_indices, g.out_deg, g.n, int(t), alpha, 2.0,
        eps_inv, False
    )
    return nodes, est, res, int(pushes)


def calibrate_edge_time(g, alpha):
    """Mean seconds per edge-unit of the balanced push kernel's work.

    Timed on the highest in-degree targets with the kernel's internal unit
    cap so the heap overhead is included and the kernel-call overhead is
    amortized; memoized per (graph, alpha). Converts the balanced
    variant's work counter into seconds comparable with walk times.
    """
    key = ("t_edge", float(alpha))
    cached = g._calibration.get(key)
    if cached is not None:
        return cached
    targets = np.argsort(g.in_deg)[-4:]
    # warm the kernel so compilation is not billed to the calibration
    _kernels.balanced_reverse_push(
        g.in_indptr, g.in_indices, g.out_deg, g.n, int(targets[-1]), alpha,
        1.0 / 6.0, 350.0, 0.5, np.inf, _PUSH_OVERHEAD, 64.0)
    total_units = 0.0
    t0 = time.perf_counter()
    for t in targets:
        out = _kernels.balanced_reverse_push(
            g.in_indptr, g.in_indices, g.out_deg, g.n, int(t), alpha,
            1.0 / 6.0, 350.0, 10.0 / g.n, np.inf, _PUSH_OVERHEAD, 100_000.0)
        total_units += out[6]
        if total_units > 150_000:
            break
    elapsed = time.perf_counter() - t0
    t_edge = elapsed / max(total_units, 1.0)
    g._calibration[key] = t_edge
    return t_edge


def balanced_frontier(g, t, delta, c, beta, alpha, t_walk=None):
    """Adaptive reverse push: largest residual first, stopping when the
    reverse time spent reaches the predicted forward time t_walk*c*eps_r/delta
    at the current accuracy eps_r = (max residual)/(alpha*beta).

    `t_walk` defaults to the calibrated mean walk generation time for this
    graph. The returned result records the final dynamic eps_r; target and
    frontier sets are recomputed at that threshold so the same structural
    invariants hold as for the fixed variant.
    """
    _validate(g, t, alpha, beta)
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    if t_walk is None:
        t_walk = calibrate_walk_time(g, alpha)
    if t_walk < 0:
        raise ValueError("t_walk must be nonnegative")
    t_edge = calibrate_edge_time(g, alpha)
    nodes, est, res, pushes, _touches, eps_r, units = _kernels.balanced_reverse_push(
        g.in_indptr, g.in_indices, g.out_deg, g.n, int(t), alpha, beta,
        float(c), delta, float(t_walk) / t_edge, _PUSH_OVERHEAD, np.inf
    )
    tgt, fro = _kernels.enrollment_scan(
        g.in_indptr, g.in_indices, nodes, est, int(t), eps_r, g.n
    )
    return _build_result(t, eps_r, beta * eps_r, nodes, est, res, tgt, fro,
                         pushes, units * t_edge)


# ---------------------------------------------------------------------------
# Pure-Python reference implementation (tests cross-check the kernel
# against this, bit for bit, and probe the loop invariant mid-run).


def reference_push(g, t, eps_r, beta, alpha, max_pushes=None):
    """Slow dictionary-based mirror of the push kernel.

    Same FIFO order and float operations, so results match the kernel
    exactly. `max_pushes` stops the loop early to expose mid-run state.
    Returns (estimates, residuals, target_set, frontier_set, pushes).
    """
    from collections import deque

    eps_inv = beta * eps_r
    threshold = alpha * eps_inv
    est = {t: alpha}
    res = {t: alpha}
    in_target = {t}
    in_frontier = set(int(u) for u in g.in_neighbors(t))
    queue = deque([t])
    queued = {t}
    pushes = 0
    while queue:
        if max_pushes is not None and pushes >= max_pushes:
            break
        w = queue.popleft()
        queued.discard(w)
        rw = res.get(w, 0.0)
        if rw <= threshold:
            continue
        res[w] = 0.0
        pushes += 1
        base = (1.0 - alpha) * rw
        for u in g.in_neighbors(w):
            u = int(u)
            delta = base / g.out_deg[u]
            est[u] = est.get(u, 0.0) + delta
            res[u] = res.get(u, 0.0) + delta
            if est[u] > eps_r and u not in in_target:
                in_target.add(u)
                in_frontier.update(int(v) for v in g.in_neighbors(u))
            if res[u] > threshold and u not in queued:
                queue.append(u)
                queued.add(u)
    return est, res, in_target, in_frontier - in_target, pushes

"""End-to-end single-pair PPR estimators and the Detect-High classifier.

The headline estimator works backward from the target (reverse push up to a
threshold eps_r) and forward from the source (geometric-length random walks
scored by the first frontier node they hit). Monte-Carlo and pure
local-update baselines share the same primitives.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .frontier import (balanced_arrays, frontier_push, inverse_estimates,
                       lookup_values, push_arrays)


@dataclass
class QueryParams:
    """Tunables for a pair query.

    `eps_r=None` resolves to sqrt(avg_degree * delta) at query time, the
    setting that balances reverse and forward work asymptotically.
    """

    delta: float
    alpha: float = 0.2
    eps_r: float | None = None
    c: float = 350.0
    beta: float = 1.0 / 6.0
    c_mc: float = 35.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must be in (0, 1), got {self.delta}")
        if not 0.0 < self.beta < 0.5:
            raise ValueError(f"beta must be in (0, 1/2), got {self.beta}")
        if self.c < 1 or self.c_mc < 1:
            raise ValueError("walk multipliers c and c_mc must be >= 1")

    def resolve_eps_r(self, g):
        if self.eps_r is not None:
            return self.eps_r
        return math.sqrt(g.avg_degree * self.delta)


@dataclass
class TheoreticalParams:
    """Derived constants for the relative-error-guaranteed estimator."""

    c_rel: float
    p_fail: float
    eps_f: float
    beta: float
    p_min: float
    l_max: int
    n_f: int

    @classmethod
    def derive(cls, c_rel, p_fail, delta, eps_r, alpha):
        if not 0.0 < c_rel < 1.0:
            raise ValueError(f"relative error target must be in (0, 1), got {c_rel}")
        if not 0.0 < p_fail < 1.0:
            raise ValueError(f"p_fail must be in (0, 1), got {p_fail}")
        eps_f = delta / eps_r
        beta = c_rel / (3.0 + c_rel)
        p_min = c_rel / (3.0 * (1.0 + beta))
        l_max = math.ceil(math.log(c_rel * delta / 3.0) / math.log(1.0 - alpha))
        n_f = math.ceil(45.0 * l_max / (c_rel ** 2 * eps_f) * math.log(2.0 / p_fail))
        tp = cls(c_rel=c_rel, p_fail=p_fail, eps_f=eps_f, beta=beta,
                 p_min=p_min, l_max=int(l_max), n_f=int(n_f))
        if tp.l_max < 1 or tp.n_f < 1 or tp.beta >= 0.5:
            raise ValueError(f"derived parameters out of range: {tp}")
        return tp


@dataclass
class Estimate:
    """A PPR estimate with its cost breakdown."""

    value: float
    algorithm: str
    walks_used: int
    frontier_pushes: int
    forward_time: float
    reverse_time: float
    shortcut: bool = False


def _check_nodes(g, s, t):
    if not 0 <= s < g.n:
        raise ValueError(f"source {s} out of range for n={g.n}")
    if not 0 <= t < g.n:
        raise ValueError(f"target {t} out of range for n={g.n}")


def _forward_phase(g, s, frontier_nodes, frontier_vals, eps_r, delta, c, alpha, seed):
    """Run the hitting walks; returns (estimate, walk count, wall seconds)."""
    k = math.ceil(c * eps_r / delta)
    if k <= 0:
        return 0.0, 0, 0.0
    mask = np.zeros(g.n, dtype=bool)
    vals = np.zeros(g.n)
    fnodes = np.asarray(frontier_nodes, dtype=np.int64)
    mask[fnodes] = True
    vals[fnodes] = frontier_vals
    t0 = time.perf_counter()
    total, _hits, _steps = _kernels.first_hit_walks(
        g.out_indptr, g.out_indices, int(s), alpha, int(k), seed, 0, mask, vals
    )
    return total / k, int(k), time.perf_counter() - t0


def _in_sorted(arr, x):
    i = np.searchsorted(arr, x)
    return i < len(arr) and arr[i] == x


def fast_ppr(g, s, t, p):
    """Bidirectional estimate of the PPR from s to t.

    Reverse push at threshold eps_r gives inverse-PPR values on the
    target/frontier sets; if s lands in the target set the stored value is
    returned directly. Otherwise ceil(c*eps_r/delta) geometric walks from s
    are scored by the frontier value of their first hit (0 if none).
    """
    _check_nodes(g, s, t)
    eps_r = p.resolve_eps_r(g)
    nodes, est, tgt, fro, pushes, reverse = push_arrays(g, t, eps_r, p.beta,
                                                        p.alpha)
    if _in_sorted(tgt, s):
        value = float(lookup_values(nodes, est, np.array([s]))[0])
        return Estimate(value=value, algorithm="fastppr", walks_used=0,
                        frontier_pushes=pushes, forward_time=0.0,
                        reverse_time=reverse, shortcut=True)
    fvals = lookup_values(nodes, est, fro)
    value, k, fwd = _forward_phase(g, s, fro, fvals, eps_r, p.delta, p.c,
                                   p.alpha, p.seed)
    return Estimate(value=value, algorithm="fastppr", walks_used=k,
                    frontier_pushes=pushes, forward_time=fwd,
                    reverse_time=reverse, shortcut=False)


def balanced_fast_ppr(g, s, t, p, t_walk=None):
    """Like `fast_ppr`, but the reverse threshold adapts per target so the
    reverse time spent matches the predicted forward walk time."""
    _check_nodes(g, s, t)
    nodes, est, tgt, fro, pushes, eps_r, reverse = balanced_arrays(
        g, t, p.delta, p.c, p.beta, p.alpha, t_walk=t_walk)
    if _in_sorted(tgt, s):
        value = float(lookup_values(nodes, est, np.array([s]))[0])
        return Estimate(value=value, algorithm="balanced", walks_used=0,
                        frontier_pushes=pushes, forward_time=0.0,
                        reverse_time=reverse, shortcut=True)
    fvals = lookup_values(nodes, est, fro)
    value, k, fwd = _forward_phase(g, s, fro, fvals, eps_r, p.delta,
                                   p.c, p.alpha, p.seed)
    return Estimate(value=value, algorithm="balanced", walks_used=k,
                    frontier_pushes=pushes, forward_time=fwd,
                    reverse_time=reverse, shortcut=False)


def monte_carlo(g, s, t, delta, c_mc=35.0, alpha=0.2, seed=0):
    """Plain Monte-Carlo estimate: the fraction of ceil(c_mc/delta)
    geometric walks from s whose final node is t. Unbiased."""
    _check_nodes(g, s, t)
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    k = math.ceil(c_mc / delta)
    t0 = time.perf_counter()
    count = _kernels.terminal_node_walks(
        g.out_indptr, g.out_indices, int(s), int(t), alpha, int(k), seed, 0
    )
    fwd = time.perf_counter() - t0
    return Estimate(value=count / k, algorithm="montecarlo", walks_used=int(k),
                    frontier_pushes=0, forward_time=fwd, reverse_time=0.0)


def local_update(g, s, t, delta, alpha=0.2):
    """Pure reverse-push baseline: push at t until every residual is below
    alpha*delta/2, then read off the estimate at s (additive error < delta/2)."""
    _check_nodes(g, s, t)
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    t0 = time.perf_counter()
    nodes, est, _res, pushes = inverse_estimates(g, t, delta / 2.0, alpha)
    reverse = time.perf_counter() - t0
    i = np.searchsorted(nodes, s)
    value = float(est[i]) if i < len(nodes) and nodes[i] == s else 0.0
    return Estimate(value=value, algorithm="localupdate", walks_used=0,
                    frontier_pushes=pushes, forward_time=0.0,
                    reverse_time=reverse)


def theoretical_fast_ppr(g, s, t, delta, tp, alpha=0.2, eps_r=None, seed=0):
    """Relative-error estimator built on target-avoiding scored walks.

    The reverse push runs with accuracy factor tp.beta, which makes the
    stored values multiplicatively accurate inside the target set; walks
    from s are then rejection-sampled to stay outside the target set and
    accumulate the scores of the nodes they visit. When the true value
    exceeds delta, the mean of tp.n_f walk scores is within tp.c_rel
    relative error with probability at least 1 - tp.p_fail.
    """
    _check_nodes(g, s, t)
    if eps_r is None:
        eps_r = math.sqrt(g.avg_degree * delta)
    if abs(tp.eps_f - delta / eps_r) > 1e-9 * max(1.0, tp.eps_f):
        raise ValueError("TheoreticalParams derived for a different delta/eps_r")
    t0 = time.perf_counter()
    fr = frontier_push(g, t, eps_r, tp.beta, alpha)
    reverse = time.perf_counter() - t0
    if s in fr.target_set:
        return Estimate(value=fr.estimates[int(s)], algorithm="theoretical",
                        walks_used=0, frontier_pushes=fr.push_count,
                        forward_time=0.0, reverse_time=reverse, shortcut=True)
    in_target = np.zeros(g.n, dtype=bool)
    est_dense = np.zeros(g.n)
    for u in fr.target_set:
        in_target[u] = True
        est_dense[u] = fr.estimates[u]
    t0 = time.perf_counter()
    total, _total_sq, err = _kernels.target_avoiding_walks(
        g.out_indptr, g.out_indices, in_target, est_dense, int(s), alpha,
        tp.p_min, int(tp.l_max), int(tp.n_f), seed, 0
    )
    fwd = time.perf_counter() - t0
    if err:
        raise RuntimeError("rejection sampling exceeded the retry cap")
    return Estimate(value=total / tp.n_f, algorithm="theoretical",
                    walks_used=int(tp.n_f), frontier_pushes=fr.push_count,
                    forward_time=fwd, reverse_time=reverse)


ACCEPT = "ACCEPT"
REJECT = "REJECT"


def detect_high(e, delta):
    """Classify whether the pair's PPR exceeds delta.

    ACCEPT iff the estimate exceeds (3/4)*delta (strict). Fed an estimate
    meeting the additive bound max(delta, ppr)/4, this accepts pairs with
    ppr > delta and rejects pairs with ppr < delta/2, each with the
    estimator's success probability.
    """
    return ACCEPT if e.value > 0.75 * delta else REJECT

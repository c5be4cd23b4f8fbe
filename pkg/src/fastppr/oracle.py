"""Ground-truth computations and the precomputed frontier store.

Power iteration and truncated walk enumeration give two independent routes
to the same PPR values; the push-based inverse solver provides per-target
vectors. `dense_ppr_matrix` solves the linear system directly and is the
machine-precision reference for small graphs.
"""

from __future__ import annotations

import os
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .frontier import FrontierResult, frontier_push


@dataclass
class PprVector:
    """A dense PPR-style vector with the tolerance it was computed to."""

    node: int
    direction: str  # "forward", "inverse", or "global"
    values: np.ndarray
    tol: float


def _forward_step(g, x):
    # (x W)(v) = sum over in-neighbors u of x(u)/d_out(u)
    return np.bincount(
        g.out_indices, weights=np.repeat(x / g.out_deg, g.out_deg), minlength=g.n
    )


def power_iteration_ppr(g, s, alpha, tol=1e-8):
    """Forward PPR vector of s via the teleporting power iteration.

    Iterates x <- alpha*e_s + (1-alpha)*xW until the max-norm change drops
    below tol*alpha, which leaves every entry within tol of the fixed
    point (geometric contraction at rate 1-alpha).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    x = np.zeros(g.n)
    x[s] = 1.0
    e = np.zeros(g.n)
    e[s] = alpha
    while True:
        x_new = e + (1.0 - alpha) * _forward_step(g, x)
        change = np.abs(x_new - x).max()
        x = x_new
        if change < tol * alpha:
            return PprVector(node=int(s), direction="forward", values=x, tol=tol)


def exact_inverse_ppr(g, t, alpha, tol):
    """Inverse PPR vector of t by running the reverse push to threshold
    alpha*tol; entrywise within tol of the true vector (one-sided, from
    below). No target/frontier bookkeeping is done."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    nodes, est, _res, _tg, _fr, _p, _e = _kernels.reverse_push(
        g.in_indptr, g.in_indices, g.out_deg, g.n, int(t), alpha, 2.0, tol, False
    )
    values = np.zeros(g.n)
    values[nodes] = est
    return PprVector(node=int(t), direction="inverse", values=values, tol=tol)


def global_pagerank(g, alpha, tol=1e-10):
    """Global PageRank: power iteration with uniform teleport 1/n."""
    x = np.full(g.n, 1.0 / g.n)
    e = np.full(g.n, alpha / g.n)
    while True:
        x_new = e + (1.0 - alpha) * _forward_step(g, x)
        change = np.abs(x_new - x).max()
        x = x_new
        if change < tol * alpha:
            return PprVector(node=-1, direction="global", values=x, tol=tol)


def brute_force_walk_enum(g, s, alpha, l_cap, tol=None):
    """Exact truncated-series PPR from s: sum of alpha*(1-alpha)^i times the
    i-step walk distribution, for i = 0..l_cap.

    Independent of the power iteration (no fixed-point test); differs from
    the true vector by less than (1-alpha)^(l_cap+1) in max norm. If `tol`
    is given and the truncation cannot meet it, raises ValueError carrying
    the achievable bound.
    """
    achievable = (1.0 - alpha) ** (l_cap + 1)
    if tol is not None and achievable >= tol:
        raise ValueError(
            f"l_cap={l_cap} only reaches truncation error {achievable:.3e} >= tol {tol:.3e}"
        )
    dist = np.zeros(g.n)
    dist[s] = 1.0
    acc = np.zeros(g.n)
    w = alpha
    for _ in range(l_cap):
        acc += w * dist
        dist = _forward_step(g, dist)
        w *= 1.0 - alpha
    acc += w * dist
    return PprVector(node=int(s), direction="forward", values=acc, tol=achievable)


def dense_ppr_matrix(g, alpha):
    """All-pairs PPR by direct linear solve; P[u, v] = forward PPR u -> v.

    Column t of the result is the inverse-PPR vector of t. Only sensible
    for small graphs (dense n x n solve).
    """
    if g.n > 4000:
        raise ValueError("dense solve is for small graphs only")
    W = np.zeros((g.n, g.n))
    for u in range(g.n):
        nbrs = g.out_neighbors(u)
        W[u, nbrs] += 1.0 / g.out_deg[u]
    # pi_u = alpha e_u + (1-alpha) W pi_u  (rows of P solve the same system)
    A = np.eye(g.n) - (1.0 - alpha) * W
    return alpha * np.linalg.inv(A)


# ---------------------------------------------------------------------------
# Frontier store


_STORE_MAGIC = b"FPPRSTR1"


class FrontierStoreError(RuntimeError):
    pass


@dataclass
class _StoredFrontier:
    target: int
    eps_r: float
    target_nodes: np.ndarray
    target_vals: np.ndarray
    frontier_nodes: np.ndarray
    frontier_vals: np.ndarray


class FrontierStore:
    """Per-target frontier records for forward-walk-only queries."""

    def __init__(self, graph_hash, alpha, beta, eps_r, records):
        self.graph_hash = graph_hash
        self.alpha = alpha
        self.beta = beta
        self.eps_r = eps_r
        self.records = records  # dict: target -> _StoredFrontier

    @property
    def total_entries(self):
        return sum(
            len(r.target_nodes) + len(r.frontier_nodes) for r in self.records.values()
        )

    def get(self, t):
        rec = self.records.get(int(t))
        if rec is None:
            raise FrontierStoreError(f"no stored frontier for target {t}")
        return rec

    def save(self, path):
        with open(path, "wb") as f:
            f.write(_STORE_MAGIC)
            f.write(bytes.fromhex(self.graph_hash))
            f.write(struct.pack("<ddd", self.alpha, self.beta, self.eps_r))
            f.write(struct.pack("<q", len(self.records)))
            for t in sorted(self.records):
                rec = self.records[t]
                f.write(struct.pack("<qdqq", rec.target, rec.eps_r,
                                    len(rec.target_nodes), len(rec.frontier_nodes)))
                for nodes, vals in ((rec.target_nodes, rec.target_vals),
                                    (rec.frontier_nodes, rec.frontier_vals)):
                    f.write(np.ascontiguousarray(nodes, dtype="<i8").tobytes())
                    f.write(np.ascontiguousarray(vals, dtype="<f8").tobytes())

    @classmethod
    def load(cls, path, g=None):
        with open(path, "rb") as f:
            if f.read(8) != _STORE_MAGIC:
                raise FrontierStoreError(f"{path}: not a frontier store")
            graph_hash = f.read(32).hex()
            alpha, beta, eps_r = struct.unpack("<ddd", f.read(24))
            (count,) = struct.unpack("<q", f.read(8))
            records = {}
            for _ in range(count):
                t, rec_eps, ntgt, nfr = struct.unpack("<qdqq", f.read(32))
                tn = np.frombuffer(f.read(ntgt * 8), dtype="<i8").astype(np.int64)
                tv = np.frombuffer(f.read(ntgt * 8), dtype="<f8").astype(np.float64)
                fn = np.frombuffer(f.read(nfr * 8), dtype="<i8").astype(np.int64)
                fv = np.frombuffer(f.read(nfr * 8), dtype="<f8").astype(np.float64)
                records[t] = _StoredFrontier(t, rec_eps, tn, tv, fn, fv)
        store = cls(graph_hash, alpha, beta, eps_r, records)
        if g is not None and graph_hash != g.content_hash():
            raise FrontierStoreError("store was built for a different graph")
        return store


def _record_from_result(fr: FrontierResult):
    tn = np.array(sorted(fr.target_set), dtype=np.int64)
    fn = np.array(sorted(fr.frontier_set), dtype=np.int64)
    tv = np.array([fr.estimates[int(u)] for u in tn])
    fv = np.array([fr.estimates[int(u)] for u in fn])
    return _StoredFrontier(fr.target, fr.eps_r, tn, tv, fn, fv)


def precompute_frontiers(g, eps_r, beta, alpha, out=None, workers=None):
    """Run the reverse push for every target and persist the results.

    Asserts the aggregate storage bound: total (target + frontier) entries
    never exceed m/eps_r. Reload from disk is bit-exact.
    """
    if workers is None:
        workers = int(os.environ.get("FASTPPR_THREADS", "0")) or (os.cpu_count() or 1)
    workers = max(1, min(workers, os.cpu_count() or 1))

    def one(t):
        return _record_from_result(frontier_push(g, t, eps_r, beta, alpha))

    if workers == 1:
        records = {t: one(t) for t in range(g.n)}
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            recs = list(pool.map(one, range(g.n)))
        records = {r.target: r for r in recs}
    store = FrontierStore(g.content_hash(), alpha, beta, eps_r, records)
    bound = g.m / eps_r
    if store.total_entries > bound:
        raise AssertionError(
            f"storage bound violated: {store.total_entries} entries > m/eps_r = {bound:.1f}"
        )
    if out is not None:
        store.save(out)
    return store


def query_with_store(store, g, s, t, p):
    """Answer a pair query from a precomputed frontier: random walks only.

    Produces the exact same estimate as `fast_ppr` with the same seed,
    since the stored target/frontier sets and values are identical.
    """
    from .estimators import _forward_phase, Estimate

    if store.graph_hash != g.content_hash():
        raise FrontierStoreError("store was built for a different graph")
    rec = store.get(t)
    if s in rec.target_nodes:
        value = float(rec.target_vals[np.searchsorted(rec.target_nodes, s)])
        return Estimate(value=value, algorithm="fastppr-store", walks_used=0,
                        frontier_pushes=0, forward_time=0.0, reverse_time=0.0,
                        shortcut=True)
    eps_r = store.eps_r if p.eps_r is None else p.eps_r
    if abs(eps_r - store.eps_r) > 1e-12:
        raise FrontierStoreError(
            f"store built at eps_r={store.eps_r}, query requested {eps_r}"
        )
    value, k, fwd = _forward_phase(
        g, s, rec.frontier_nodes, rec.frontier_vals, store.eps_r, p.delta,
        p.c, p.alpha, p.seed
    )
    return Estimate(value=value, algorithm="fastppr-store", walks_used=k,
                    frontier_pushes=0, forward_time=fwd, reverse_time=0.0,
                    shortcut=False)

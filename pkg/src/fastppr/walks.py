"""Seeded random-walk primitives.

A walk's randomness is fully determined by a (seed, stream) pair; the
pure-Python `RngStream` here reproduces the exact draw sequence of the
numba kernels (same splitmix64 mixing), so batched kernel walks can be
replayed one at a time for verification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels

_MASK = 0xFFFFFFFFFFFFFFFF
_GOLD = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def _mix64(z):
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


class RngStream:
    """Counter-based random stream keyed by (seed, stream index).

    The same (seed, stream) always yields the identical draw sequence,
    byte-for-byte, matching the in-kernel generator.
    """

    def __init__(self, seed, stream=0):
        self.seed = int(seed) & _MASK
        self.stream = int(stream)
        self._state = _mix64((self.seed + _GOLD * ((self.stream + 1) & _MASK)) & _MASK)

    def next_u64(self):
        self._state = (self._state + _GOLD) & _MASK
        return _mix64(self._state)

    def uniform(self):
        return ((self.next_u64() >> 11) + 1) * 2.0 ** -53

    def randrange(self, k):
        return self.next_u64() % k


@dataclass
class WalkOutcome:
    """Result of a single first-hit walk."""

    hit: int | None
    steps_taken: int
    sampled_length: int


def sample_geometric(alpha, rng):
    """Draw L with P[L = i] = alpha * (1 - alpha)^i for i = 0, 1, 2, ..."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    return int(math.log(rng.uniform()) / math.log(1.0 - alpha))


def walk_first_hit(g, s, L, stop_set, rng):
    """Walk L uniform steps from s, returning the first stop-set position.

    Positions V_0 .. V_L are checked in order (V_0 = s counts), so the hit
    is the walk's first entry into `stop_set`, or None if it never enters.
    """
    pos = int(s)
    for step in range(L + 1):
        if pos in stop_set:
            return WalkOutcome(hit=pos, steps_taken=step, sampled_length=L)
        if step == L:
            break
        lo = g.out_indptr[pos]
        deg = g.out_indptr[pos + 1] - lo
        pos = int(g.out_indices[lo + rng.randrange(int(deg))])
    return WalkOutcome(hit=None, steps_taken=L, sampled_length=L)


class RejectionCapExceeded(RuntimeError):
    """A single rejection-sampled step exceeded the retry cap."""


_REJECTION_CAP = 1_000_000


def target_avoiding_score(g, s, L, target_set, scores, p_bar, p_min, l_max, rng):
    """Score one target-avoiding walk of sampled length L.

    `scores[u]` must hold the mean (over u's out-neighbors) of the inverse
    estimates of neighbors inside the target set; `p_bar[u]` the fraction
    of u's out-neighbors outside it. Positions V_0 .. V_{min(L-1, l_max-1)}
    contribute scores[V_i] weighted by the running product of p_bar over
    earlier positions. The walk stops early (after scoring the node) at any
    u with p_bar[u] < p_min, or where it cannot leave the target set's
    shadow (p_bar[u] == 0).
    """
    if s in target_set:
        raise ValueError("walk start must lie outside the target set")
    if L == 0:
        return 0.0
    last = min(L - 1, l_max - 1)
    pos = int(s)
    prefix = 1.0
    score = 0.0
    step = 0
    while True:
        score += prefix * scores.get(pos, 0.0)
        if step == last:
            break
        pb = p_bar.get(pos, 1.0)
        if pb < p_min or pb == 0.0:
            break
        prefix *= pb
        lo = g.out_indptr[pos]
        deg = int(g.out_indptr[pos + 1] - lo)
        for attempt in range(_REJECTION_CAP):
            cand = int(g.out_indices[lo + rng.randrange(deg)])
            if cand not in target_set:
                pos = cand
                break
        else:
            raise RejectionCapExceeded(f"no non-target neighbor found at node {pos}")
        step += 1
    return score


def calibrate_walk_time(g, alpha, seed=0x77A1C5):
    """Mean wall-clock seconds per geometric walk on this graph.

    Timed over 1000 walks from uniform-random starts; memoized per
    (graph, alpha). The first call warms the kernel before timing.
    """
    key = ("t_walk", float(alpha))
    cached = g._calibration.get(key)
    if cached is not None:
        return cached
    import time

    rng = np.random.default_rng([seed, g.n])
    starts = rng.integers(0, g.n, size=1000).astype(np.int64)
    _kernels.walk_steps_batch(g.out_indptr, g.out_indices, starts[:8], alpha, seed, 0)
    t0 = time.perf_counter()
    _kernels.walk_steps_batch(g.out_indptr, g.out_indices, starts, alpha, seed, 0)
    per_walk = (time.perf_counter() - t0) / len(starts)
    g._calibration[key] = per_walk
    return per_walk

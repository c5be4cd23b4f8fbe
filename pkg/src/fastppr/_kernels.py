"""Numba kernels shared by the walk, frontier, and estimator modules.

All randomness comes from splitmix64 streams keyed by (seed, stream index),
so batches of walks are reproducible regardless of scheduling. Kernels are
nogil so callers may dispatch them across threads.
"""

import numpy as np
from numba import njit

U64 = np.uint64
_GOLD = U64(0x9E3779B97F4A7C15)
_MIX1 = U64(0xBF58476D1CE4E5B9)
_MIX2 = U64(0x94D049BB133111EB)


@njit(cache=True, nogil=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> U64(30))) * _MIX1
    z = (z ^ (z >> U64(27))) * _MIX2
    return z ^ (z >> U64(31))


@njit(cache=True, nogil=True, inline="always")
def _stream_init(seed, stream):
    return _mix64(U64(seed) + _GOLD * (U64(stream) + U64(1)))


@njit(cache=True, nogil=True, inline="always")
def _next_u64(state):
    state = state + _GOLD
    return state, _mix64(state)


@njit(cache=True, nogil=True, inline="always")
def _next_uniform(state):
    state, z = _next_u64(state)
    # (0, 1]: never zero, so log() below is finite
    return state, (np.float64(z >> U64(11)) + 1.0) * (2.0 ** -53)


@njit(cache=True, nogil=True, inline="always")
def _next_geometric(state, log1m_alpha):
    state, u = _next_uniform(state)
    return state, np.int64(np.log(u) / log1m_alpha)


@njit(cache=True, nogil=True)
def geometric_batch(alpha, seed, stream_base, count):
    """Sample `count` geometric lengths, one per stream."""
    out = np.empty(count, dtype=np.int64)
    log1m = np.log(1.0 - alpha)
    for i in range(count):
        st = _stream_init(seed, stream_base + i)
        st, L = _next_geometric(st, log1m)
        out[i] = L
    return out


@njit(cache=True, nogil=True)
def first_hit_walks(out_indptr, out_indices, s, alpha, k, seed, stream_base,
                    stop_mask, stop_vals):
    """Run k geometric-length walks from s, scoring the first stop-set hit.

    Walk i uses stream (seed, stream_base + i): one draw for the length,
    then one per step. Position 0 counts, so s itself can be the hit.
    Returns (sum of stop_vals at hits, number of hitting walks, steps taken).
    """
    total = 0.0
    hits = 0
    steps = 0
    log1m = np.log(1.0 - alpha)
    for i in range(k):
        st = _stream_init(seed, stream_base + i)
        st, L = _next_geometric(st, log1m)
        pos = s
        for step in range(L + 1):
            if stop_mask[pos]:
                total += stop_vals[pos]
                hits += 1
                break
            if step == L:
                break
            st, z = _next_u64(st)
            lo = out_indptr[pos]
            deg = out_indptr[pos + 1] - lo
            pos = out_indices[lo + np.int64(z % U64(deg))]
            steps += 1
    return total, hits, steps


@njit(cache=True, nogil=True)
def terminal_node_walks(out_indptr, out_indices, s, t, alpha, k, seed, stream_base):
    """Monte-Carlo estimator walks: count walks whose final node is t."""
    count = 0
    log1m = np.log(1.0 - alpha)
    for i in range(k):
        st = _stream_init(seed, stream_base + i)
        st, L = _next_geometric(st, log1m)
        pos = s
        for _ in range(L):
            st, z = _next_u64(st)
            lo = out_indptr[pos]
            deg = out_indptr[pos + 1] - lo
            pos = out_indices[lo + np.int64(z % U64(deg))]
        if pos == t:
            count += 1
    return count


@njit(cache=True, nogil=True)
def walk_steps_batch(out_indptr, out_indices, starts, alpha, seed, stream_base):
    """Plain geometric walks used for walk-time calibration."""
    total_steps = 0
    log1m = np.log(1.0 - alpha)
    for i in range(len(starts)):
        st = _stream_init(seed, stream_base + i)
        st, L = _next_geometric(st, log1m)
        pos = starts[i]
        for _ in range(L):
            st, z = _next_u64(st)
            lo = out_indptr[pos]
            deg = out_indptr[pos + 1] - lo
            pos = out_indices[lo + np.int64(z % U64(deg))]
        total_steps += L
    return total_steps


@njit(cache=True, nogil=True)
def reverse_push(in_indptr, in_indices, out_deg, n, t, alpha, eps_r, eps_inv,
                 enroll):
    """Reverse local push at target t, FIFO order, threshold alpha*eps_inv.

    Estimates and residuals both start at alpha on t. A push captures the
    node's residual before distributing, so self-loop mass re-enters the
    residual (and the queue) instead of being dropped. With `enroll` set,
    nodes whose estimate exceeds eps_r join the target set and their
    in-neighbors the frontier; t's in-neighbors are enrolled at init so the
    in-neighbor closure holds even when t's estimate is never touched.

    Returns (touched nodes, estimates, residuals, target nodes,
    frontier nodes, push count, edge touches).
    """
    est = np.zeros(n, dtype=np.float64)
    res = np.zeros(n, dtype=np.float64)
    touched_mask = np.zeros(n, dtype=np.bool_)
    in_target = np.zeros(n, dtype=np.bool_)
    in_frontier = np.zeros(n, dtype=np.bool_)
    in_queue = np.zeros(n, dtype=np.bool_)
    touched = np.empty(n, dtype=np.int64)
    ntouched = 0
    queue = np.empty(n + 1, dtype=np.int64)
    qcap = n + 1

    threshold = alpha * eps_inv
    est[t] = alpha
    res[t] = alpha
    touched_mask[t] = True
    touched[ntouched] = t
    ntouched += 1
    in_target[t] = True
    if enroll:
        for j in range(in_indptr[t], in_indptr[t + 1]):
            in_frontier[in_indices[j]] = True

    head = 0
    tail = 0
    queue[tail] = t
    tail = (tail + 1) % qcap
    in_queue[t] = True
    pushes = 0
    touches = 0

    while head != tail:
        w = queue[head]
        head = (head + 1) % qcap
        in_queue[w] = False
        rw = res[w]
        if rw <= threshold:
            continue
        res[w] = 0.0
        pushes += 1
        base = (1.0 - alpha) * rw
        for idx in range(in_indptr[w], in_indptr[w + 1]):
            u = in_indices[idx]
            delta = base / out_deg[u]
            est[u] += delta
            res[u] += delta
            touches += 1
            if not touched_mask[u]:
                touched_mask[u] = True
                touched[ntouched] = u
                ntouched += 1
            if enroll and est[u] > eps_r and not in_target[u]:
                in_target[u] = True
                for j in range(in_indptr[u], in_indptr[u + 1]):
                    in_frontier[in_indices[j]] = True
            if res[u] > threshold and not in_queue[u]:
                queue[tail] = u
                tail = (tail + 1) % qcap
                in_queue[u] = True

    tnodes = touched[:ntouched]
    order = np.argsort(tnodes)
    tnodes = tnodes[order].copy()
    est_vals = est[tnodes]
    res_vals = res[tnodes]
    ntgt = 0
    nfr = 0
    for i in range(ntouched):
        u = tnodes[i]
        if in_target[u]:
            ntgt += 1
    target_nodes = np.empty(ntgt, dtype=np.int64)
    ntgt = 0
    for i in range(ntouched):
        u = tnodes[i]
        if in_target[u]:
            target_nodes[ntgt] = u
            ntgt += 1
    if enroll:
        for u in range(n):
            if in_frontier[u] and not in_target[u]:
                nfr += 1
        frontier_nodes = np.empty(nfr, dtype=np.int64)
        nfr = 0
        for u in range(n):
            if in_frontier[u] and not in_target[u]:
                frontier_nodes[nfr] = u
                nfr += 1
    else:
        frontier_nodes = np.empty(0, dtype=np.int64)
    return tnodes, est_vals, res_vals, target_nodes, frontier_nodes, pushes, touches


@njit(cache=True, nogil=True)
def _heap_push(hnodes, hvals, hsize, node, val):
    if hsize == len(hnodes):
        cap = 2 * len(hnodes)
        hn2 = np.empty(cap, dtype=np.int64)
        hv2 = np.empty(cap, dtype=np.float64)
        hn2[:hsize] = hnodes
        hv2[:hsize] = hvals
        hnodes, hvals = hn2, hv2
    i = hsize
    hnodes[i] = node
    hvals[i] = val
    while i > 0:
        parent = (i - 1) // 2
        if hvals[parent] >= hvals[i]:
            break
        hvals[parent], hvals[i] = hvals[i], hvals[parent]
        hnodes[parent], hnodes[i] = hnodes[i], hnodes[parent]
        i = parent
    return hnodes, hvals, hsize + 1


@njit(cache=True, nogil=True)
def _heap_pop(hnodes, hvals, hsize):
    node = hnodes[0]
    val = hvals[0]
    hsize -= 1
    hnodes[0] = hnodes[hsize]
    hvals[0] = hvals[hsize]
    i = 0
    while True:
        l = 2 * i + 1
        r = l + 1
        big = i
        if l < hsize and hvals[l] > hvals[big]:
            big = l
        if r < hsize and hvals[r] > hvals[big]:
            big = r
        if big == i:
            break
        hvals[big], hvals[i] = hvals[i], hvals[big]
        hnodes[big], hnodes[i] = hnodes[i], hnodes[big]
        i = big
    return node, val, hsize


@njit(cache=True, nogil=True)
def balanced_reverse_push(in_indptr, in_indices, out_deg, n, t, alpha, beta,
                          c, delta, walk_cost_ratio, push_overhead, max_units):
    """Max-residual-first reverse push that stops at the forward/reverse
    time balance point.

    Reverse work is counted in edge-units: (in-degree + push_overhead) per
    push. Before every push, units spent are compared against the
    predicted forward cost in the same units,
    walk_cost_ratio * c * eps_r / delta, where walk_cost_ratio is
    (seconds per walk)/(seconds per edge-unit) and eps_r tracks
    (max residual)/(alpha*beta). `max_units` caps the run regardless (used
    for calibration). The heap holds one entry per residual increase;
    stale entries (value != current residual) are skipped.

    Returns (touched, est, res, pushes, touches, eps_r, elapsed_units).
    """
    est = np.zeros(n, dtype=np.float64)
    res = np.zeros(n, dtype=np.float64)
    touched_mask = np.zeros(n, dtype=np.bool_)
    touched = np.empty(n, dtype=np.int64)
    ntouched = 0

    hnodes = np.empty(1024, dtype=np.int64)
    hvals = np.empty(1024, dtype=np.float64)
    hsize = 0

    est[t] = alpha
    res[t] = alpha
    touched_mask[t] = True
    touched[ntouched] = t
    ntouched += 1
    hnodes, hvals, hsize = _heap_push(hnodes, hvals, hsize, t, alpha)

    eps_r = 1.0 / beta
    elapsed = 0.0
    pushes = 0
    touches = 0

    while True:
        if elapsed >= walk_cost_ratio * c * eps_r / delta:
            break
        if elapsed >= max_units:
            break
        # drop stale heap tops so the max reflects current residuals
        while hsize > 0 and hvals[0] != res[hnodes[0]]:
            _, _, hsize = _heap_pop(hnodes, hvals, hsize)
        if hsize == 0:
            eps_r = 0.0
            break
        w, rw, hsize = _heap_pop(hnodes, hvals, hsize)
        res[w] = 0.0
        pushes += 1
        base = (1.0 - alpha) * rw
        din = in_indptr[w + 1] - in_indptr[w]
        for idx in range(in_indptr[w], in_indptr[w + 1]):
            u = in_indices[idx]
            delta_u = base / out_deg[u]
            est[u] += delta_u
            res[u] += delta_u
            if not touched_mask[u]:
                touched_mask[u] = True
                touched[ntouched] = u
                ntouched += 1
            hnodes, hvals, hsize = _heap_push(hnodes, hvals, hsize, u, res[u])
        touches += din
        elapsed += din + push_overhead
        while hsize > 0 and hvals[0] != res[hnodes[0]]:
            _, _, hsize = _heap_pop(hnodes, hvals, hsize)
        maxres = hvals[0] if hsize > 0 else 0.0
        eps_r = maxres / (alpha * beta)
        if hsize == 0:
            break

    tnodes = touched[:ntouched]
    order = np.argsort(tnodes)
    tnodes = tnodes[order].copy()
    return tnodes, est[tnodes], res[tnodes], pushes, touches, eps_r, elapsed


@njit(cache=True, nogil=True)
def enrollment_scan(in_indptr, in_indices, tnodes, est_vals, t, eps_r, n):
    """Recompute target/frontier membership for a final eps_r value."""
    in_target = np.zeros(n, dtype=np.bool_)
    in_frontier = np.zeros(n, dtype=np.bool_)
    in_target[t] = True
    for i in range(len(tnodes)):
        if est_vals[i] > eps_r:
            in_target[tnodes[i]] = True
    ntgt = 0
    for i in range(len(tnodes)):
        u = tnodes[i]
        if in_target[u]:
            ntgt += 1
            for j in range(in_indptr[u], in_indptr[u + 1]):
                in_frontier[in_indices[j]] = True
    target_nodes = np.empty(ntgt, dtype=np.int64)
    k = 0
    for i in range(len(tnodes)):
        u = tnodes[i]
        if in_target[u]:
            target_nodes[k] = u
            k += 1
    nfr = 0
    for u in range(n):
        if in_frontier[u] and not in_target[u]:
            nfr += 1
    frontier_nodes = np.empty(nfr, dtype=np.int64)
    k = 0
    for u in range(n):
        if in_frontier[u] and not in_target[u]:
            frontier_nodes[k] = u
            k += 1
    return target_nodes, frontier_nodes


_REJECTION_CAP = 1_000_000


@njit(cache=True, nogil=True)
def target_avoiding_walks(out_indptr, out_indices, in_target, est_dense, s,
                          alpha, p_min, l_max, n_walks, seed, stream_base):
    """Scored target-avoiding walks; returns (sum, sum of squares, error).

    Each walk scores positions V_0 .. V_{min(L-1, l_max-1)}: the term at
    position i is (prod of target-avoiding step probabilities before i)
    times the mean frontier estimate over the position's out-neighbors
    inside the target set. A walk stops early at any node whose fraction of
    out-neighbors outside the target set falls below p_min (that node's
    term is still counted) or equals zero. Steps are drawn by rejection
    until they land outside the target set; error=1 flags a rejection-cap
    blowup (only possible when p_min == 0).
    """
    n = len(out_indptr) - 1
    p_bar = np.full(n, -1.0)
    score_at = np.zeros(n, dtype=np.float64)
    total = 0.0
    total_sq = 0.0
    log1m = np.log(1.0 - alpha)
    for i in range(n_walks):
        st = _stream_init(seed, stream_base + i)
        st, L = _next_geometric(st, log1m)
        if L == 0:
            continue
        last = min(L - 1, l_max - 1)
        pos = s
        prefix = 1.0
        score = 0.0
        step = 0
        while True:
            if p_bar[pos] < 0.0:
                lo = out_indptr[pos]
                hi = out_indptr[pos + 1]
                outside = 0
                ssum = 0.0
                for j in range(lo, hi):
                    v = out_indices[j]
                    if in_target[v]:
                        ssum += est_dense[v]
                    else:
                        outside += 1
                deg = hi - lo
                p_bar[pos] = outside / deg
                score_at[pos] = ssum / deg
            score += prefix * score_at[pos]
            if step == last:
                break
            if p_bar[pos] < p_min or p_bar[pos] == 0.0:
                break
            prefix *= p_bar[pos]
            lo = out_indptr[pos]
            deg = out_indptr[pos + 1] - lo
            nxt = -1
            for _ in range(_REJECTION_CAP):
                st, z = _next_u64(st)
                cand = out_indices[lo + np.int64(z % U64(deg))]
                if not in_target[cand]:
                    nxt = cand
                    break
            if nxt < 0:
                return total, total_sq, 1
            pos = nxt
            step += 1
        total += score
        total_sq += score * score
    return total, total_sq, 0

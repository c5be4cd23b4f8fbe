"""Immutable directed graphs in CSR form, with forward and reverse adjacency.

Node ids from edge-list input are remapped to 0..n-1 in first-seen order;
the original ids are kept in a sidecar array so callers can translate back.
Every node is guaranteed out-degree >= 1: nodes with no outgoing edge get a
self-loop at load time, so random walks and push iterations never strand.
"""

from __future__ import annotations

import hashlib
import io
import os
import struct

import numpy as np


class GraphFormatError(ValueError):
    """Raised for malformed edge-list input."""


class Graph:
    """Directed graph with O(1) access to out/in neighborhoods and degrees.

    Immutable after construction; safe to share across threads. Use
    :func:`load_edge_list` or :func:`from_edges` to build one.
    """

    def __init__(self, n, out_indptr, out_indices, in_indptr, in_indices, orig_ids):
        self.n = int(n)
        self.m = int(len(out_indices))
        self.out_indptr = out_indptr
        self.out_indices = out_indices
        self.in_indptr = in_indptr
        self.in_indices = in_indices
        self.out_deg = np.diff(out_indptr)
        self.in_deg = np.diff(in_indptr)
        self.orig_ids = orig_ids
        self._id_map = None
        self._hash = None
        self._calibration = {}  # per-alpha timing constants, memoized lazily

    @property
    def avg_degree(self):
        return self.m / self.n

    def out_neighbors(self, u):
        return self.out_indices[self.out_indptr[u]:self.out_indptr[u + 1]]

    def in_neighbors(self, u):
        return self.in_indices[self.in_indptr[u]:self.in_indptr[u + 1]]

    def internal_id(self, orig):
        """Translate an original node id to the internal 0..n-1 id."""
        if self._id_map is None:
            self._id_map = {int(o): i for i, o in enumerate(self.orig_ids)}
        try:
            return self._id_map[int(orig)]
        except KeyError:
            raise KeyError(f"node id {orig} not present in graph") from None

    def content_hash(self):
        """Hex digest identifying the adjacency structure (not original ids)."""
        if self._hash is None:
            h = hashlib.sha256()
            h.update(struct.pack("<qq", self.n, self.m))
            h.update(np.ascontiguousarray(self.out_indptr).tobytes())
            h.update(np.ascontiguousarray(self.out_indices).tobytes())
            self._hash = h.hexdigest()
        return self._hash

    def validate(self):
        """Check structural invariants; raises AssertionError on violation."""
        assert self.out_indptr[0] == 0 and self.in_indptr[0] == 0
        assert self.out_indptr[-1] == self.m and self.in_indptr[-1] == self.m
        assert np.all(np.diff(self.out_indptr) >= 0)
        assert np.all(np.diff(self.in_indptr) >= 0)
        assert int(self.out_deg.sum()) == self.m == int(self.in_deg.sum())
        assert np.all(self.out_deg >= 1), "dangling-node closure violated"
        out_pairs = np.stack(
            [np.repeat(np.arange(self.n), self.out_deg), self.out_indices]
        )
        in_pairs = np.stack(
            [self.in_indices, np.repeat(np.arange(self.n), self.in_deg)]
        )
        key_out = np.sort(out_pairs[0] * self.n + out_pairs[1])
        key_in = np.sort(in_pairs[0] * self.n + in_pairs[1])
        assert np.array_equal(key_out, key_in), "out/in adjacency mismatch"

    def structure_equal(self, other):
        return (
            self.n == other.n
            and self.m == other.m
            and np.array_equal(self.out_indptr, other.out_indptr)
            and np.array_equal(self.out_indices, other.out_indices)
            and np.array_equal(self.in_indptr, other.in_indptr)
            and np.array_equal(self.in_indices, other.in_indices)
        )

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def from_edges(pairs, n=None, orig_ids=None):
    """Build a Graph from an (k, 2) int array of directed edges.

    Deduplicates edges, adds self-loops at out-degree-0 nodes, and builds
    both CSR directions. Node ids must already be 0..n-1.
    """
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    if n is None:
        n = int(pairs.max()) + 1 if len(pairs) else 0
    if n <= 0:
        raise GraphFormatError("graph has no nodes")
    key = pairs[:, 0] * n + pairs[:, 1]
    key = np.unique(key)
    src = key // n
    dst = key % n
    dangling = np.setdiff1d(np.arange(n), src, assume_unique=False)
    if len(dangling):
        src = np.concatenate([src, dangling])
        dst = np.concatenate([dst, dangling])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    m = len(src)
    out_indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(out_indptr, src + 1, 1)
    np.cumsum(out_indptr, out=out_indptr)
    rorder = np.lexsort((src, dst))
    in_indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(in_indptr, dst + 1, 1)
    np.cumsum(in_indptr, out=in_indptr)
    if orig_ids is None:
        orig_ids = np.arange(n, dtype=np.int64)
    return Graph(n, out_indptr, dst.copy(), in_indptr, src[rorder].copy(), orig_ids)


def load_edge_list(source, undirected=False):
    """Parse whitespace-separated "u v" lines into a Graph.

    `source` is a file-like object or an iterable of lines. Lines starting
    with '#' are comments. Ids need not be contiguous; they are remapped to
    0..n-1 in first-seen order (u before v within a line). Duplicate edges
    are dropped. With `undirected` set, each line yields both directions.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    id_map = {}
    orig = []
    edges_u = []
    edges_v = []

    def intern(x):
        i = id_map.get(x)
        if i is None:
            i = len(orig)
            id_map[x] = i
            orig.append(x)
        return i

    for lineno, line in enumerate(source, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected 'u v', got {line!r}")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer node id in {line!r}")
        u, v = intern(a), intern(b)
        edges_u.append(u)
        edges_v.append(v)
        if undirected:
            edges_u.append(v)
            edges_v.append(u)
    if not edges_u:
        raise GraphFormatError("empty edge list")
    pairs = np.stack([np.array(edges_u, dtype=np.int64), np.array(edges_v, dtype=np.int64)], axis=1)
    return from_edges(pairs, n=len(orig), orig_ids=np.array(orig, dtype=np.int64))


def degrees(g):
    """Return (out-degree vector, in-degree vector, average degree m/n)."""
    return g.out_deg.copy(), g.in_deg.copy(), g.m / g.n


def to_edge_list_text(g):
    """Serialize to canonical edge-list text over internal ids.

    Edges are ordered so that reloading the text reproduces the exact same
    internal numbering (first-seen order of the emitted token stream is
    0,1,2,...). An introduction pass emits one witness edge per node in id
    order, then the remaining edges follow sorted by (u, v).
    """
    emitted = set()
    introduced = np.zeros(g.n, dtype=bool)
    lines = []

    def emit(u, v):
        if (u, v) not in emitted:
            emitted.add((u, v))
            introduced[u] = True
            introduced[v] = True
            lines.append(f"{u} {v}")

    for k in range(g.n):
        if introduced[k]:
            continue
        nbrs = [(int(v), 0) for v in g.out_neighbors(k)] + [
            (int(v), 1) for v in g.in_neighbors(k)
        ]
        below = [(v, d) for v, d in nbrs if v < k]
        if below:
            v, d = min(below)
            emit(k, v) if d == 0 else emit(v, k)
        elif k in g.out_neighbors(k):
            emit(k, k)
        elif k + 1 in g.out_neighbors(k):
            emit(k, k + 1)
        else:
            # Cannot happen for graphs produced by first-seen loading; fall
            # back to the smallest incident edge.
            v, d = min(nbrs)
            emit(k, v) if d == 0 else emit(v, k)
    for u in range(g.n):
        for v in g.out_neighbors(u):
            emit(u, int(v))
    return "\n".join(lines) + "\n"


_CACHE_MAGIC = b"FPPRCSR1"


def write_binary_cache(g, path, source_hash=b""):
    """Write the CSR arrays in a little-endian binary cache file."""
    with open(path, "wb") as f:
        f.write(_CACHE_MAGIC)
        f.write(struct.pack("<32s", source_hash.ljust(32, b"\0")[:32]))
        f.write(struct.pack("<qq", g.n, g.m))
        for arr in (g.out_indptr, g.out_indices, g.in_indptr, g.in_indices, g.orig_ids):
            data = np.ascontiguousarray(arr, dtype="<i8")
            f.write(struct.pack("<q", len(data)))
            f.write(data.tobytes())


def read_binary_cache(path, expect_hash=None):
    """Reload a Graph from a binary cache; bit-exact arrays."""
    with open(path, "rb") as f:
        if f.read(8) != _CACHE_MAGIC:
            raise GraphFormatError(f"{path}: not a graph cache file")
        stored = struct.unpack("<32s", f.read(32))[0]
        if expect_hash is not None and stored.rstrip(b"\0") != expect_hash.rstrip(b"\0"):
            raise GraphFormatError(f"{path}: cache does not match source file")
        n, m = struct.unpack("<qq", f.read(16))
        arrays = []
        for _ in range(5):
            (length,) = struct.unpack("<q", f.read(8))
            arrays.append(np.frombuffer(f.read(length * 8), dtype="<i8").astype(np.int64))
    out_indptr, out_indices, in_indptr, in_indices, orig_ids = arrays
    return Graph(n, out_indptr, out_indices, in_indptr, in_indices, orig_ids)


def _file_sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.digest()


def load_edge_list_path(path, undirected=False, use_cache=False):
    """Load an edge-list file, optionally via a sidecar binary cache.

    The cache lives at `<path>.csrcache` and is keyed by the sha256 of the
    text file; a stale cache is rebuilt transparently.
    """
    if not use_cache:
        with open(path) as f:
            return load_edge_list(f, undirected=undirected)
    digest = _file_sha256(path) + (b"U" if undirected else b"D")
    digest = hashlib.sha256(digest).digest()
    cache_path = path + ".csrcache"
    if os.path.exists(cache_path):
        try:
            return read_binary_cache(cache_path, expect_hash=digest)
        except GraphFormatError:
            pass
    with open(path) as f:
        g = load_edge_list(f, undirected=undirected)
    write_binary_cache(g, cache_path, source_hash=digest)
    return g

"""Exact k-nearest-neighbour search over a Dataset via a k-d tree.

The tree uses median splits on the widest-spread coordinate and breaks
distance ties by ascending point index, so queries are fully deterministic.
``brute_nearest`` is an independent linear-scan oracle with the identical
contract, kept for cross-checking the tree.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .datamodel import Dataset, _as_vector

_LEAF_SIZE = 16
_NO_EXCLUDE = np.empty(0, dtype=np.int64)


@dataclass(frozen=True)
class NeighborHit:
    index: int
    distance: float


@dataclass(frozen=True)
class NeighborIndex:
    """Frozen k-d tree over the points of one Dataset; safe for concurrent queries."""

    points: np.ndarray
    split_dim: np.ndarray
    split_val: np.ndarray
    left: np.ndarray
    right: np.ndarray
    leaf_start: np.ndarray
    leaf_end: np.ndarray
    perm: np.ndarray

    @property
    def source_size(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def query_batch(
        self,
        queries: np.ndarray,
        count: int,
        exclude_shared: np.ndarray | None = None,
        exclude_one: np.ndarray | None = None,
    ) -> tuple[np.ndarray, np.ndarray]:
        """k-NN indices and distances for many queries at once.

        ``exclude_shared`` removes a fixed index set from every query's
        candidates; ``exclude_one`` removes one (per-query) index, -1 for none.
        Returns (indices, distances), each of shape (n_queries, count), sorted
        by ascending (distance, index).
        """
        queries = np.ascontiguousarray(queries, dtype=np.float64)
        nq = queries.shape[0]
        if queries.ndim != 2 or queries.shape[1] != self.dim:
            raise ValueError(f"query dimension mismatch: query has dim {queries.shape[1]}, index has dim {self.dim}")
        excl = _NO_EXCLUDE if exclude_shared is None else np.asarray(exclude_shared, dtype=np.int64)
        excl_one = np.full(nq, -1, dtype=np.int64) if exclude_one is None else np.asarray(exclude_one, dtype=np.int64)
        if count == 0:
            return np.empty((nq, 0), dtype=np.int64), np.empty((nq, 0), dtype=np.float64)
        out_idx = np.empty((nq, count), dtype=np.int64)
        _query_kernel(
            self.points, self.split_dim, self.split_val, self.left, self.right,
            self.leaf_start, self.leaf_end, self.perm,
            queries, count, excl, excl_one, out_idx,
        )
        # report distances through the same arithmetic the brute oracle uses
        diffs = self.points[out_idx] - queries[:, None, :]
        return out_idx, np.sqrt((diffs * diffs).sum(axis=2))


def build_index(data: Dataset) -> NeighborIndex:
    """Build a k-d tree over all points of ``data``; deterministic given input order."""
    points = data.points
    n = points.shape[0]
    if n < 1:
        raise ValueError("cannot build an index over an empty dataset")
    perm = np.arange(n, dtype=np.int64)
    split_dim: list[int] = []
    split_val: list[float] = []
    left: list[int] = []
    right: list[int] = []
    leaf_start: list[int] = []
    leaf_end: list[int] = []

    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 10_000))
    try:
        def build(lo: int, hi: int) -> int:
            node = len(split_dim)
            split_dim.append(-1)
            split_val.append(0.0)
            left.append(-1)
            right.append(-1)
            leaf_start.append(lo)
            leaf_end.append(hi)
            if hi - lo <= _LEAF_SIZE:
                return node
            sub = points[perm[lo:hi]]
            dim = int(np.argmax(sub.max(axis=0) - sub.min(axis=0)))
            order = np.argsort(sub[:, dim], kind="stable")
            perm[lo:hi] = perm[lo:hi][order]
            mid = (hi - lo) // 2
            split_dim[node] = dim
            split_val[node] = points[perm[lo + mid], dim]
            left[node] = build(lo, lo + mid)
            right[node] = build(lo + mid, hi)
            return node

        build(0, n)
    finally:
        sys.setrecursionlimit(old_limit)

    return NeighborIndex(
        points=points,
        split_dim=np.asarray(split_dim, dtype=np.int64),
        split_val=np.asarray(split_val, dtype=np.float64),
        left=np.asarray(left, dtype=np.int64),
        right=np.asarray(right, dtype=np.int64),
        leaf_start=np.asarray(leaf_start, dtype=np.int64),
        leaf_end=np.asarray(leaf_end, dtype=np.int64),
        perm=perm,
    )


@njit(cache=True)
def _query_kernel(points, split_dim, split_val, left, right, leaf_start, leaf_end,
                  perm, queries, k, excl_shared, excl_one, out_idx):
    nq = queries.shape[0]
    d = points.shape[1]
    best_sqd = np.empty(k, np.float64)
    best_idx = np.empty(k, np.int64)
    stack_node = np.empty(4096, np.int64)
    stack_pd = np.empty(4096, np.float64)
    for qi in range(nq):
        filled = 0
        sp = 1
        stack_node[0] = 0
        stack_pd[0] = 0.0
        ex1 = excl_one[qi]
        while sp > 0:
            sp -= 1
            node = stack_node[sp]
            if filled == k and stack_pd[sp] > best_sqd[k - 1]:
                continue
            while split_dim[node] >= 0:
                dim = split_dim[node]
                delta = queries[qi, dim] - split_val[node]
                if delta <= 0.0:
                    near = left[node]
                    far = right[node]
                else:
                    near = right[node]
                    far = left[node]
                fd = delta * delta
                if filled < k or fd <= best_sqd[k - 1]:
                    stack_node[sp] = far
                    stack_pd[sp] = fd
                    sp += 1
                node = near
            for t in range(leaf_start[node], leaf_end[node]):
                idx = perm[t]
                if idx == ex1:
                    continue
                skip = False
                for e in range(excl_shared.shape[0]):
                    if excl_shared[e] == idx:
                        skip = True
                        break
                if skip:
                    continue
                sq = 0.0
                for dd in range(d):
                    diff = points[idx, dd] - queries[qi, dd]
                    sq += diff * diff
                if filled < k:
                    pos = filled
                    filled += 1
                elif sq < best_sqd[k - 1] or (sq == best_sqd[k - 1] and idx < best_idx[k - 1]):
                    pos = k - 1
                else:
                    continue
                while pos > 0 and (best_sqd[pos - 1] > sq or (best_sqd[pos - 1] == sq and best_idx[pos - 1] > idx)):
                    best_sqd[pos] = best_sqd[pos - 1]
                    best_idx[pos] = best_idx[pos - 1]
                    pos -= 1
                best_sqd[pos] = sq
                best_idx[pos] = idx
        for j in range(k):
            out_idx[qi, j] = best_idx[j]


def _check_query(source_size: int, dim: int, query, count: int, exclude) -> tuple[np.ndarray, frozenset]:
    q = _as_vector(query, "query")
    if q.shape[0] != dim:
        raise ValueError(f"query dimension mismatch: query has dim {q.shape[0]}, index has dim {dim}")
    excl = frozenset(int(i) for i in exclude) if exclude else frozenset()
    if count < 0:
        raise ValueError(f"count must be non-negative, got {count}")
    if count > source_size - len(excl):
        raise ValueError(f"count {count} exceeds the {source_size - len(excl)} available points")
    return q, excl


def nearest(index: NeighborIndex, query, count: int, exclude=None) -> list[NeighborHit]:
    """The ``count`` nearest points to ``query``, ties broken by ascending index.

    ``exclude`` indices are never returned. Results are sorted by ascending
    (distance, index).
    """
    q, excl = _check_query(index.source_size, index.dim, query, count, exclude)
    if count == 0:
        return []
    excl_arr = np.fromiter(sorted(excl), dtype=np.int64, count=len(excl)) if excl else None
    idx, dist = index.query_batch(q[None, :], count, exclude_shared=excl_arr)
    return [NeighborHit(int(i), float(t)) for i, t in zip(idx[0], dist[0])]


def brute_nearest(data: Dataset, query, count: int, exclude=None) -> list[NeighborHit]:
    """Linear-scan oracle with the same contract as ``nearest``."""
    q, excl = _check_query(len(data), data.dim, query, count, exclude)
    if count == 0:
        return []
    diffs = data.points - q
    sq = (diffs * diffs).sum(axis=1)
    order = np.lexsort((np.arange(len(data)), sq))
    hits = []
    for i in order:
        if int(i) in excl:
            continue
        hits.append(NeighborHit(int(i), float(np.sqrt(sq[i]))))
        if len(hits) == count:
            break
    return hits

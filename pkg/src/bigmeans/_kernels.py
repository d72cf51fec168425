"""Numba kernels shared by every algorithm.

All parallel loops write to disjoint output slots; no kernel relies on a
parallel reduction. Sums over points are accumulated in fixed-size blocks
that are merged in block order, so results do not depend on the number of
worker threads.
"""

import numpy as np
from numba import njit, prange

# Points per reduction block. Must not depend on the thread count.
BLOCK = 4096


@njit(parallel=True, cache=True)
def assign(X, C, active):
    m, n = X.shape
    labels = np.empty(m, dtype=np.int64)
    dists = np.empty(m, dtype=np.float64)
    for i in prange(m):
        best = np.inf
        best_j = -1
        for t in range(active.shape[0]):
            j = active[t]
            d = 0.0
            for f in range(n):
                diff = X[i, f] - C[j, f]
                d += diff * diff
            # strict comparison keeps the lowest index on ties
            if d < best:
                best = d
                best_j = j
        labels[i] = best_j
        dists[i] = best
    return labels, dists


@njit(parallel=True, cache=True)
def sqdist_to_point(X, c):
    m, n = X.shape
    out = np.empty(m, dtype=np.float64)
    for i in prange(m):
        d = 0.0
        for f in range(n):
            diff = X[i, f] - c[f]
            d += diff * diff
        out[i] = d
    return out


@njit(parallel=True, cache=True)
def min_update(X, c, current):
    m, n = X.shape
    out = np.empty(m, dtype=np.float64)
    for i in prange(m):
        d = 0.0
        for f in range(n):
            diff = X[i, f] - c[f]
            d += diff * diff
        out[i] = d if d < current[i] else current[i]
    return out


@njit(parallel=True, cache=True)
def _partial_sums(X, labels, k, block):
    m, n = X.shape
    n_blocks = (m + block - 1) // block
    sums = np.zeros((n_blocks, k, n), dtype=np.float64)
    counts = np.zeros((n_blocks, k), dtype=np.int64)
    for b in prange(n_blocks):
        lo = b * block
        hi = min(m, lo + block)
        for i in range(lo, hi):
            j = labels[i]
            counts[b, j] += 1
            for f in range(n):
                sums[b, j, f] += X[i, f]
    return sums, counts


@njit(cache=True)
def cluster_sums(X, labels, k):
    sums, counts = _partial_sums(X, labels, k, BLOCK)
    n_blocks = sums.shape[0]
    n = X.shape[1]
    total = np.zeros((k, n), dtype=np.float64)
    total_counts = np.zeros(k, dtype=np.int64)
    for b in range(n_blocks):
        for j in range(k):
            total_counts[j] += counts[b, j]
            for f in range(n):
                total[j, f] += sums[b, j, f]
    return total, total_counts


@njit(parallel=True, cache=True)
def _block_totals(v, block):
    m = v.shape[0]
    n_blocks = (m + block - 1) // block
    out = np.zeros(n_blocks, dtype=np.float64)
    for b in prange(n_blocks):
        lo = b * block
        hi = min(m, lo + block)
        s = 0.0
        for i in range(lo, hi):
            s += v[i]
        out[b] = s
    return out


@njit(cache=True)
def ordered_sum(v):
    parts = _block_totals(v, BLOCK)
    s = 0.0
    for b in range(parts.shape[0]):
        s += parts[b]
    return s

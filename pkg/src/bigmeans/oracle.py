"""Exhaustive MSSC solutions for tiny instances, used as test oracles.

Nothing here touches the kernels in ``bigmeans.core``.
"""

from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple

import numpy as np

ENUMERATION_LIMIT = 10**6


class ExactSolution(NamedTuple):
    objective: float
    labels: np.ndarray
    # best objective over partitions with exactly min(k, m) nonempty groups
    objective_all_nonempty: float


@lru_cache(maxsize=None)
def stirling2(m: int, k: int) -> int:
    if m == k:
        return 1
    if k == 0 or k > m:
        return 0
    return k * stirling2(m - 1, k) + stirling2(m - 1, k - 1)


def partition_count(m: int, k: int) -> int:
    """Number of partitions of m labelled points into at most k nonempty groups."""
    return sum(stirling2(m, j) for j in range(1, k + 1))


def restricted_growth_strings(m: int, k: int) -> np.ndarray:
    """Every partition of range(m) into <= k groups, one canonical labelling per row."""
    rows = np.zeros((1, 1), dtype=np.int8)
    for _ in range(1, m):
        top = rows.max(axis=1)
        parts = []
        for v in range(k):
            keep = rows[top + 1 >= v]
            if keep.size:
                parts.append(np.hstack([keep, np.full((keep.shape[0], 1), v, dtype=np.int8)]))
        rows = np.vstack(parts)
    return rows


def _sse(points: np.ndarray, labels: np.ndarray) -> float:
    total = 0.0
    for j in np.unique(labels):
        members = points[labels == j]
        c = members.mean(axis=0)
        total += float(((members - c) ** 2).sum())
    return total


def exact_mssc(points, k: int) -> ExactSolution:
    """Globally optimal k-clustering by enumerating all set partitions."""
    X = np.asarray(points, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    m = X.shape[0]
    if k < 1 or m < 1:
        raise ValueError("need m >= 1 and k >= 1")
    k = min(k, m)
    if partition_count(m, k) > ENUMERATION_LIMIT:
        raise ValueError(f"m={m}, k={k} exceeds the enumeration limit of {ENUMERATION_LIMIT} partitions")

    P = restricted_growth_strings(m, k)
    # screen with the sum / sum-of-squares identity, then recompute the
    # winners directly to avoid cancellation in the reported value
    sq = float((X**2).sum())
    screened = np.full(P.shape[0], sq)
    for j in range(k):
        member = (P == j).astype(np.float64)
        cnt = member.sum(axis=1)
        s = member @ X
        with np.errstate(invalid="ignore", divide="ignore"):
            screened -= np.where(cnt > 0, (s**2).sum(axis=1) / np.where(cnt > 0, cnt, 1), 0.0)
    n_groups = P.max(axis=1) + 1

    def best_of(mask):
        idx = np.flatnonzero(mask)
        lo = screened[idx].min()
        slack = 1e-9 * max(abs(lo), sq, 1.0)
        near = idx[screened[idx] <= lo + slack]
        vals = [_sse(X, P[i]) for i in near]
        b = int(np.argmin(vals))
        return vals[b], P[near[b]].astype(np.int64)

    obj, labels = best_of(np.ones(P.shape[0], dtype=bool))
    obj_full, _ = best_of(n_groups == k)
    return ExactSolution(obj, labels, obj_full)


def exact_one_means(points) -> float:
    X = np.asarray(points, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    c = X.mean(axis=0)
    return float(((X - c) ** 2).sum())

"""Centroid seeding: Forgy, greedy K-means++ (also used to repair degenerate
rows of an existing centroid set) and K-means||."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from bigmeans import _kernels
from bigmeans.core import Centroids, EvalCounter, as_points
from bigmeans.exceptions import ConfigurationError

METHODS = ("forgy", "kmeans_pp", "kmeans_parallel")


@dataclass(frozen=True)
class InitConfig:
    method: str = "kmeans_pp"
    candidates_per_step: int = 3
    # K-means|| only; None means 2 * k
    oversampling_l: int | None = None
    # K-means|| only; an int, or "log" for ceil(ln(cost after the first center))
    rounds_r: int | str = 5
    seed: int | None = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigurationError(f"unknown init method {self.method!r}; expected one of {METHODS}")
        if self.candidates_per_step < 1:
            raise ConfigurationError("candidates_per_step must be >= 1")
        if self.oversampling_l is not None and self.oversampling_l < 1:
            raise ConfigurationError("oversampling_l must be >= 1")
        if isinstance(self.rounds_r, str):
            if self.rounds_r != "log":
                raise ConfigurationError("rounds_r must be a positive int or 'log'")
        elif self.rounds_r < 1:
            raise ConfigurationError("rounds_r must be >= 1")


def _rng(seed):
    return np.random.default_rng(seed)


def forgy_init(data, k: int, seed=None, counter: EvalCounter | None = None) -> Centroids:
    """k distinct rows drawn uniformly without replacement."""
    X = as_points(data)
    m = X.shape[0]
    if k < 1:
        raise ConfigurationError("k must be >= 1")
    if m < k:
        raise ConfigurationError(f"cannot pick {k} distinct rows from {m} points")
    idx = _rng(seed).choice(m, size=k, replace=False)
    return Centroids.from_array(X[idx])


def _draw_proportional(cum: np.ndarray, size: int, rng) -> np.ndarray:
    # side="right" never lands on a zero-weight entry
    r = rng.random(size) * cum[-1]
    idx = np.searchsorted(cum, r, side="right")
    return np.minimum(idx, cum.shape[0] - 1)


def _potential(d2, weights):
    return d2 if weights is None else d2 * weights


def _greedy_fill(X, cent: Centroids, n_candidates: int, rng, counter: EvalCounter | None, weights=None) -> Centroids:
    m = X.shape[0]
    out = cent.copy()
    todo = list(np.flatnonzero(out.degenerate))
    if not todo:
        return out

    if len(todo) == out.k:
        if weights is None:
            first = int(rng.integers(m))
        else:
            first = int(_draw_proportional(np.cumsum(weights), 1, rng)[0])
        j = todo.pop(0)
        out.centers[j] = X[first]
        out.degenerate[j] = False
        if not todo:
            return out

    active = out.active
    if active.size == 1:
        d2 = _kernels.sqdist_to_point(X, out.centers[active[0]])
    else:
        _, d2 = _kernels.assign(X, out.centers, active)
    if counter is not None:
        counter.add(m * active.size)

    for j in todo:
        cum = np.cumsum(_potential(d2, weights))
        if cum[-1] > 0:
            cands = _draw_proportional(cum, n_candidates, rng)
        else:
            # every point already sits on a center
            cands = rng.integers(m, size=n_candidates)
        best_val = math.inf
        best_c = -1
        best_d2 = None
        for c in cands:
            nd2 = _kernels.min_update(X, X[c], d2)
            if counter is not None:
                counter.add(m)
            val = float(_kernels.ordered_sum(_potential(nd2, weights)))
            if val < best_val:
                best_val, best_c, best_d2 = val, int(c), nd2
        out.centers[j] = X[best_c]
        out.degenerate[j] = False
        d2 = best_d2
    return out


def kmeanspp_fill(
    data,
    cent: Centroids,
    cfg: InitConfig = InitConfig(),
    seed=None,
    counter: EvalCounter | None = None,
    weights=None,
) -> Centroids:
    """Fill every degenerate row of ``cent`` with greedy K-means++.

    If all rows are degenerate, the first one gets a uniformly random point.
    Each further row draws ``cfg.candidates_per_step`` points with probability
    proportional to their squared distance to the nearest filled center and
    keeps the one giving the lowest resulting objective. Non-degenerate rows
    are left untouched. ``seed`` may be a Generator, in which case it is
    consumed in place; when None, ``cfg.seed`` is used.
    """
    X = as_points(data)
    if X.shape[1] != cent.n:
        raise ValueError(f"points have {X.shape[1]} features, centroids have {cent.n}")
    if weights is not None:
        weights = np.ascontiguousarray(weights, dtype=np.float64)
    rng = _rng(cfg.seed if seed is None else seed)
    return _greedy_fill(X, cent, cfg.candidates_per_step, rng, counter, weights)


def log_rounds(cost: float) -> int:
    if cost <= 1.0:
        return 1
    return max(1, math.ceil(math.log(cost)))


def kmeans_parallel_init(data, k: int, cfg: InitConfig = InitConfig(method="kmeans_parallel"), seed=None,
                         counter: EvalCounter | None = None) -> Centroids:
    """K-means|| seeding.

    One uniform center, then ``rounds_r`` oversampling rounds that keep each
    point independently with probability min(1, l * D^2(x) / cost). The
    candidates are weighted by how many points they attract and reduced to
    k centers with weighted greedy K-means++.
    """
    X = as_points(data)
    m = X.shape[0]
    if k < 1:
        raise ConfigurationError("k must be >= 1")
    if m < k:
        raise ConfigurationError(f"cannot pick {k} centers from {m} points")
    rng = _rng(cfg.seed if seed is None else seed)
    ell = cfg.oversampling_l if cfg.oversampling_l is not None else 2 * k

    first = int(rng.integers(m))
    if k == 1:
        return Centroids.from_array(X[[first]])
    chosen = [first]
    d2 = _kernels.sqdist_to_point(X, X[first])
    if counter is not None:
        counter.add(m)
    cost = float(_kernels.ordered_sum(d2))
    rounds = log_rounds(cost) if cfg.rounds_r == "log" else int(cfg.rounds_r)

    for _ in range(rounds):
        if cost <= 0:
            break
        p = np.minimum(1.0, ell * d2 / cost)
        picked = np.flatnonzero(rng.random(m) < p)
        if picked.size == 0:
            continue
        _, nd2 = _kernels.assign(X, X[picked], np.arange(picked.size, dtype=np.int64))
        if counter is not None:
            counter.add(m * picked.size)
        d2 = np.minimum(d2, nd2)
        chosen.extend(picked.tolist())
        cost = float(_kernels.ordered_sum(d2))

    cand = np.asarray(chosen, dtype=np.int64)
    if cand.size < k:
        rest = np.setdiff1d(np.arange(m), cand)
        extra = rng.choice(rest, size=k - cand.size, replace=False)
        cand = np.concatenate([cand, extra])
    if cand.size == k:
        return Centroids.from_array(X[cand])

    pool = np.ascontiguousarray(X[cand])
    labels, _ = _kernels.assign(X, pool, np.arange(cand.size, dtype=np.int64))
    if counter is not None:
        counter.add(m * cand.size)
    weights = np.bincount(labels, minlength=cand.size).astype(np.float64)
    seeded = _greedy_fill(pool, Centroids.empty(k, X.shape[1]), cfg.candidates_per_step, rng, counter, weights)
    return seeded


def initialize(data, k: int, cfg: InitConfig, seed=None, counter: EvalCounter | None = None) -> Centroids:
    """Dispatch on ``cfg.method``."""
    X = as_points(data)
    if cfg.method == "forgy":
        return forgy_init(X, k, cfg.seed if seed is None else seed, counter)
    if cfg.method == "kmeans_parallel":
        return kmeans_parallel_init(X, k, cfg, seed, counter)
    if X.shape[0] < k:
        raise ConfigurationError(f"cannot pick {k} centers from {X.shape[0]} points")
    return kmeanspp_fill(X, Centroids.empty(k, X.shape[1]), cfg, seed, counter)

"""Lloyd's K-means local search and the init + search composition."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from bigmeans.core import (
    Centroids,
    ClusteringOutcome,
    EvalCounter,
    as_points,
    assign_nearest,
    sum_of_distances,
    update_centroids,
)
from bigmeans.exceptions import ConfigurationError
from bigmeans.init import InitConfig, initialize


@dataclass(frozen=True)
class SearchConfig:
    max_iterations: int = 300
    rel_tolerance: float = 1e-4
    seed: int | None = None

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ConfigurationError("max_iterations must be >= 1")
        if self.rel_tolerance < 0:
            raise ConfigurationError("rel_tolerance must be >= 0")


def lloyd(data, start: Centroids, cfg: SearchConfig = SearchConfig(),
          counter: EvalCounter | None = None) -> ClusteringOutcome:
    """Alternate nearest-centroid assignment and centroid update.

    Stops when no label changes, when the relative objective decrease
    (f_prev - f_cur) / f_prev drops below ``cfg.rel_tolerance`` (or f_prev is
    0), or after ``cfg.max_iterations`` updates. Clusters that lose all their
    points become degenerate and stay so; they are not repaired here.

    ``history`` holds the objective of the starting centroids followed by
    the objective after each iteration.
    """
    X = as_points(data)
    if counter is None:
        counter = EvalCounter()
    k = start.k
    labels, dists = assign_nearest(X, start, counter)
    f = sum_of_distances(dists)
    history = [f]
    cent = start
    iterations = 0

    for _ in range(cfg.max_iterations):
        updated = update_centroids(X, labels, k)
        # rows that were degenerate on entry never received points, so the
        # update already flags them; keep the flag explicit anyway
        updated.degenerate |= cent.degenerate
        new_labels, dists = assign_nearest(X, updated, counter)
        f_new = sum_of_distances(dists)
        iterations += 1
        counter.iterations += 1
        history.append(f_new)
        changed = not np.array_equal(new_labels, labels)
        cent, labels = updated, new_labels
        if not changed:
            f = f_new
            break
        if f == 0 or (f - f_new) / f < cfg.rel_tolerance:
            f = f_new
            break
        f = f_new

    return ClusteringOutcome(
        centroids=cent,
        labels=labels,
        objective=f,
        counter=counter,
        iterations=iterations,
        history=history,
    )


def kmeans(data, k: int, init_cfg: InitConfig = InitConfig(), cfg: SearchConfig = SearchConfig(),
           counter: EvalCounter | None = None) -> ClusteringOutcome:
    """Seed with ``init_cfg`` and run Lloyd on the whole dataset.

    Seeding time and distance evaluations are booked as ``cpu_init``; the
    local search as ``cpu_full``.
    """
    X = as_points(data)
    if k < 1:
        raise ConfigurationError("k must be >= 1")
    if X.shape[0] < k:
        raise ConfigurationError(f"k={k} exceeds the number of points m={X.shape[0]}")
    if counter is None:
        counter = EvalCounter()
    rng = np.random.default_rng(init_cfg.seed)
    t0 = time.perf_counter()
    start = initialize(X, k, init_cfg, rng, counter)
    t1 = time.perf_counter()
    out = lloyd(X, start, cfg, counter)
    t2 = time.perf_counter()
    counter.cpu_init += t1 - t0
    counter.cpu_full += t2 - t1
    return out

"""The Big-means driver.

Repeatedly draw a uniform chunk of ``s`` points, repair the degenerate rows
of the incumbent centroids with K-means++ on that chunk, run Lloyd on the
chunk, and keep the result if its chunk objective beats the best chunk
objective seen so far. A final pass assigns every point of the full
dataset to the incumbent centroids.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from bigmeans.core import (
    Centroids,
    ClusteringOutcome,
    EvalCounter,
    as_points,
    assign_nearest,
    sum_of_distances,
)
from bigmeans.exceptions import ConfigurationError
from bigmeans.init import InitConfig, kmeanspp_fill
from bigmeans.local_search import SearchConfig, lloyd


@dataclass(frozen=True)
class BigMeansConfig:
    k: int
    chunk_size: int
    max_cpu_seconds: float | None = None
    max_chunks: int | None = None
    search: SearchConfig = SearchConfig()
    init: InitConfig = InitConfig()
    seed: int | None = 0
    final_assignment: bool = True

    def __post_init__(self):
        if self.k < 1:
            raise ConfigurationError("k must be >= 1")
        if self.chunk_size < self.k:
            raise ConfigurationError(f"chunk size {self.chunk_size} is smaller than k={self.k}")
        if self.max_cpu_seconds is None and self.max_chunks is None:
            raise ConfigurationError("set max_cpu_seconds and/or max_chunks; otherwise the loop never stops")
        if self.max_cpu_seconds is not None and not self.max_cpu_seconds > 0:
            raise ConfigurationError("max_cpu_seconds must be positive")
        if self.max_chunks is not None and self.max_chunks < 1:
            raise ConfigurationError("max_chunks must be >= 1")


@dataclass
class ChunkRecord:
    index: int
    chunk_objective: float
    incumbent_objective: float
    accepted: bool
    repaired: int
    seconds: float = 0.0


@dataclass
class BigMeansTrace:
    records: list[ChunkRecord] = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    @property
    def incumbent_objectives(self) -> list[float]:
        return [r.incumbent_objective for r in self.records]


def sample_chunk(data, s: int, rng) -> np.ndarray:
    """``s`` distinct row indices drawn uniformly without replacement."""
    m = as_points(data).shape[0]
    if not 1 <= s <= m:
        raise ConfigurationError(f"chunk size must lie in [1, {m}], got {s}")
    return np.random.default_rng(rng).choice(m, size=s, replace=False)


def big_means(data, cfg: BigMeansConfig) -> tuple[ClusteringOutcome, BigMeansTrace]:
    X = as_points(data)
    m, n = X.shape
    s = cfg.chunk_size
    if s > m:
        raise ConfigurationError(f"chunk size {s} exceeds the number of points m={m}")

    rng = np.random.default_rng(cfg.seed)
    counter = EvalCounter()
    trace = BigMeansTrace()
    incumbent = Centroids.empty(cfg.k, n)
    f_opt = math.inf
    n_chunks = 0

    t0 = time.perf_counter()
    while True:
        if cfg.max_chunks is not None and n_chunks >= cfg.max_chunks:
            break
        if cfg.max_cpu_seconds is not None and time.perf_counter() - t0 >= cfg.max_cpu_seconds:
            break
        tc = time.perf_counter()
        # a sample of all m points is the dataset itself; no draw needed
        chunk = X if s == m else X[sample_chunk(X, s, rng)]
        repaired = incumbent.n_degenerate
        start = kmeanspp_fill(chunk, incumbent, cfg.init, rng, counter)
        local = lloyd(chunk, start, cfg.search, counter)
        accepted = local.objective < f_opt
        if accepted:
            incumbent = local.centroids
            f_opt = local.objective
        trace.records.append(
            ChunkRecord(n_chunks, local.objective, f_opt, accepted, repaired, time.perf_counter() - tc))
        n_chunks += 1
    counter.cpu_init = time.perf_counter() - t0

    labels = None
    full_objective = math.nan
    if cfg.final_assignment:
        t1 = time.perf_counter()
        labels, dists = assign_nearest(X, incumbent, counter)
        full_objective = sum_of_distances(dists)
        counter.cpu_full = time.perf_counter() - t1

    outcome = ClusteringOutcome(
        centroids=incumbent,
        labels=labels,
        objective=full_objective if cfg.final_assignment else f_opt,
        counter=counter,
        iterations=counter.iterations,
        n_chunks=n_chunks,
        best_chunk_objective=f_opt,
    )
    return outcome, trace


def _default_ladder(m: int, k: int) -> list[int]:
    sizes = {max(k, m // 2 ** p) for p in range(6, -1, -1)}
    return sorted(s for s in sizes if k <= s <= m)


def choose_chunk_size_hint(data, k: int, chunks_per_probe: int = 20, repeats: int = 3,
                           ladder=None, seed: int = 0, search: SearchConfig = SearchConfig()) -> int:
    """Advisory chunk size: the ladder entry with the best mean full objective.

    Each candidate size runs ``repeats`` short Big-means probes of
    ``chunks_per_probe`` chunks. Ties go to the smallest size.
    """
    X = as_points(data)
    m = X.shape[0]
    sizes = sorted(set(int(s) for s in ladder)) if ladder is not None else _default_ladder(m, k)
    sizes = [s for s in sizes if k <= s <= m]
    if not sizes:
        raise ConfigurationError("no admissible chunk size in the ladder")
    best_s, best_val = sizes[0], math.inf
    for s in sizes:
        vals = []
        for r in range(repeats):
            cfg = BigMeansConfig(k=k, chunk_size=s, max_chunks=chunks_per_probe, search=search, seed=seed + r)
            vals.append(big_means(X, cfg)[0].objective)
        mean = float(np.mean(vals))
        if mean < best_val:
            best_s, best_val = s, mean
    return best_s

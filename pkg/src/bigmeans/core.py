"""Data model and the numeric primitives shared by every clustering routine."""

from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np

from bigmeans import _kernels
from bigmeans.exceptions import ConfigurationError, InvalidStateError


@dataclass(frozen=True)
class Dataset:
    """An m x n matrix of finite feature vectors, one point per row.

    The stored array is read-only. A writable input array is copied first so
    the caller's buffer is never frozen behind their back.
    """

    points: np.ndarray
    name: str | None = None

    def __post_init__(self):
        arr = np.asarray(self.points, dtype=np.float64, order="C")
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2:
            raise ConfigurationError(f"dataset must be 2-D, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ConfigurationError(f"dataset must have m >= 1 and n >= 1, got {arr.shape}")
        if not np.isfinite(arr).all():
            raise ConfigurationError("dataset contains NaN or infinite values")
        if arr.flags.writeable:
            if np.may_share_memory(arr, self.points):
                arr = arr.copy()
            arr.setflags(write=False)
        object.__setattr__(self, "points", arr)

    @property
    def m(self) -> int:
        return self.points.shape[0]

    @property
    def n(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.m


def as_points(data) -> np.ndarray:
    """Return the C-contiguous float64 matrix behind ``data``."""
    if isinstance(data, Dataset):
        return data.points
    arr = np.ascontiguousarray(data, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ConfigurationError(f"expected a 2-D point matrix, got shape {arr.shape}")
    return arr


@dataclass
class Centroids:
    """k centers plus a mask of degenerate (uninitialized or empty) rows.

    Coordinates of degenerate rows are meaningless and never read by any
    distance computation.
    """

    centers: np.ndarray
    degenerate: np.ndarray

    def __post_init__(self):
        self.centers = np.array(self.centers, dtype=np.float64, order="C", ndmin=2)
        self.degenerate = np.array(self.degenerate, dtype=bool).reshape(-1)
        if self.centers.shape[0] != self.degenerate.shape[0]:
            raise ConfigurationError("centers and degeneracy mask disagree on k")
        if self.centers.shape[0] < 1:
            raise ConfigurationError("need at least one centroid row")
        if not np.isfinite(self.centers[~self.degenerate]).all():
            raise ConfigurationError("non-degenerate centroids must be finite")

    @classmethod
    def empty(cls, k: int, n: int) -> Centroids:
        return cls(np.zeros((k, n)), np.ones(k, dtype=bool))

    @classmethod
    def from_array(cls, centers) -> Centroids:
        centers = np.array(centers, dtype=np.float64, ndmin=2)
        return cls(centers, np.zeros(centers.shape[0], dtype=bool))

    @property
    def k(self) -> int:
        return self.centers.shape[0]

    @property
    def n(self) -> int:
        return self.centers.shape[1]

    @property
    def active(self) -> np.ndarray:
        return np.flatnonzero(~self.degenerate).astype(np.int64)

    @property
    def n_degenerate(self) -> int:
        return int(self.degenerate.sum())

    def copy(self) -> Centroids:
        return Centroids(self.centers.copy(), self.degenerate.copy())


@dataclass
class EvalCounter:
    """Hardware-independent cost accounting plus the init/full timing split."""

    distance_evals: int = 0
    iterations: int = 0
    cpu_init: float = 0.0
    cpu_full: float = 0.0

    def add(self, n: int):
        self.distance_evals += int(n)

    @property
    def cpu(self) -> float:
        return self.cpu_init + self.cpu_full


@dataclass
class ClusteringOutcome:
    centroids: Centroids
    labels: np.ndarray | None
    objective: float
    counter: EvalCounter = field(default_factory=EvalCounter)
    iterations: int = 0
    history: list = field(default_factory=list)
    n_chunks: int = 0
    best_chunk_objective: float | None = None


def squared_distance(a, b, counter: EvalCounter | None = None) -> float:
    a = np.asarray(a, dtype=np.float64).reshape(-1)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")
    if counter is not None:
        counter.add(1)
    d = 0.0
    for x, y in zip(a.tolist(), b.tolist()):
        d += (x - y) * (x - y)
    return d


def _check_dims(X, cent: Centroids):
    if X.shape[1] != cent.n:
        raise ValueError(f"points have {X.shape[1]} features, centroids have {cent.n}")


def assign_nearest(data, cent: Centroids, counter: EvalCounter | None = None):
    """Label every point with its nearest non-degenerate centroid.

    Ties go to the lowest centroid index. Returns ``(labels, min_sq_dists)``.
    """
    X = as_points(data)
    _check_dims(X, cent)
    active = cent.active
    if active.size == 0:
        raise InvalidStateError("all centroids are degenerate")
    labels, dists = _kernels.assign(X, cent.centers, active)
    if counter is not None:
        counter.add(X.shape[0] * active.size)
    return labels, dists


def objective(data, cent: Centroids, counter: EvalCounter | None = None) -> float:
    _, dists = assign_nearest(data, cent, counter)
    return float(_kernels.ordered_sum(dists))


def sum_of_distances(dists: np.ndarray) -> float:
    return float(_kernels.ordered_sum(np.ascontiguousarray(dists, dtype=np.float64)))


def update_centroids(data, labels, k: int) -> Centroids:
    """Centroid of every cluster; clusters with no members come back degenerate."""
    X = as_points(data)
    labels = np.ascontiguousarray(labels, dtype=np.int64)
    if labels.shape[0] != X.shape[0]:
        raise ValueError("one label per point required")
    if labels.size and (labels.min() < 0 or labels.max() >= k):
        raise ValueError(f"labels must lie in [0, {k})")
    sums, counts = _kernels.cluster_sums(X, labels, k)
    empty = counts == 0
    centers = np.zeros_like(sums)
    nz = ~empty
    centers[nz] = sums[nz] / counts[nz, None]
    return Centroids(centers, empty)


def set_num_threads(n: int | None) -> int:
    """Set the kernel worker count (clamped to what numba was started with)."""
    limit = numba.config.NUMBA_NUM_THREADS
    if n is None or n <= 0:
        n = limit
    n = min(int(n), limit)
    numba.set_num_threads(n)
    return n


def get_num_threads() -> int:
    return numba.get_num_threads()

"""Big-means clustering: K-means on uniform data chunks with K-means++ repair
of degenerate centroids and keep-the-best incumbent tracking."""

from bigmeans.big_means import BigMeansConfig, BigMeansTrace, ChunkRecord, big_means, choose_chunk_size_hint, sample_chunk
from bigmeans.core import (
    Centroids,
    ClusteringOutcome,
    Dataset,
    EvalCounter,
    assign_nearest,
    objective,
    squared_distance,
    update_centroids,
)
from bigmeans.exceptions import BigMeansError, ConfigurationError, IncompleteInputError, InvalidStateError, ParseError
from bigmeans.init import InitConfig, forgy_init, kmeans_parallel_init, kmeanspp_fill
from bigmeans.local_search import SearchConfig, kmeans, lloyd
from bigmeans.metrics import aggregate_scores, relative_error, score

__version__ = "0.1.0"

__all__ = [
    "BigMeansConfig", "BigMeansTrace", "ChunkRecord", "big_means", "choose_chunk_size_hint", "sample_chunk",
    "Centroids", "ClusteringOutcome", "Dataset", "EvalCounter", "assign_nearest", "objective",
    "squared_distance", "update_centroids", "BigMeansError", "ConfigurationError", "IncompleteInputError",
    "InvalidStateError", "ParseError", "InitConfig", "forgy_init", "kmeans_parallel_init", "kmeanspp_fill",
    "SearchConfig", "kmeans", "lloyd", "aggregate_scores", "relative_error", "score",
]

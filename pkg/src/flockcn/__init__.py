"""Flocking-on-network clustering.

Data points act as agents on a neighbor network that is rebuilt every
iteration; superposed pairwise attractions pull related points together
until the swarm settles into tight clumps that read out as clusters.
"""

from .cluster import ClusterAssignment, extract_clusters, merge_to_target
from .config import RunConfig
from .data import (
    Dataset,
    ImputationError,
    ParseError,
    impute_missing,
    load_csv,
    normalize_minmax,
    pairwise_distances,
)
from .dynamics import AgentState, DivergenceError, RunTrace, StepRecord, bounded_step, iterate, pairwise_field, total_field
from .evaluation import AccuracyReport, kmeans_baseline, score
from .network import (
    ComplexNetwork,
    KnnGraph,
    NetworkStats,
    build_complex_network,
    build_knn_graph,
    compute_degrees,
    flcn1_connection_probabilities,
    flcn1_long_range,
    flcn2_candidate_set,
    flcn2_connection_probabilities,
    flcn2_long_range,
    network_statistics,
)

__version__ = "0.1.0"

__all__ = [
    "AgentState",
    "AccuracyReport",
    "ClusterAssignment",
    "ComplexNetwork",
    "Dataset",
    "DivergenceError",
    "ImputationError",
    "KnnGraph",
    "NetworkStats",
    "ParseError",
    "RunConfig",
    "RunTrace",
    "StepRecord",
    "bounded_step",
    "build_complex_network",
    "build_knn_graph",
    "compute_degrees",
    "extract_clusters",
    "flcn1_connection_probabilities",
    "flcn1_long_range",
    "flcn2_candidate_set",
    "flcn2_connection_probabilities",
    "flcn2_long_range",
    "impute_missing",
    "iterate",
    "kmeans_baseline",
    "load_csv",
    "merge_to_target",
    "network_statistics",
    "normalize_minmax",
    "pairwise_distances",
    "pairwise_field",
    "score",
    "total_field",
]

"""Cluster read-out from converged positions, plus merging down to a target count."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import pairwise_distances


class UnionFind:
    """Disjoint sets over 0..n-1 with path halving."""

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


@dataclass
class ClusterAssignment:
    """A partition of the point set.

    Cluster ids are contiguous, numbered by order of first appearance
    along the point index. ``centroids[c]`` is the mean position of
    cluster c's members.
    """

    label_of: np.ndarray  # (N,) int
    cluster_count: int
    centroids: np.ndarray  # (cluster_count, m)

    @classmethod
    def from_labels(cls, labels: np.ndarray, positions: np.ndarray) -> "ClusterAssignment":
        """Canonicalize arbitrary labels and compute centroids."""
        labels = np.asarray(labels)
        positions = np.asarray(positions, dtype=float)
        seen: dict = {}
        canonical = np.empty(labels.shape[0], dtype=int)
        for idx, raw in enumerate(labels):
            key = raw.item() if hasattr(raw, "item") else raw
            if key not in seen:
                seen[key] = len(seen)
            canonical[idx] = seen[key]
        count = len(seen)
        centroids = np.vstack([positions[canonical == c].mean(axis=0) for c in range(count)])
        return cls(label_of=canonical, cluster_count=count, centroids=centroids)

    def members(self, c: int) -> np.ndarray:
        return np.flatnonzero(self.label_of == c)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.label_of, minlength=self.cluster_count)


def extract_clusters(positions: np.ndarray, delta: float) -> ClusterAssignment:
    """Group points whose gap chains stay within delta (single linkage).

    Two points land in the same cluster exactly when a chain of points
    connects them with every hop <= delta.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    positions = np.asarray(positions, dtype=float)
    n = positions.shape[0]
    if n == 0:
        raise ValueError("no points to cluster")
    if n == 1:
        return ClusterAssignment.from_labels(np.zeros(1, dtype=int), positions)
    distances = pairwise_distances(positions)
    uf = UnionFind(n)
    close = np.triu(distances <= delta, k=1)
    for i, j in np.argwhere(close):
        uf.union(int(i), int(j))
    roots = np.array([uf.find(i) for i in range(n)])
    return ClusterAssignment.from_labels(roots, positions)


def merge_to_target(
    assignment: ClusterAssignment, positions: np.ndarray, target: int
) -> ClusterAssignment:
    """Repeatedly fold the smallest cluster into its nearest one by centroid.

    Ties (size, then distance) break toward the lower cluster id.
    Centroids are recomputed after every merge. A target equal to the
    current count returns the assignment unchanged.

    Raises:
        ValueError: target < 1 or target exceeds the current count
            (merging can only reduce the number of clusters).
    """
    if target < 1:
        raise ValueError("target must be at least 1")
    if target > assignment.cluster_count:
        raise ValueError(
            f"cannot reach {target} clusters by merging: only {assignment.cluster_count} exist"
        )
    if target == assignment.cluster_count:
        return assignment

    positions = np.asarray(positions, dtype=float)
    clusters = [assignment.members(c) for c in range(assignment.cluster_count)]
    centroids = [positions[m].mean(axis=0) for m in clusters]

    while len(clusters) > target:
        sizes = np.array([m.size for m in clusters])
        smallest = int(np.argmin(sizes))  # argmin takes the lowest id on ties
        gaps = np.array([np.linalg.norm(c - centroids[smallest]) for c in centroids])
        gaps[smallest] = np.inf
        nearest = int(np.argmin(gaps))
        clusters[nearest] = np.concatenate([clusters[nearest], clusters[smallest]])
        centroids[nearest] = positions[clusters[nearest]].mean(axis=0)
        del clusters[smallest]
        del centroids[smallest]

    labels = np.empty(positions.shape[0], dtype=int)
    for cid, members in enumerate(clusters):
        labels[members] = cid
    return ClusterAssignment.from_labels(labels, positions)

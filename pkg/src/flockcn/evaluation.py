"""Scoring a clustering against ground truth, and a k-means reference."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

from .cluster import ClusterAssignment
from .data import Dataset


@dataclass
class AccuracyReport:
    """Result of matching clusters to classes.

    ``confusion[c, l]`` counts points of class ``class_labels[l]`` in
    cluster c. ``mapping`` assigns each matched cluster its class under
    the best one-to-one matching; unmatched clusters (when there are
    more clusters than classes) score zero and get no entry.
    """

    confusion: np.ndarray
    mapping: dict[int, str]
    accuracy: float
    class_labels: list[str]

    def to_record(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "mapping": {str(c): str(lab) for c, lab in sorted(self.mapping.items())},
            "confusion": self.confusion.tolist(),
            "class_labels": [str(lab) for lab in self.class_labels],
        }


def score(prediction: ClusterAssignment, truth: Sequence) -> AccuracyReport:
    """Accuracy under the best one-to-one cluster-to-class matching.

    The matching maximizes the summed confusion counts (equivalent to
    trying every injective assignment); accuracy is that sum over N.
    """
    predicted = np.asarray(prediction.label_of)
    n = predicted.shape[0]
    if n == 0:
        raise ValueError("nothing to score: empty prediction")
    if len(truth) != n:
        raise ValueError(f"length mismatch: {n} predictions vs {len(truth)} labels")

    class_index: dict = {}
    class_labels: list = []
    truth_idx = np.empty(n, dtype=int)
    for i, raw in enumerate(truth):
        key = raw.item() if hasattr(raw, "item") else raw
        if key not in class_index:
            class_index[key] = len(class_labels)
            class_labels.append(key)
        truth_idx[i] = class_index[key]

    n_clusters = prediction.cluster_count
    confusion = np.zeros((n_clusters, len(class_labels)), dtype=int)
    np.add.at(confusion, (predicted, truth_idx), 1)

    rows, cols = linear_sum_assignment(confusion, maximize=True)
    mapping = {int(c): class_labels[l] for c, l in zip(rows, cols)}
    correct = int(confusion[rows, cols].sum())
    return AccuracyReport(
        confusion=confusion,
        mapping=mapping,
        accuracy=correct / n,
        class_labels=class_labels,
    )


def kmeans_baseline(
    dataset: Dataset,
    k_clusters: int,
    seed: int = 0,
    restarts: int = 20,
    max_iter: int = 300,
) -> ClusterAssignment:
    """Plain Lloyd k-means, best of ``restarts`` by within-cluster scatter.

    Each restart draws its centroids from distinct data points using a
    seed derived from ``seed``, so the whole procedure is reproducible.
    A centroid that loses all its points is reseeded at the point
    farthest from its current centroid.
    """
    points = dataset.points
    n = points.shape[0]
    if not np.isfinite(points).all():
        raise ValueError("dataset has non-finite values; impute missing cells first")
    if not 1 <= k_clusters <= n:
        raise ValueError(f"k_clusters must lie in [1, {n}], got {k_clusters}")

    best_labels: np.ndarray | None = None
    best_scatter = np.inf
    for child_seed in np.random.SeedSequence(seed).spawn(restarts):
        rng = np.random.default_rng(child_seed)
        centroids = points[rng.choice(n, size=k_clusters, replace=False)].copy()
        labels = np.full(n, -1, dtype=int)
        for _ in range(max_iter):
            sq = cdist(points, centroids, "sqeuclidean")
            new_labels = np.argmin(sq, axis=1)
            own = sq[np.arange(n), new_labels]
            for c in range(k_clusters):
                if not (new_labels == c).any():
                    far = int(np.argmax(own))
                    centroids[c] = points[far]
                    new_labels[far] = c
                    own[far] = 0.0
            if np.array_equal(new_labels, labels):
                break
            labels = new_labels
            for c in range(k_clusters):
                centroids[c] = points[labels == c].mean(axis=0)
        scatter = float(((points - centroids[labels]) ** 2).sum())
        if scatter < best_scatter:
            best_scatter = scatter
            best_labels = labels
    return ClusterAssignment.from_labels(best_labels, points)

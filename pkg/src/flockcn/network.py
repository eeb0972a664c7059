"""Time-varying neighbor graph plus degree-biased long-range links.

Every point links to its k nearest neighbors (a directed graph, rebuilt
from current positions each iteration). On top of that, each point gets
r long-range links chosen by a weighted rank: candidates score
proportionally to degree * exp(-distance), so well-connected far nodes
are preferred over poorly-connected near ones. Two selection variants
exist: one ranks all non-neighbors against fresh degrees, the other
ranks only a frozen pool of initially high-degree nodes against the
degrees they had at the start of the run.

All ties (equal distances, equal scores, equal degrees) break toward
the lower node index, which keeps every run deterministic.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .data import pairwise_distances


@dataclass
class KnnGraph:
    """Directed graph linking every node to its nearest neighbors.

    ``neighbors[i]`` holds node ids ordered by ascending distance from i
    (ties toward the lower id); ``distances[i]`` holds matching values.
    """

    neighbors: np.ndarray  # (N, k_eff) int
    distances: np.ndarray  # (N, k_eff) float
    k: int  # requested neighbor count; k_eff = min(k, N - 1)

    @property
    def n_nodes(self) -> int:
        return self.neighbors.shape[0]

    @property
    def k_effective(self) -> int:
        return self.neighbors.shape[1]


@dataclass
class ComplexNetwork:
    """Knn graph with long-range links layered on top.

    ``long_range[i]`` is the array of extra targets for node i. For the
    frozen-pool variant, ``degrees_t0`` and ``candidate_set`` carry the
    start-of-run state the selection was made against.
    """

    base: KnnGraph
    long_range: list[np.ndarray]
    degrees: np.ndarray
    degrees_t0: np.ndarray | None = None
    candidate_set: np.ndarray | None = None

    @property
    def n_nodes(self) -> int:
        return self.base.n_nodes

    def all_neighbors(self, i: int) -> np.ndarray:
        """Near neighbors first, then long-range targets."""
        return np.concatenate([self.base.neighbors[i], self.long_range[i]])

    def adjacency(self) -> np.ndarray:
        """Boolean (N, N) matrix of all outgoing links."""
        n = self.n_nodes
        adj = np.zeros((n, n), dtype=bool)
        rows = np.arange(n)
        adj[rows[:, None], self.base.neighbors] = True
        for i, targets in enumerate(self.long_range):
            adj[i, targets] = True
        return adj


@dataclass
class NetworkStats:
    """Small-world style diagnostics of the undirected projection."""

    degree_histogram: dict[int, int]
    average_path_length: float
    clustering_coefficient: float
    disconnected: bool

    def to_record(self) -> dict:
        return {
            "degree_histogram": {str(k): v for k, v in sorted(self.degree_histogram.items())},
            "average_path_length": self.average_path_length,
            "clustering_coefficient": self.clustering_coefficient,
            "disconnected": self.disconnected,
        }


def build_knn_graph(positions: np.ndarray | None, k: int, distances: np.ndarray | None = None) -> KnnGraph:
    """Link every node to its k nearest others (self excluded).

    ``distances`` may carry a precomputed pairwise matrix to avoid
    recomputation; otherwise it is derived from ``positions``. When
    k >= N the graph links to all N - 1 others.
    """
    if distances is None:
        distances = pairwise_distances(positions)
    d = np.asarray(distances, dtype=float)
    n = d.shape[0]
    if n < 2:
        raise ValueError("need at least 2 points to build a neighbor graph")
    if k < 1:
        raise ValueError("k must be at least 1")
    k_eff = min(k, n - 1)
    work = d.copy()
    np.fill_diagonal(work, np.inf)
    order = np.argsort(work, axis=1, kind="stable")  # stable: ties go to lower id
    neighbors = order[:, :k_eff]
    return KnnGraph(neighbors, np.take_along_axis(d, neighbors, axis=1), k)


def compute_degrees(graph: KnnGraph) -> np.ndarray:
    """Out-degree plus in-degree per node, counting knn edges only."""
    in_deg = np.bincount(graph.neighbors.ravel(), minlength=graph.n_nodes)
    return graph.k_effective + in_deg


def flcn1_connection_probabilities(
    i: int,
    positions: np.ndarray | None,
    graph: KnnGraph,
    degrees: np.ndarray,
    distances: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Normalized link probabilities from node i over all its non-neighbors.

    Returns (candidate ids ascending, probabilities). Each candidate j
    weighs degrees[j] * exp(-d(i, j)); weights are normalized to sum to 1.
    """
    if distances is None:
        distances = pairwise_distances(positions)
    mask = np.ones(graph.n_nodes, dtype=bool)
    mask[i] = False
    mask[graph.neighbors[i]] = False
    candidates = np.flatnonzero(mask)
    if candidates.size == 0:
        return candidates, np.empty(0)
    weights = degrees[candidates].astype(float) * np.exp(-distances[i, candidates])
    total = weights.sum()
    if total > 0:
        probs = weights / total
    else:  # all weights underflowed; fall back to a uniform pick
        probs = np.full(candidates.size, 1.0 / candidates.size)
    return candidates, probs


def flcn1_long_range(
    i: int,
    positions: np.ndarray | None,
    graph: KnnGraph,
    degrees: np.ndarray,
    r: int,
    distances: np.ndarray | None = None,
) -> np.ndarray:
    """Top-r candidates for node i by link probability, ties to lower id.

    r is clamped to the number of available candidates; r = 0 gives none.
    """
    if distances is None:
        distances = pairwise_distances(positions)
    candidates, probs = flcn1_connection_probabilities(i, None, graph, degrees, distances=distances)
    if r <= 0 or candidates.size == 0:
        return np.empty(0, dtype=int)
    order = np.argsort(-probs, kind="stable")  # candidates ascend, so ties pick lower id
    return candidates[order[: min(r, candidates.size)]]


def _flcn1_all(graph: KnnGraph, degrees: np.ndarray, distances: np.ndarray, r: int) -> list[np.ndarray]:
    """Long-range targets for every node at once (fresh-degree variant)."""
    n = graph.n_nodes
    r_eff = min(r, n - 1 - graph.k_effective)
    if r_eff <= 0:
        return [np.empty(0, dtype=int)] * n
    scores = degrees[None, :].astype(float) * np.exp(-distances)
    rows = np.arange(n)
    scores[rows, rows] = -np.inf
    scores[rows[:, None], graph.neighbors] = -np.inf
    order = np.argsort(-scores, axis=1, kind="stable")
    picked = order[:, :r_eff]
    return [picked[i] for i in range(n)]


def flcn2_candidate_set(
    degrees_t0: np.ndarray,
    eta: float,
    n_points: int | None = None,
    r: int = 1,
) -> np.ndarray:
    """The pool of long-range candidates: the g highest-degree nodes at start.

    g = round(eta * N), clamped into [max(r, 1), N - 1]. Ties on degree
    break toward the lower node index. Returned sorted by node id.
    """
    deg0 = np.asarray(degrees_t0)
    n = int(n_points) if n_points is not None else deg0.size
    g = int(math.floor(eta * n + 0.5))
    if g < 1:
        raise ValueError(f"candidate pool would be empty: round({eta} * {n}) < 1")
    g = min(max(g, max(r, 1)), n - 1)
    order = np.argsort(-deg0, kind="stable")
    return np.sort(order[:g])


def flcn2_connection_probabilities(
    i: int,
    positions: np.ndarray | None,
    candidate_set: np.ndarray,
    degrees_t0: np.ndarray,
    graph: KnnGraph,
    distances: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Normalized link probabilities from node i over the eligible pool.

    Eligible = candidate pool minus i itself and i's near neighbors.
    Weights use the start-of-run degrees but current distances.
    """
    if distances is None:
        distances = pairwise_distances(positions)
    pool = np.asarray(candidate_set, dtype=int)
    eligible = pool[(pool != i) & ~np.isin(pool, graph.neighbors[i])]
    if eligible.size == 0:
        return eligible, np.empty(0)
    weights = degrees_t0[eligible].astype(float) * np.exp(-distances[i, eligible])
    total = weights.sum()
    if total > 0:
        probs = weights / total
    else:
        probs = np.full(eligible.size, 1.0 / eligible.size)
    return eligible, probs


def flcn2_long_range(
    i: int,
    positions: np.ndarray | None,
    candidate_set: np.ndarray,
    degrees_t0: np.ndarray,
    r: int,
    graph: KnnGraph,
    distances: np.ndarray | None = None,
) -> np.ndarray:
    """Top-r eligible pool members for node i; may be empty."""
    if distances is None:
        distances = pairwise_distances(positions)
    eligible, probs = flcn2_connection_probabilities(
        i, None, candidate_set, degrees_t0, graph, distances=distances
    )
    if r <= 0 or eligible.size == 0:
        return np.empty(0, dtype=int)
    order = np.argsort(-probs, kind="stable")
    return eligible[order[: min(r, eligible.size)]]


def _flcn2_all(
    graph: KnnGraph,
    candidate_set: np.ndarray,
    degrees_t0: np.ndarray,
    distances: np.ndarray,
    r: int,
) -> list[np.ndarray]:
    """Long-range targets for every node at once (frozen-pool variant)."""
    n = graph.n_nodes
    pool = np.asarray(candidate_set, dtype=int)
    g = pool.size
    if r <= 0 or g == 0:
        return [np.empty(0, dtype=int)] * n

    scores = degrees_t0[pool][None, :].astype(float) * np.exp(-distances[:, pool])
    rows = np.arange(n)

    # mark pool slots that are i itself or one of i's near neighbors
    slot_of = np.full(n, -1, dtype=int)
    slot_of[pool] = np.arange(g)
    blocked = np.zeros((n, g), dtype=bool)
    self_slot = slot_of[rows]
    own = self_slot >= 0
    blocked[rows[own], self_slot[own]] = True
    nb_slot = slot_of[graph.neighbors]  # (N, k_eff)
    hit = nb_slot >= 0
    row_idx = np.broadcast_to(rows[:, None], nb_slot.shape)[hit]
    blocked[row_idx, nb_slot[hit]] = True

    scores[blocked] = -np.inf
    order = np.argsort(-scores, axis=1, kind="stable")
    available = g - blocked.sum(axis=1)
    take = np.minimum(available, r)
    return [pool[order[i, : take[i]]] for i in range(n)]


def build_complex_network(
    positions: np.ndarray | None,
    k: int,
    r: int,
    variant: str = "flcn1",
    eta: float = 0.1,
    degrees_t0: np.ndarray | None = None,
    candidate_set: np.ndarray | None = None,
    distances: np.ndarray | None = None,
) -> ComplexNetwork:
    """Build the knn graph and layer long-range links on top.

    For the frozen-pool variant, pass ``degrees_t0`` / ``candidate_set``
    from the start of the run; omitting them treats the current network
    as the start (which is exactly right at t = 0).
    """
    if distances is None:
        distances = pairwise_distances(positions)
    graph = build_knn_graph(None, k, distances=distances)
    degrees = compute_degrees(graph)
    variant = variant.lower()
    if variant == "flcn1":
        psi = _flcn1_all(graph, degrees, distances, r)
        return ComplexNetwork(graph, psi, degrees)
    if variant == "flcn2":
        deg0 = degrees if degrees_t0 is None else np.asarray(degrees_t0)
        pool = (
            flcn2_candidate_set(deg0, eta, graph.n_nodes, r)
            if candidate_set is None
            else np.asarray(candidate_set, dtype=int)
        )
        psi = _flcn2_all(graph, pool, deg0, distances, r)
        return ComplexNetwork(graph, psi, degrees, degrees_t0=deg0, candidate_set=pool)
    raise ValueError(f"unknown variant {variant!r}")


def network_statistics(network: ComplexNetwork) -> NetworkStats:
    """Degree histogram, average path length, and clustering coefficient.

    Statistics are taken on the undirected projection (an edge exists if
    either endpoint links to the other). Path length averages over all
    reachable ordered pairs and sets ``disconnected`` when any pair is
    unreachable; the clustering coefficient of a node with fewer than
    two neighbors is 0.
    """
    adj = network.adjacency()
    und = adj | adj.T
    np.fill_diagonal(und, False)
    n = und.shape[0]
    neighbor_lists = [np.flatnonzero(und[i]) for i in range(n)]
    degrees = und.sum(axis=1)

    histogram: dict[int, int] = {}
    for d in degrees:
        histogram[int(d)] = histogram.get(int(d), 0) + 1

    total = 0
    pairs = 0
    disconnected = False
    for source in range(n):
        dist = np.full(n, -1, dtype=int)
        dist[source] = 0
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for v in neighbor_lists[u]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        reached = dist > 0
        pairs += int(reached.sum())
        total += int(dist[reached].sum())
        if (dist < 0).any():
            disconnected = True
    apl = total / pairs if pairs else 0.0

    coeffs = np.zeros(n)
    for i, neighbors in enumerate(neighbor_lists):
        k_i = neighbors.size
        if k_i < 2:
            continue
        links = und[np.ix_(neighbors, neighbors)].sum() // 2
        coeffs[i] = 2.0 * links / (k_i * (k_i - 1))

    return NetworkStats(
        degree_histogram=histogram,
        average_path_length=float(apl),
        clustering_coefficient=float(coeffs.mean()),
        disconnected=disconnected,
    )

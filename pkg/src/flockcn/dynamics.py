"""Agent movement under superposed attraction fields.

Every data point is an agent. Each iteration the neighbor network is
rebuilt from current positions (k nearest neighbors plus r long-range
links), then every linked node j pulls agent i toward it with magnitude

    degrees[j] / (d_t * max(d_0, theta))^2      when d_t > theta,
    0                                           otherwise,

where d_t is the current distance, d_0 the initial one (clamped below
by theta so near-duplicate starting pairs cannot blow up the force).
The agent's displacement is the vector sum of these fields, rescaled so
its length never exceeds the degree-weighted mean distance to its near
neighbors. All agents move simultaneously; the run stops once the
summed step lengths drop below epsilon or the iteration budget runs out.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import RunConfig
from .data import Dataset, normalize_minmax, pairwise_distances
from .network import ComplexNetwork, build_complex_network


class DivergenceError(RuntimeError):
    """An agent position became non-finite during iteration."""


@dataclass
class AgentState:
    """Current and initial agent positions.

    ``initial`` is frozen at construction (read-only array); the field
    law keeps referring to it through the whole run.
    """

    current: np.ndarray
    initial: np.ndarray
    t: int = 0

    @classmethod
    def from_positions(cls, positions: np.ndarray) -> "AgentState":
        current = np.array(positions, dtype=float)
        initial = current.copy()
        initial.setflags(write=False)
        return cls(current=current, initial=initial, t=0)


@dataclass
class StepRecord:
    """Per-agent step lengths for one iteration."""

    per_agent_length: np.ndarray
    total: float
    cap: np.ndarray | None = None  # per-agent step bound in effect


@dataclass
class RunTrace:
    """What happened over a run.

    ``snapshots`` and ``step_records`` are only populated when tracing
    was requested; ``totals_per_iteration`` is always recorded.
    """

    totals_per_iteration: list[float]
    iterations: int
    converged: bool
    snapshots: list[np.ndarray] | None = None
    step_records: list[StepRecord] | None = None

    @property
    def traced(self) -> bool:
        return self.snapshots is not None


def pairwise_field(i: int, j: int, state: AgentState, degrees: np.ndarray, theta: float) -> np.ndarray:
    """Attraction exerted on agent i by agent j (zero at or below theta)."""
    diff = state.current[j] - state.current[i]
    d_t = float(np.linalg.norm(diff))
    if d_t <= theta:
        return np.zeros_like(diff)
    d_0 = max(float(np.linalg.norm(state.initial[j] - state.initial[i])), theta)
    magnitude = degrees[j] / (d_t * d_0) ** 2
    return (magnitude / d_t) * diff


def total_field(i: int, network: ComplexNetwork, state: AgentState, theta: float) -> np.ndarray:
    """Sum of attractions on agent i from its near and long-range neighbors."""
    out = np.zeros(state.current.shape[1])
    for j in network.all_neighbors(i):
        out += pairwise_field(i, int(j), state, network.degrees, theta)
    return out


def bounded_step(
    i: int, field: np.ndarray, network: ComplexNetwork, state: AgentState
) -> tuple[float, float, np.ndarray]:
    """Rescale agent i's field so the step stays within its local bound.

    The bound is the degree-weighted mean distance to i's near
    neighbors. Returns (alpha, step length, displacement).
    """
    raw = float(np.linalg.norm(field))
    distances = network.base.distances[i]
    weights = network.degrees[network.base.neighbors[i]].astype(float)
    cap = float((weights * distances).sum() / weights.sum())
    alpha = cap / raw if raw > cap else 1.0
    return alpha, alpha * raw, alpha * field


def _step_all(
    current: np.ndarray,
    initial_distances: np.ndarray,
    network: ComplexNetwork,
    distances: np.ndarray,
    theta: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """One synchronous update for every agent.

    Returns (displacements, per-agent step lengths, per-agent caps).
    Mirrors pairwise_field / total_field / bounded_step exactly, just
    over matrices.
    """
    n = current.shape[0]
    active = network.adjacency() & (distances > theta)
    weights = np.zeros((n, n))
    deg = np.broadcast_to(network.degrees.astype(float), (n, n))
    magnitude = deg[active] / (distances[active] * initial_distances[active]) ** 2
    weights[active] = magnitude / distances[active]
    fields = weights @ current - weights.sum(axis=1, keepdims=True) * current

    raw = np.linalg.norm(fields, axis=1)
    nb_deg = network.degrees[network.base.neighbors].astype(float)
    caps = (nb_deg * network.base.distances).sum(axis=1) / nb_deg.sum(axis=1)
    alpha = np.ones(n)
    np.divide(caps, raw, out=alpha, where=raw > caps)
    return alpha[:, None] * fields, alpha * raw, caps


def iterate(dataset: Dataset, config: RunConfig) -> tuple[AgentState, RunTrace]:
    """Run the flocking dynamics on a dataset until quiescence.

    The dataset must already be imputed (finite values); min-max
    scaling is applied here when the config asks for it. Identical
    inputs always produce the identical trajectory.
    """
    if not np.isfinite(dataset.points).all():
        raise ValueError("dataset has non-finite values; impute missing cells first")
    cfg = config.resolve(dataset.n_points)
    data = normalize_minmax(dataset) if cfg.normalize else dataset
    state = AgentState.from_positions(data.points)
    n = state.current.shape[0]

    d0 = pairwise_distances(state.initial)
    d0_clamped = np.maximum(d0, cfg.theta)
    np.fill_diagonal(d0_clamped, 0.0)  # diagonal never used; keep it inert

    degrees_t0: np.ndarray | None = None
    pool: np.ndarray | None = None
    totals: list[float] = []
    snapshots: list[np.ndarray] | None = [] if cfg.trace else None
    records: list[StepRecord] | None = [] if cfg.trace else None
    converged = False

    for _ in range(cfg.max_iters):
        distances = pairwise_distances(state.current)
        network = build_complex_network(
            None,
            cfg.k,
            cfg.r,
            variant=cfg.variant,
            eta=cfg.eta,
            degrees_t0=degrees_t0,
            candidate_set=pool,
            distances=distances,
        )
        if cfg.variant == "flcn2" and pool is None:
            # freeze the long-range pool and its degrees at the start of the run
            degrees_t0 = network.degrees_t0
            pool = network.candidate_set

        displacements, lengths, caps = _step_all(
            state.current, d0_clamped, network, distances, cfg.theta
        )
        new_positions = state.current + displacements
        if not np.isfinite(new_positions).all():
            bad = int(np.flatnonzero(~np.isfinite(new_positions).all(axis=1))[0])
            raise DivergenceError(
                f"agent {bad} became non-finite at iteration {state.t + 1}"
            )

        total = float(lengths.sum())
        totals.append(total)
        state.current = new_positions
        state.t += 1
        if snapshots is not None:
            snapshots.append(new_positions.copy())
            records.append(StepRecord(per_agent_length=lengths, total=total, cap=caps))
        if total < cfg.epsilon:
            converged = True
            break

    trace = RunTrace(
        totals_per_iteration=totals,
        iterations=len(totals),
        converged=converged,
        snapshots=snapshots,
        step_records=records,
    )
    return state, trace

"""Run configuration shared by the dynamics engine and the CLI."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

VARIANTS = ("flcn1", "flcn2")


@dataclass
class RunConfig:
    """Knobs for one clustering run.

    Fields left at ``None`` are data-dependent and get filled by
    :meth:`resolve`: r defaults to floor(k / 2) but at least 1, epsilon
    to 1e-3 * N * theta, delta to 2 * theta.
    """

    k: int
    variant: str = "flcn2"
    r: int | None = None
    eta: float = 0.1
    theta: float = 0.1
    epsilon: float | None = None
    max_iters: int = 100
    seed: int = 0
    normalize: bool = True
    target_clusters: int | None = None
    delta: float | None = None
    trace: bool = False

    def resolve(self, n_points: int) -> "RunConfig":
        """Return a copy with data-dependent defaults filled in and validated."""
        resolved = replace(
            self,
            variant=self.variant.lower(),
            r=self.r if self.r is not None else max(1, self.k // 2),
            epsilon=self.epsilon if self.epsilon is not None else 1e-3 * n_points * self.theta,
            delta=self.delta if self.delta is not None else 2 * self.theta,
        )
        resolved.validate(n_points)
        return resolved

    def validate(self, n_points: int | None = None) -> None:
        """Reject out-of-range settings. ``n_points`` enables size-dependent checks."""
        if self.variant.lower() not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.r is not None and self.r < 1:
            raise ValueError("r must be at least 1")
        if self.theta < 0:
            raise ValueError("theta must be nonnegative")
        if self.epsilon is not None and not self.epsilon > 0:
            raise ValueError("epsilon must be positive (set it explicitly when theta = 0)")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if not 0 < self.eta <= 0.5:
            raise ValueError("eta must lie in (0, 0.5]")
        if self.delta is not None and not self.delta > 0:
            raise ValueError("delta must be positive")
        if self.target_clusters is not None and self.target_clusters < 1:
            raise ValueError("target_clusters must be at least 1")
        if (
            n_points is not None
            and self.variant.lower() == "flcn2"
            and math.floor(self.eta * n_points + 0.5) < 1
        ):
            raise ValueError(f"eta = {self.eta} gives an empty candidate pool for N = {n_points}")

    def as_record(self) -> dict:
        """Plain dict of the effective settings, for metrics output."""
        return asdict(self)

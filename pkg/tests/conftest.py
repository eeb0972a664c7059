"""Shared fixtures and helpers for the test suite.

Synthetic point sets are built here so every test module draws the same
geometry. Reference datasets come from scikit-learn where possible; the
larger benchmark files are looked up in a local data directory and the
tests that need them skip with instructions when the files are absent.
"""

from __future__ import annotations

import itertools
import os
from pathlib import Path

import numpy as np
import pytest

from flockcn import Dataset, load_csv

DATA_DIR = Path(os.environ.get("FLOCKCN_DATA_DIR", Path(__file__).resolve().parent.parent / "data"))

# populated by the acceptance tests, printed uncaptured at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)


def record_acceptance(line: str) -> None:
    ACCEPTANCE_LINES.append(line)
    print(line)


# ---------------------------------------------------------------- synthetic


def make_triangle_blobs(seed: int, per: int = 180, spread: float = 0.05) -> Dataset:
    """Three Gaussian blobs on a jittered triangle, labels by blob."""
    rng = np.random.default_rng(seed)
    base = np.array([[0.25, 0.25], [0.75, 0.3], [0.5, 0.75]])
    centers = base + rng.uniform(-0.04, 0.04, base.shape)
    points, labels = [], []
    for b, c in enumerate(centers):
        points.append(c + spread * rng.standard_normal((per, 2)))
        labels += [str(b)] * per
    return Dataset(points=np.vstack(points), labels=labels, name=f"tri-blobs-{seed}")


def make_ring_blobs(
    seed: int, n_blobs: int = 5, radius: float = 0.36, per: int = 90, spread: float = 0.025
) -> Dataset:
    """Gaussian blobs on a jittered ring; uniform gaps between neighbors."""
    rng = np.random.default_rng(seed)
    angles = 2 * np.pi * np.arange(n_blobs) / n_blobs
    base = 0.5 + radius * np.column_stack([np.cos(angles), np.sin(angles)])
    centers = base + rng.uniform(-0.03, 0.03, base.shape)
    points, labels = [], []
    for b, c in enumerate(centers):
        points.append(c + spread * rng.standard_normal((per, 2)))
        labels += [str(b)] * per
    return Dataset(points=np.vstack(points), labels=labels, name=f"ring-blobs-{seed}")


def brute_force_accuracy(confusion: np.ndarray) -> float:
    """Best one-to-one cluster/class matching by trying every injection.

    Exponential in min(rows, cols); intended for small cross-checks only.
    """
    confusion = np.asarray(confusion)
    n_clusters, n_classes = confusion.shape
    total = confusion.sum()
    best = 0
    if n_clusters <= n_classes:
        for perm in itertools.permutations(range(n_classes), n_clusters):
            best = max(best, sum(confusion[c, perm[c]] for c in range(n_clusters)))
    else:
        for perm in itertools.permutations(range(n_clusters), n_classes):
            best = max(best, sum(confusion[perm[l], l] for l in range(n_classes)))
    return best / total


# ----------------------------------------------------------- real datasets


@pytest.fixture(scope="session")
def iris_dataset() -> Dataset:
    from sklearn.datasets import load_iris

    raw = load_iris()
    return Dataset(
        points=raw.data.astype(float),
        labels=[str(t) for t in raw.target],
        name="iris",
    )


@pytest.fixture(scope="session")
def wine_dataset() -> Dataset:
    from sklearn.datasets import load_wine

    raw = load_wine()
    return Dataset(
        points=raw.data.astype(float),
        labels=[str(t) for t in raw.target],
        name="wine",
    )


@pytest.fixture(scope="session")
def iris_csv(tmp_path_factory, iris_dataset) -> Path:
    """The iris table written out as a label-last CSV, for CLI tests."""
    path = tmp_path_factory.mktemp("data") / "iris.csv"
    rows = []
    for x, label in zip(iris_dataset.points, iris_dataset.labels):
        rows.append(",".join(repr(float(v)) for v in x) + f",{label}")
    path.write_text("\n".join(rows) + "\n")
    return path


def load_benchmark_or_skip(name: str) -> Dataset:
    """Fetch one of the prepared benchmark CSVs, skipping when absent.

    The files are produced by scripts/fetch_uci_datasets.py (features
    first, class label last, '?' for missing cells).
    """
    path = DATA_DIR / f"{name}.csv"
    if not path.exists():
        pytest.skip(
            f"{name} data not found at {path}; run scripts/fetch_uci_datasets.py "
            "on a networked machine to download and prepare it"
        )
    dataset = load_csv(path, label_column=-1)
    return Dataset(points=dataset.points, labels=dataset.labels, name=name)

"""Dataset loading, cleaning, and distance computation.

A dataset is a plain numeric feature matrix with optional text class
labels. Cells equal to a configurable missing token are kept as NaN
until :func:`impute_missing` fills them with seeded uniform draws over
the observed per-feature range. Features are usually rescaled to the
unit interval with :func:`normalize_minmax` before any distances are
taken. Distances default to the Euclidean metric; any callable mapping
two feature vectors to a nonnegative float can be plugged in instead.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.spatial.distance import cdist

DistanceFn = Callable[[np.ndarray, np.ndarray], float]


class ParseError(ValueError):
    """A dataset file could not be parsed."""


class ImputationError(ValueError):
    """Missing cells could not be filled."""


@dataclass
class Dataset:
    """A loaded point set.

    Attributes:
        points: (N, m) float array; NaN marks a missing cell until imputation.
        labels: optional list of N class labels (kept as text).
        feature_ranges: (m, 2) array of observed per-feature (min, max),
            computed over non-missing cells.
        name: short identifier, usually the source file stem.
    """

    points: np.ndarray
    labels: list[str] | None = None
    feature_ranges: np.ndarray | None = None
    name: str = ""

    def __post_init__(self) -> None:
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2:
            raise ValueError("points must be a 2-d array")
        if self.feature_ranges is None:
            self.feature_ranges = _observed_ranges(self.points)

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def n_features(self) -> int:
        return self.points.shape[1]

    @property
    def missing_mask(self) -> np.ndarray:
        return np.isnan(self.points)


def _observed_ranges(points: np.ndarray) -> np.ndarray:
    with warnings.catch_warnings():
        # all-NaN columns are legal here; impute_missing rejects them later
        warnings.simplefilter("ignore", RuntimeWarning)
        lo = np.nanmin(points, axis=0)
        hi = np.nanmax(points, axis=0)
    return np.stack([lo, hi], axis=1)


def _parse_cell(text: str, missing_token: str, where: str) -> float:
    text = text.strip()
    if text == missing_token:
        return math.nan
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"{where}: cannot parse {text!r} as a number") from None
    if not math.isfinite(value):
        raise ParseError(f"{where}: non-finite value {text!r}")
    return value


def load_csv(
    path: str | Path,
    label_column: int | str | None = None,
    missing_token: str = "?",
    delimiter: str = ",",
    has_header: bool = False,
) -> Dataset:
    """Read a delimiter-separated numeric file into a Dataset.

    Args:
        path: file to read.
        label_column: column holding class labels, as a zero-based index
            (negative counts from the end) or, when ``has_header`` is set,
            a column name. ``None`` means the file is all features.
        missing_token: cell text treated as a missing value.
        delimiter: field separator.
        has_header: skip the first row and use it for column names.

    Raises:
        ParseError: ragged rows, unparseable cells, or an empty file.
    """
    path = Path(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh, delimiter=delimiter))
    rows = [row for row in rows if row]  # drop blank lines

    header: list[str] | None = None
    if has_header:
        if not rows:
            raise ParseError(f"{path}: empty file")
        header = [cell.strip() for cell in rows[0]]
        rows = rows[1:]
    if not rows:
        raise ParseError(f"{path}: no data rows")

    n_cols = len(rows[0])
    label_idx: int | None = None
    if label_column is not None:
        if isinstance(label_column, str):
            if header is None:
                raise ParseError(
                    f"{path}: label column {label_column!r} given by name but file has no header"
                )
            try:
                label_idx = header.index(label_column)
            except ValueError:
                raise ParseError(f"{path}: no column named {label_column!r}") from None
        else:
            label_idx = int(label_column)
            if label_idx < 0:
                label_idx += n_cols
            if not 0 <= label_idx < n_cols:
                raise ParseError(f"{path}: label column {label_column} out of range")
    feature_idx = [j for j in range(n_cols) if j != label_idx]
    if not feature_idx:
        raise ParseError(f"{path}: no feature columns")

    points = np.empty((len(rows), len(feature_idx)))
    labels: list[str] | None = [] if label_idx is not None else None
    first_line = 2 if has_header else 1
    for i, row in enumerate(rows):
        line = first_line + i
        if len(row) != n_cols:
            raise ParseError(f"{path}: row {line}: expected {n_cols} columns, got {len(row)}")
        for out_j, j in enumerate(feature_idx):
            points[i, out_j] = _parse_cell(row[j], missing_token, f"{path}: row {line}, column {j}")
        if labels is not None:
            labels.append(row[label_idx].strip())

    return Dataset(points=points, labels=labels, name=path.stem)


def impute_missing(dataset: Dataset, seed: int) -> Dataset:
    """Fill missing cells with uniform draws over each feature's observed range.

    Draws are taken feature by feature, in ascending row order, from a
    generator seeded with ``seed``, so the result is reproducible. A
    dataset without missing cells is returned as an identical copy for
    any seed.

    Raises:
        ImputationError: a feature has no observed values to define a range.
    """
    missing = dataset.missing_mask
    points = dataset.points.copy()
    if not missing.any():
        return replace(dataset, points=points)

    dead = np.flatnonzero(missing.all(axis=0))
    if dead.size:
        raise ImputationError(
            f"feature(s) {dead.tolist()} have no observed values; cannot impute"
        )

    rng = np.random.default_rng(seed)
    for j in range(dataset.n_features):
        rows = np.flatnonzero(missing[:, j])
        if rows.size:
            lo, hi = dataset.feature_ranges[j]
            points[rows, j] = rng.uniform(lo, hi, size=rows.size)
    return replace(dataset, points=points)


def normalize_minmax(dataset: Dataset) -> Dataset:
    """Affinely map every feature onto [0, 1]; constant features go to 0.

    Applying it twice gives the same result as applying it once.
    """
    points = dataset.points
    if not np.isfinite(points).all():
        raise ValueError("dataset has non-finite values; impute missing cells first")
    lo = points.min(axis=0)
    span = points.max(axis=0) - lo
    constant = span == 0
    scaled = (points - lo) / np.where(constant, 1.0, span)
    scaled[:, constant] = 0.0
    return replace(dataset, points=scaled, feature_ranges=_observed_ranges(scaled))


def pairwise_distances(positions: np.ndarray, metric: DistanceFn | None = None) -> np.ndarray:
    """Symmetric (N, N) distance matrix with an exactly zero diagonal.

    ``metric`` defaults to Euclidean; a custom callable is evaluated once
    per unordered pair and mirrored.
    """
    pos = np.asarray(positions, dtype=float)
    if pos.ndim != 2:
        raise ValueError("positions must be a 2-d array")
    if not np.isfinite(pos).all():
        raise ValueError("positions must be finite")
    n = pos.shape[0]
    if metric is None:
        return cdist(pos, pos)
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d = float(metric(pos[i], pos[j]))
            if d < 0:
                raise ValueError(f"metric returned a negative distance for pair ({i}, {j})")
            out[i, j] = out[j, i] = d
    return out

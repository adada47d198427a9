"""Dataset ingestion, z-score standardization, stratified splits and CV folds.

Labels are always mapped to +1 (target / normal class) and -1 (everything
else). All randomness goes through ``numpy.random.default_rng(seed)`` so a
given ``(seed, input)`` pair always yields the same partition.
"""

from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from .errors import (
    DimensionMismatch,
    EmptyFile,
    MalformedRow,
    NoTargetSamples,
    NonNumericFeature,
    TooFewSamples,
    UnknownTargetLabel,
)

__all__ = [
    "AUTO",
    "Dataset",
    "StandardizerState",
    "SplitSpec",
    "load_csv",
    "fit_standardizer",
    "apply_standardizer",
    "invert_standardizer",
    "split_train_test",
    "target_only",
    "make_folds",
    "read_feature_csv",
]

AUTO = "AUTO"


@dataclass(frozen=True)
class Dataset:
    """Feature matrix with +1/-1 labels.

    Attributes:
        X: ``(N, m)`` float matrix.
        y: length-``N`` int vector, +1 for the target class, -1 otherwise.
        name: identifier, usually the file stem.
        target_label: original label string mapped to +1, if known.
    """

    X: NDArray[np.float64]
    y: NDArray[np.int64]
    name: str = "dataset"
    target_label: str | None = None

    def __post_init__(self) -> None:
        X = np.asarray(self.X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        y = np.asarray(self.y, dtype=np.int64).reshape(-1)
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise DimensionMismatch(f"X must be a non-empty 2-D matrix, got shape {X.shape}")
        if X.shape[0] != y.shape[0]:
            raise DimensionMismatch(f"X has {X.shape[0]} rows but y has {y.shape[0]} labels")
        if not np.all((y == 1) | (y == -1)):
            raise ValueError("labels must be +1 or -1")
        if not np.all(np.isfinite(X)):
            raise NonNumericFeature("X contains NaN or infinite entries")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def n_samples(self) -> int:
        return self.X.shape[0]

    @property
    def feature_count(self) -> int:
        return self.X.shape[1]

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx, dtype=np.int64)
        return Dataset(self.X[idx], self.y[idx], self.name, self.target_label)


@dataclass(frozen=True)
class StandardizerState:
    mean: NDArray[np.float64]
    std: NDArray[np.float64]

    @classmethod
    def identity(cls, m: int) -> "StandardizerState":
        return cls(np.zeros(m), np.ones(m))

    @property
    def feature_count(self) -> int:
        return self.mean.shape[0]


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.7
    seed: int = 0
    folds: int = 5

    def __post_init__(self) -> None:
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must lie in (0, 1)")
        if self.folds < 2:
            raise ValueError("folds must be >= 2")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


def _is_number(text: str) -> bool:
    try:
        value = float(text)
    except ValueError:
        return False
    return math.isfinite(value)


def _has_header(rows: list[list[str]]) -> bool:
    first, rest = rows[0], rows[1:]
    if not rest:
        return False
    # Numeric labels everywhere except row 1.
    if not _is_number(first[-1]) and all(_is_number(r[-1]) for r in rest):
        return True
    # String labels: fall back to the feature columns.
    return all(not _is_number(c) for c in first[:-1]) and all(_is_number(c) for c in rest[0][:-1])


def load_csv(path: str | Path, target_label: str = AUTO, name: str | None = None) -> Dataset:
    """Read a comma-delimited file whose last column is the class label.

    With ``target_label=AUTO`` the most frequent label becomes the target
    class; ties go to the lexicographically smaller label.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [[c.strip() for c in row] for row in csv.reader(fh)]
    rows = [r for r in rows if any(c for c in r)]
    if not rows:
        raise EmptyFile(f"{path}: no rows")

    width = len(rows[0])
    for lineno, row in enumerate(rows, start=1):
        if len(row) != width:
            raise MalformedRow(f"{path}: row {lineno} has {len(row)} columns, expected {width}")
    if width < 2:
        raise MalformedRow(f"{path}: need at least one feature column and a label column")

    if _has_header(rows):
        rows = rows[1:]

    X = np.empty((len(rows), width - 1))
    labels = []
    for i, row in enumerate(rows):
        for j, cell in enumerate(row[:-1]):
            if not _is_number(cell):
                raise NonNumericFeature(f"{path}: row {i + 1}, column {j + 1}: {cell!r}")
            X[i, j] = float(cell)
        if row[-1] == "":
            raise MalformedRow(f"{path}: row {i + 1} has an empty label")
        labels.append(row[-1])

    if target_label == AUTO:
        counts = Counter(labels)
        target = min(counts, key=lambda lab: (-counts[lab], lab))
    else:
        target = str(target_label)
        if target not in labels:
            raise UnknownTargetLabel(f"{path}: label {target!r} not present")

    y = np.where(np.array(labels) == target, 1, -1)
    return Dataset(X, y, name if name is not None else path.stem, target)


def fit_standardizer(X_train) -> StandardizerState:
    X_train = np.atleast_2d(np.asarray(X_train, dtype=float))
    return StandardizerState(X_train.mean(axis=0), X_train.std(axis=0))


def _check_columns(state: StandardizerState, X: NDArray) -> None:
    if X.ndim != 2 or X.shape[1] != state.feature_count:
        raise DimensionMismatch(
            f"expected {state.feature_count} features, got array of shape {X.shape}"
        )


def apply_standardizer(state: StandardizerState, X) -> NDArray[np.float64]:
    """``(x - mean) / std`` per column; zero-variance columns become 0."""
    X = np.asarray(X, dtype=float)
    _check_columns(state, X)
    constant = state.std == 0
    scale = np.where(constant, 1.0, state.std)
    out = (X - state.mean) / scale
    out[:, constant] = 0.0
    return out


def invert_standardizer(state: StandardizerState, Z) -> NDArray[np.float64]:
    Z = np.asarray(Z, dtype=float)
    _check_columns(state, Z)
    return Z * state.std + state.mean


def _train_count(fraction: float, n: int) -> int:
    # 0.7 * 10 == 7.000000000000001 in binary; round before taking the ceiling.
    return math.ceil(round(fraction * n, 9))


def split_train_test(d: Dataset, spec: SplitSpec = SplitSpec()) -> tuple[Dataset, Dataset]:
    """Stratified, seeded split keeping ``ceil(fraction * N_c)`` of each class for training."""
    if d.n_samples < 2:
        raise TooFewSamples("need at least 2 samples to split")
    rng = np.random.default_rng(spec.seed)
    train_idx, test_idx = [], []
    for label in (1, -1):
        members = np.flatnonzero(d.y == label)
        if members.size == 0:
            continue
        shuffled = rng.permutation(members)
        n_train = _train_count(spec.train_fraction, members.size)
        if n_train == 0 or n_train == members.size:
            raise TooFewSamples(
                f"class {label:+d} has {members.size} samples; fraction "
                f"{spec.train_fraction} leaves {n_train} train / {members.size - n_train} test"
            )
        train_idx.append(shuffled[:n_train])
        test_idx.append(shuffled[n_train:])
    return d.subset(np.sort(np.concatenate(train_idx))), d.subset(np.sort(np.concatenate(test_idx)))


def target_only(d: Dataset) -> Dataset:
    keep = np.flatnonzero(d.y == 1)
    if keep.size == 0:
        raise NoTargetSamples(f"{d.name}: no samples with label +1")
    return d.subset(keep)


def make_folds(n: int, k: int = 5, seed: int = 0) -> list[NDArray[np.int64]]:
    """Shuffle ``range(n)`` and cut it into ``k`` folds whose sizes differ by at most one."""
    if k < 2:
        raise TooFewSamples("k must be >= 2")
    if n < k:
        raise TooFewSamples(f"cannot make {k} folds from {n} samples")
    perm = np.random.default_rng(seed).permutation(n)
    return [np.sort(f) for f in np.array_split(perm, k)]


def read_feature_csv(path: str | Path, drop_last: bool = False) -> NDArray[np.float64]:
    """Read an unlabelled query matrix; a non-numeric first row is a header.

    Returns a ``(0, 0)`` array for an empty or header-only file.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [[c.strip() for c in row] for row in csv.reader(fh)]
    rows = [r for r in rows if any(c for c in r)]
    if rows and not all(_is_number(c) for c in (rows[0][:-1] if drop_last else rows[0])):
        rows = rows[1:]
    if not rows:
        return np.zeros((0, 0))
    if drop_last:
        rows = [r[:-1] for r in rows]
    width = len(rows[0])
    X = np.empty((len(rows), width))
    for i, row in enumerate(rows):
        if len(row) != width:
            raise MalformedRow(f"{path}: row {i + 1} has {len(row)} columns, expected {width}")
        for j, cell in enumerate(row):
            if not _is_number(cell):
                raise NonNumericFeature(f"{path}: row {i + 1}, column {j + 1}: {cell!r}")
            X[i, j] = float(cell)
    return X

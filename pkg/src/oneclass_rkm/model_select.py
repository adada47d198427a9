"""Grid search with k-fold cross-validation under the one-class protocol.

Each fold fits on the *target* rows of the remaining folds only and is
validated on every row of the held-out fold, negatives included. When the
training partition holds no negatives at all, the same loop degenerates to
the acceptance rate on held-out targets; ``CvResult.criterion`` says which
one was used.
"""

from __future__ import annotations

import csv
import itertools
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from numpy.typing import NDArray

from . import lsocsvm, ocrkm
from ._base import accuracy_score, sign_labels
from .data_io import Dataset, apply_standardizer, fit_standardizer, make_folds, target_only
from .errors import EmptyGrid, OneClassError, SingularSystem
from .kernel import KernelSpec, cross_gram, gram

log = logging.getLogger(__name__)

__all__ = [
    "MODEL_KINDS",
    "GridSpec",
    "CvRow",
    "CvResult",
    "grid_search",
    "sensitivity_grid",
    "write_sensitivity_csv",
    "write_cv_table",
]

MODEL_KINDS = ("ocrkm", "lsocsvm")

TWO_CLASS = "two_class_accuracy"
TARGET_ONLY = "target_acceptance"


def _decades() -> list[float]:
    return [10.0**p for p in range(-5, 6)]


def _octaves() -> list[float]:
    return [2.0**p for p in range(-5, 6)]


@dataclass(frozen=True)
class GridSpec:
    gamma_grid: Sequence[float] = field(default_factory=_decades)
    eta_grid: Sequence[float] = field(default_factory=_decades)
    sigma_grid: Sequence[float] = field(default_factory=_octaves)
    C_grid: Sequence[float] = field(default_factory=_decades)

    def __post_init__(self) -> None:
        for name in ("gamma_grid", "eta_grid", "sigma_grid", "C_grid"):
            values = tuple(float(v) for v in getattr(self, name))
            if not values:
                raise EmptyGrid(f"{name} is empty")
            if not all(v > 0 and math.isfinite(v) for v in values):
                raise ValueError(f"{name} values must be positive and finite")
            object.__setattr__(self, name, values)

    def configs(self, model_kind: str) -> list[dict[str, float]]:
        """Cartesian grid in listing order (first-listed config first)."""
        if model_kind == "ocrkm":
            return [
                {"eta": e, "gamma": g, "sigma": s}
                for e, g, s in itertools.product(self.eta_grid, self.gamma_grid, self.sigma_grid)
            ]
        if model_kind == "lsocsvm":
            return [{"C": c, "sigma": s} for c, s in itertools.product(self.C_grid, self.sigma_grid)]
        raise ValueError(f"unknown model kind {model_kind!r}; expected one of {MODEL_KINDS}")


@dataclass(frozen=True)
class CvRow:
    config: dict[str, float]
    mean_accuracy: float
    std_accuracy: float
    failed_folds: int = 0


@dataclass(frozen=True)
class CvResult:
    best_config: dict[str, float]
    cv_table: list[CvRow]
    seed: int
    model_kind: str
    criterion: str
    folds: int

    @property
    def best_row(self) -> CvRow:
        return next(r for r in self.cv_table if r.config == self.best_config)


def _tie_key(model_kind: str, row: CvRow, position: int) -> tuple:
    # Equal means: larger eta, larger gamma, smaller sigma, then grid order.
    cfg = row.config
    if model_kind == "ocrkm":
        return (-row.mean_accuracy, -cfg["eta"], -cfg["gamma"], cfg["sigma"], position)
    return (-row.mean_accuracy, -cfg["C"], cfg["sigma"], position)


def _solve(model_kind: str, K: NDArray, cfg: dict[str, float]) -> tuple[NDArray, float, float]:
    """Return ``(coefficients, rho, scale)`` for one configuration."""
    if model_kind == "ocrkm":
        hyper = ocrkm.OcrkmHyperparams(cfg["gamma"], cfg["eta"])
        H, rho = ocrkm.train_from_gram(K, hyper)
        return H, rho, 1.0 / hyper.gamma
    alpha, rho = lsocsvm.train_from_gram(K, cfg["C"])
    return alpha, rho, 1.0


def grid_search(
    train: Dataset,
    grid: GridSpec | None = None,
    model_kind: str = "ocrkm",
    k: int = 5,
    seed: int = 0,
) -> CvResult:
    """Pick the configuration with the highest mean k-fold validation accuracy.

    A configuration whose fit raises SingularSystem (or has no target rows to
    fit on) scores 0 on that fold instead of aborting the search.
    """
    grid = grid if grid is not None else GridSpec()
    configs = grid.configs(model_kind)
    folds = make_folds(train.n_samples, k, seed)
    criterion = TWO_CLASS if np.any(train.y == -1) else TARGET_ONLY

    # Per fold: standardized fit rows, validation rows, labels.
    prepared = []
    for i, val_idx in enumerate(folds):
        rest = np.concatenate([f for j, f in enumerate(folds) if j != i])
        fit_idx = rest[train.y[rest] == 1]
        if fit_idx.size == 0:
            prepared.append(None)
            continue
        state = fit_standardizer(train.X[fit_idx])
        prepared.append(
            (
                apply_standardizer(state, train.X[fit_idx]),
                apply_standardizer(state, train.X[val_idx]),
                train.y[val_idx],
            )
        )

    kernels: dict[tuple[float, int], tuple[NDArray, NDArray]] = {}

    def fold_kernels(sigma: float, i: int) -> tuple[NDArray, NDArray]:
        key = (sigma, i)
        if key not in kernels:
            Z_fit, Z_val, _ = prepared[i]
            spec = KernelSpec.gaussian(sigma)
            kernels[key] = (gram(Z_fit, spec).K, cross_gram(Z_fit, Z_val, spec))
        return kernels[key]

    rows: list[CvRow] = []
    for cfg in configs:
        scores = []
        failed = 0
        for i in range(k):
            if prepared[i] is None:
                scores.append(0.0)
                failed += 1
                continue
            K, Kq = fold_kernels(cfg["sigma"], i)
            try:
                coef, rho, scale = _solve(model_kind, K, cfg)
            except SingularSystem:
                scores.append(0.0)
                failed += 1
                continue
            pred = sign_labels(scale * (coef @ Kq) - rho)
            scores.append(accuracy_score(prepared[i][2], pred))
        arr = np.asarray(scores)
        rows.append(CvRow(dict(cfg), float(arr.mean()), float(arr.std()), failed))

    best_pos = min(range(len(rows)), key=lambda p: _tie_key(model_kind, rows[p], p))
    log.debug("grid search (%s, %s): best %s", model_kind, criterion, rows[best_pos])
    return CvResult(dict(rows[best_pos].config), rows, seed, model_kind, criterion, k)


def sensitivity_grid(
    train: Dataset,
    test: Dataset,
    eta_grid: Sequence[float],
    gamma_grid: Sequence[float],
    sigma: float,
) -> NDArray[np.float64]:
    """Test accuracy of OCRKM for every ``(eta, gamma)`` pair at a fixed bandwidth.

    Rows follow ``eta_grid``, columns ``gamma_grid``. Failed fits are NaN.
    """
    if len(eta_grid) == 0 or len(gamma_grid) == 0:
        raise EmptyGrid("eta_grid and gamma_grid must be non-empty")
    targets = target_only(train)
    state = fit_standardizer(targets.X)
    spec = KernelSpec.gaussian(sigma)
    Z = apply_standardizer(state, targets.X)
    K = gram(Z, spec).K
    Kq = cross_gram(Z, apply_standardizer(state, test.X), spec)
    out = np.full((len(eta_grid), len(gamma_grid)), np.nan)
    for i, eta in enumerate(eta_grid):
        for j, gamma in enumerate(gamma_grid):
            try:
                H, rho = ocrkm.train_from_gram(K, ocrkm.OcrkmHyperparams(gamma, eta))
            except OneClassError:
                continue
            out[i, j] = accuracy_score(test.y, sign_labels((H @ Kq) / gamma - rho))
    return out


def _fmt(value: float) -> str:
    return repr(float(value))


def write_sensitivity_csv(path: str | Path, eta_grid, gamma_grid, acc: NDArray) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["eta\\gamma"] + [_fmt(g) for g in gamma_grid])
        for eta, row in zip(eta_grid, acc):
            w.writerow([_fmt(eta)] + ["FAILED" if np.isnan(v) else _fmt(v) for v in row])


def write_cv_table(path: str | Path, result: CvResult) -> None:
    keys = list(result.cv_table[0].config)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(keys + ["mean_accuracy", "std_accuracy", "failed_folds"])
        for row in result.cv_table:
            w.writerow(
                [_fmt(row.config[c]) for c in keys]
                + [_fmt(row.mean_accuracy), _fmt(row.std_accuracy), row.failed_folds]
            )


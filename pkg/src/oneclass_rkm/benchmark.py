"""Split / tune / test pipeline over a collection of datasets."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import lsocsvm, ocrkm
from .data_io import Dataset, SplitSpec, fit_standardizer, split_train_test, target_only
from .errors import OneClassError
from .kernel import KernelSpec
from .model_select import CvResult, GridSpec, grid_search

log = logging.getLogger(__name__)

__all__ = ["RunOutcome", "BenchmarkResult", "fit_final", "evaluate_once", "run_benchmark"]


@dataclass(frozen=True)
class RunOutcome:
    accuracy: float
    cv: CvResult


def fit_final(train: Dataset, model_kind: str, config: dict[str, float]):
    """Standardize on the target rows of ``train`` and fit on those rows."""
    targets = target_only(train)
    state = fit_standardizer(targets.X)
    spec = KernelSpec.gaussian(config["sigma"])
    if model_kind == "ocrkm":
        hyper = ocrkm.OcrkmHyperparams(config["gamma"], config["eta"])
        return ocrkm.train(targets.X, hyper, spec, state)
    return lsocsvm.train(targets.X, config["C"], spec, state)


def evaluate_once(
    dataset: Dataset,
    model_kind: str,
    grid: GridSpec,
    folds: int = 5,
    seed: int = 0,
    train_fraction: float = 0.7,
) -> RunOutcome:
    train, test = split_train_test(dataset, SplitSpec(train_fraction, seed, folds))
    cv = grid_search(train, grid, model_kind, folds, seed)
    model = fit_final(train, model_kind, cv.best_config)
    return RunOutcome(model.accuracy(test), cv)


@dataclass
class BenchmarkResult:
    model_names: list[str]
    dataset_names: list[str] = field(default_factory=list)
    mean: list[list[float]] = field(default_factory=list)
    std: list[list[float]] = field(default_factory=list)
    dropped: dict[str, str] = field(default_factory=dict)
    targets: dict[str, str | None] = field(default_factory=dict)

    def write_csv(self, path: str | Path) -> None:
        """Accuracy percentages; ``<model>_std`` columns are skipped by the stats reader."""
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            header = ["dataset"] + self.model_names + [f"{m}_std" for m in self.model_names]
            w.writerow(header)
            for name, mu, sd in zip(self.dataset_names, self.mean, self.std):
                w.writerow([name] + [repr(v) for v in mu] + [repr(v) for v in sd])


def run_benchmark(
    datasets: Sequence[Dataset],
    model_kinds: Sequence[str],
    grid: GridSpec | None = None,
    reps: int = 5,
    seed: int = 0,
    folds: int = 5,
    train_fraction: float = 0.7,
) -> BenchmarkResult:
    """Accuracy (%) mean and population std over ``reps`` seeded repetitions.

    Repetition ``r`` uses seed ``seed + r`` for both the split and the folds.
    A dataset on which any run fails is logged and left out of the table.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    grid = grid if grid is not None else GridSpec()
    result = BenchmarkResult(list(model_kinds))
    for d in datasets:
        mean_row, std_row = [], []
        try:
            for kind in model_kinds:
                accs = [
                    100.0 * evaluate_once(d, kind, grid, folds, seed + r, train_fraction).accuracy
                    for r in range(reps)
                ]
                mean_row.append(float(np.mean(accs)))
                std_row.append(float(np.std(accs)))
        except (OneClassError, ValueError) as exc:
            log.warning("dropping dataset %s: %s", d.name, exc)
            result.dropped[d.name] = f"{type(exc).__name__}: {exc}"
            continue
        result.dataset_names.append(d.name)
        result.mean.append(mean_row)
        result.std.append(std_row)
        result.targets[d.name] = d.target_label
    return result

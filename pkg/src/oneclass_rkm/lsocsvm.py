"""Least-squares one-class SVM baseline.

The Wolfe dual is the bordered system

    [[K + I / C,  1_N],   [ alpha]   [0_N]
     [1_N^T,        0]] @ [  -rho] = [ 1 ]

and a query is scored by ``f(x) = sum_i alpha_i K(x_i, x) - rho``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from ._base import KernelExpansionModel, read_model_document
from ._saddle import solve_bordered
from .data_io import Dataset, StandardizerState, apply_standardizer
from .errors import DimensionMismatch
from .kernel import KernelSpec, gram

__all__ = [
    "LsocsvmModel",
    "train",
    "train_from_gram",
    "decision_scores",
    "predict",
    "accuracy",
    "load_model",
]


@dataclass(frozen=True, eq=False)
class LsocsvmModel(KernelExpansionModel):
    alpha: NDArray[np.float64]
    rho: float
    C: float
    X_train: NDArray[np.float64]
    spec: KernelSpec
    standardizer: StandardizerState

    kind = "lsocsvm"

    def _coefficients(self) -> NDArray[np.float64]:
        return self.alpha

    def _params_to_dict(self) -> dict:
        return {"C": self.C, "alpha": self.alpha.tolist()}

    @classmethod
    def _from_params(cls, doc: dict, common: dict) -> "LsocsvmModel":
        return cls(alpha=np.asarray(doc["alpha"], dtype=float), C=float(doc["C"]), **common)


def train_from_gram(K: NDArray, C: float) -> tuple[NDArray[np.float64], float]:
    if not C > 0:
        raise ValueError(f"C must be positive, got {C}")
    n = K.shape[0]
    alpha, neg_rho = solve_bordered(K + np.eye(n) / C, 1.0)
    return alpha, -neg_rho


def train(
    X,
    C: float,
    spec: KernelSpec,
    standardizer: StandardizerState | None = None,
) -> LsocsvmModel:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise DimensionMismatch(f"need a non-empty 2-D training matrix, got shape {X.shape}")
    if standardizer is None:
        standardizer = StandardizerState.identity(X.shape[1])
    Z = apply_standardizer(standardizer, X)
    alpha, rho = train_from_gram(gram(Z, spec).K, C)
    return LsocsvmModel(alpha, rho, float(C), Z, spec, standardizer)


def decision_scores(model: LsocsvmModel, X_query) -> NDArray[np.float64]:
    return model.decision_scores(X_query)


def predict(model: LsocsvmModel, X_query) -> NDArray[np.int64]:
    return model.predict(X_query)


def accuracy(model: LsocsvmModel, test: Dataset) -> float:
    return model.accuracy(test)


def load_model(path: str | Path) -> LsocsvmModel:
    return LsocsvmModel.from_dict(read_model_document(path))

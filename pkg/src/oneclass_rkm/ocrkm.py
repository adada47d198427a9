"""One-class restricted kernel machine.

Training solves the bordered linear system

    [[K / gamma + eta * I,  -1_N],   [H  ]   [0_N]
     [1_N^T,                   0]] @ [rho] = [ 1 ]

for the hidden features ``H`` and the bias ``rho``. A query is scored by
``f(x) = (1/gamma) * sum_i H_i K(x_i, x) - rho`` and labelled ``+1`` when
``f(x) >= 0``.
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
    "OcrkmHyperparams",
    "OcrkmModel",
    "train",
    "train_from_gram",
    "decision_scores",
    "predict",
    "accuracy",
    "load_model",
]


@dataclass(frozen=True)
class OcrkmHyperparams:
    gamma: float = 1.0
    eta: float = 1.0

    def __post_init__(self) -> None:
        if not (self.gamma > 0 and self.eta > 0):
            raise ValueError(f"gamma and eta must be positive, got {self.gamma}, {self.eta}")


@dataclass(frozen=True, eq=False)
class OcrkmModel(KernelExpansionModel):
    H: NDArray[np.float64]
    rho: float
    hyper: OcrkmHyperparams
    X_train: NDArray[np.float64]
    spec: KernelSpec
    standardizer: StandardizerState

    kind = "ocrkm"

    def _coefficients(self) -> NDArray[np.float64]:
        return self.H

    def _scale(self) -> float:
        return 1.0 / self.hyper.gamma

    def _params_to_dict(self) -> dict:
        return {"gamma": self.hyper.gamma, "eta": self.hyper.eta, "H": self.H.tolist()}

    @classmethod
    def _from_params(cls, doc: dict, common: dict) -> "OcrkmModel":
        return cls(
            H=np.asarray(doc["H"], dtype=float),
            hyper=OcrkmHyperparams(float(doc["gamma"]), float(doc["eta"])),
            **common,
        )


def train_from_gram(K: NDArray, hyper: OcrkmHyperparams) -> tuple[NDArray[np.float64], float]:
    """Solve for ``(H, rho)`` given a precomputed training Gram matrix."""
    n = K.shape[0]
    A = K / hyper.gamma + hyper.eta * np.eye(n)
    return solve_bordered(A, -1.0)


def train(
    X,
    hyper: OcrkmHyperparams,
    spec: KernelSpec,
    standardizer: StandardizerState | None = None,
) -> OcrkmModel:
    """Fit on the rows of ``X`` (all treated as target samples).

    ``standardizer`` is applied to ``X`` before training and stored with the
    model so that later queries can be passed in raw. When omitted, the
    identity transform is used and ``X`` is taken as already standardized.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise DimensionMismatch(f"need a non-empty 2-D training matrix, got shape {X.shape}")
    if standardizer is None:
        standardizer = StandardizerState.identity(X.shape[1])
    Z = apply_standardizer(standardizer, X)
    H, rho = train_from_gram(gram(Z, spec).K, hyper)
    return OcrkmModel(H, rho, hyper, Z, spec, standardizer)


def decision_scores(model: OcrkmModel, X_query) -> NDArray[np.float64]:
    return model.decision_scores(X_query)


def predict(model: OcrkmModel, X_query) -> NDArray[np.int64]:
    return model.predict(X_query)


def accuracy(model: OcrkmModel, test: Dataset) -> float:
    return model.accuracy(test)


def load_model(path: str | Path) -> OcrkmModel:
    return OcrkmModel.from_dict(read_model_document(path))

"""Behaviour shared by the two kernel-expansion one-class models."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from .data_io import Dataset, StandardizerState, apply_standardizer
from .errors import DimensionMismatch, EmptyTestSet, VersionMismatch
from .kernel import KernelSpec, cross_gram

FORMAT_VERSION = 1


def sign_labels(scores) -> NDArray[np.int64]:
    """+1 where the score is >= 0 (boundary points count as targets), else -1."""
    scores = np.asarray(scores, dtype=float)
    return np.where(scores >= 0.0, 1, -1).astype(np.int64)


def accuracy_score(y_true, y_pred) -> float:
    y_true = np.asarray(y_true).ravel()
    y_pred = np.asarray(y_pred).ravel()
    if y_true.size == 0:
        raise EmptyTestSet("cannot score an empty test set")
    if y_true.shape != y_pred.shape:
        raise DimensionMismatch(f"{y_true.size} labels vs {y_pred.size} predictions")
    return float(np.count_nonzero(y_true == y_pred)) / y_true.size


class KernelExpansionModel:
    """Mixin for models scoring ``f(x) = scale * sum_i c_i K(x_i, x) - rho``.

    Subclasses are frozen dataclasses providing ``X_train``, ``spec``,
    ``standardizer``, ``rho`` and the ``_coefficients``/``_scale`` hooks.
    """

    kind: str = ""

    X_train: NDArray[np.float64]
    spec: KernelSpec
    standardizer: StandardizerState
    rho: float

    def _coefficients(self) -> NDArray[np.float64]:
        raise NotImplementedError

    def _scale(self) -> float:
        return 1.0

    @property
    def feature_count(self) -> int:
        return self.X_train.shape[1]

    def _prepare(self, X_query) -> NDArray[np.float64]:
        X = np.asarray(X_query, dtype=float)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.ndim != 2 or (X.shape[0] > 0 and X.shape[1] != self.feature_count):
            raise DimensionMismatch(
                f"model expects {self.feature_count} features, got query of shape {X.shape}"
            )
        if X.shape[0] == 0:
            return np.zeros((0, self.feature_count))
        return apply_standardizer(self.standardizer, X)

    def decision_scores(self, X_query) -> NDArray[np.float64]:
        """Scores for raw (unstandardized) query rows; negative means outlier."""
        Z = self._prepare(X_query)
        Kq = cross_gram(self.X_train, Z, self.spec)
        return self._scale() * (self._coefficients() @ Kq) - self.rho

    def predict(self, X_query) -> NDArray[np.int64]:
        return sign_labels(self.decision_scores(X_query))

    def accuracy(self, test: Dataset) -> float:
        return accuracy_score(test.y, self.predict(test.X))

    # persistence

    def _params_to_dict(self) -> dict:
        raise NotImplementedError

    @classmethod
    def _from_params(cls, doc: dict, common: dict):
        raise NotImplementedError

    def to_dict(self) -> dict:
        doc = {
            "format_version": FORMAT_VERSION,
            "model": self.kind,
            "kernel": self.spec.to_dict(),
        }
        doc.update(self._params_to_dict())
        doc["rho"] = float(self.rho)
        doc["X_train"] = {
            "shape": list(self.X_train.shape),
            "data": self.X_train.ravel(order="C").tolist(),
        }
        doc["standardizer"] = {
            "mean": self.standardizer.mean.tolist(),
            "std": self.standardizer.std.tolist(),
        }
        return doc

    @classmethod
    def from_dict(cls, doc: dict):
        version = doc.get("format_version")
        if version != FORMAT_VERSION:
            raise VersionMismatch(f"unsupported model format_version {version!r}")
        if doc.get("model", cls.kind) != cls.kind:
            raise VersionMismatch(f"file holds a {doc.get('model')!r} model, not {cls.kind!r}")
        shape = tuple(int(s) for s in doc["X_train"]["shape"])
        common = {
            "X_train": np.asarray(doc["X_train"]["data"], dtype=float).reshape(shape),
            "spec": KernelSpec.from_dict(doc["kernel"]),
            "standardizer": StandardizerState(
                np.asarray(doc["standardizer"]["mean"], dtype=float),
                np.asarray(doc["standardizer"]["std"], dtype=float),
            ),
            "rho": float(doc["rho"]),
        }
        return cls._from_params(doc, common)

    def save(self, path: str | Path) -> None:
        # json writes floats with repr(), which round-trips every double exactly.
        Path(path).write_text(json.dumps(self.to_dict(), indent=1) + "\n", encoding="utf-8")


def read_model_document(path: str | Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))

"""Gaussian and linear kernels, Gram and cross-Gram matrices."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.spatial.distance import cdist

from .errors import DimensionMismatch

__all__ = ["KernelFamily", "KernelSpec", "GramMatrix", "kernel_value", "gram", "cross_gram"]


class KernelFamily(str, enum.Enum):
    GAUSSIAN = "gaussian"
    LINEAR = "linear"


@dataclass(frozen=True)
class KernelSpec:
    family: KernelFamily = KernelFamily.GAUSSIAN
    sigma: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", KernelFamily(self.family))
        if self.family is KernelFamily.GAUSSIAN and not self.sigma > 0:
            raise ValueError(f"Gaussian bandwidth must be positive, got {self.sigma}")

    @classmethod
    def gaussian(cls, sigma: float) -> "KernelSpec":
        return cls(KernelFamily.GAUSSIAN, float(sigma))

    @classmethod
    def linear(cls) -> "KernelSpec":
        return cls(KernelFamily.LINEAR, 1.0)

    def to_dict(self) -> dict:
        return {"family": self.family.value, "sigma": self.sigma}

    @classmethod
    def from_dict(cls, d: dict) -> "KernelSpec":
        return cls(KernelFamily(d["family"]), float(d["sigma"]))


@dataclass(frozen=True)
class GramMatrix:
    K: NDArray[np.float64]
    spec: KernelSpec

    @property
    def n(self) -> int:
        return self.K.shape[0]


def kernel_value(a, b, spec: KernelSpec) -> float:
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.shape != b.shape:
        raise DimensionMismatch(f"vectors of length {a.size} and {b.size}")
    if spec.family is KernelFamily.LINEAR:
        return float(a @ b)
    diff = a - b
    return float(np.exp(-(diff @ diff) / (2.0 * spec.sigma**2)))


def _as_matrix(X) -> NDArray[np.float64]:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got shape {X.shape}")
    return X


def _pairwise(A: NDArray, B: NDArray, spec: KernelSpec) -> NDArray[np.float64]:
    if spec.family is KernelFamily.LINEAR:
        return A @ B.T
    # cdist sums (a - b)^2 directly, avoiding the cancellation of |a|^2 + |b|^2 - 2ab.
    return np.exp(-cdist(A, B, "sqeuclidean") / (2.0 * spec.sigma**2))


def gram(X, spec: KernelSpec) -> GramMatrix:
    X = _as_matrix(X)
    K = _pairwise(X, X, spec)
    upper = np.triu(K)
    K = upper + np.triu(K, 1).T
    return GramMatrix(K, spec)


def cross_gram(X_train, X_query, spec: KernelSpec) -> NDArray[np.float64]:
    """Kernel values between every training row (rows) and query row (columns)."""
    X_train = _as_matrix(X_train)
    X_query = _as_matrix(X_query)
    if X_query.shape[0] == 0:
        return np.zeros((X_train.shape[0], 0))
    if X_train.shape[1] != X_query.shape[1]:
        raise DimensionMismatch(
            f"training rows have {X_train.shape[1]} features, queries have {X_query.shape[1]}"
        )
    return _pairwise(X_train, X_query, spec)

import math
from pathlib import Path

import numpy as np
import pytest

DATA_DIR = Path(__file__).parent / "data"

_ACCEPTANCE_LINES: list[str] = []


def gaussian_gram_loop(A, B, sigma):
    """Entry-by-entry kernel evaluation with the math module."""
    out = np.empty((len(A), len(B)))
    for i, a in enumerate(A):
        for j, b in enumerate(B):
            d2 = sum((float(p) - float(q)) ** 2 for p, q in zip(a, b))
            out[i, j] = math.exp(-d2 / (2.0 * sigma * sigma))
    return out


def inverse_oracle(A, border):
    """Solve the bordered system by forming the explicit inverse of the full matrix."""
    n = A.shape[0]
    M = np.block([
        [A, np.full((n, 1), float(border))],
        [np.ones((1, n)), np.zeros((1, 1))],
    ])
    rhs = np.concatenate([np.zeros(n), [1.0]])
    sol = np.linalg.inv(M) @ rhs
    return sol[:n], sol[n]


def blob_with_outliers(seed, n_in=200, n_out=20, m=2, min_dist=10.0):
    """Unit-variance Gaussian cluster plus outliers at least ``min_dist`` from its centre."""
    rng = np.random.default_rng(seed)
    inliers = rng.standard_normal((n_in, m))
    directions = rng.standard_normal((n_out, m))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    outliers = directions * rng.uniform(min_dist, min_dist + 2.0, (n_out, 1))
    X = np.vstack([inliers, outliers])
    y = np.concatenate([np.ones(n_in, dtype=int), -np.ones(n_out, dtype=int)])
    return X, y


@pytest.fixture
def acceptance_report():
    def record(criterion: str, passed: bool, detail: str = "") -> None:
        line = f"[{'PASS' if passed else 'FAIL'}] {criterion}" + (f": {detail}" if detail else "")
        _ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

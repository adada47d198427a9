"""Dense LU solve of the bordered systems used by both one-class models.

Both models reduce to

    [[A,    c * 1_N],     [u]     [0_N]
     [1_N^T,      0]]  @  [t]  =  [ 1 ]

with ``A`` an ``N x N`` block and ``c`` a scalar border sign.
"""

from __future__ import annotations

import warnings

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import LinAlgWarning, lapack, lu_factor, lu_solve

from .errors import SingularSystem

MAX_CONDITION = 1e14


def bordered_matrix(A: NDArray, border: float) -> NDArray[np.float64]:
    n = A.shape[0]
    M = np.zeros((n + 1, n + 1))
    M[:n, :n] = A
    M[:n, n] = border
    M[n, :n] = 1.0
    return M


def solve_bordered(A: NDArray, border: float) -> tuple[NDArray[np.float64], float]:
    """Return ``(u, t)`` solving the bordered system by LU with partial pivoting.

    Raises SingularSystem when a pivot vanishes or the reciprocal 1-norm
    condition estimate falls below ``1 / MAX_CONDITION``.
    """
    M = bordered_matrix(A, border)
    if not np.all(np.isfinite(M)):
        raise SingularSystem("system matrix has non-finite entries")
    anorm = np.abs(M).sum(axis=0).max()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(M, check_finite=False)
    if np.any(np.diag(lu) == 0.0):
        raise SingularSystem("LU factorization hit a zero pivot")
    rcond, info = lapack.dgecon(lu, anorm, norm="1")
    if info != 0 or not rcond * MAX_CONDITION > 1.0:
        raise SingularSystem(f"condition estimate {1.0 / max(rcond, 1e-300):.3g} exceeds {MAX_CONDITION:g}")
    rhs = np.zeros(M.shape[0])
    rhs[-1] = 1.0
    sol = lu_solve((lu, piv), rhs, check_finite=False)
    if not np.all(np.isfinite(sol)):
        raise SingularSystem("solution has non-finite entries")
    return sol[:-1], float(sol[-1])

"""Independent reference computations used by the tests.

Nothing here calls into chainardl.
"""

from __future__ import annotations

import mpmath
import numpy as np


def normal_equations_mp(X, y, dps: int = 50) -> np.ndarray:
    """Solve (X'X) b = X'y at ``dps`` decimal digits."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    with mpmath.workdps(dps):
        A = mpmath.matrix(X.tolist())
        v = mpmath.matrix(y.tolist())
        b = mpmath.lu_solve(A.T * A, A.T * v)
        return np.array([float(b[i]) for i in range(X.shape[1])])


def random_system(rng: np.random.Generator):
    """Random well-posed regression with n <= 200 and k <= 10."""
    k = int(rng.integers(1, 11))
    n = int(rng.integers(k + 5, 201))
    X = rng.normal(size=(n, k)) * rng.uniform(0.1, 10.0, size=k)
    if k > 1 and rng.random() < 0.5:
        X[:, 0] = 1.0
    y = X @ rng.normal(size=k) + rng.normal(size=n)
    return X, y

# optimization/simplex.py

"""
Euclidean projection onto C = {p : ||p||_1 = 1, 0 <= p <= 1}.

The projection is p = min(1, max(0, z - v*)), where the threshold v* is the
root of the residual g(v) = sum_j min(1, max(0, z_j - v)) - 1. g is continuous
and non-increasing in v, so bisection on [min(z) - 1, max(z)] finds it:
g(min(z) - 1) = N - 1 >= 0 and g(max(z)) = -1.
"""

import numpy as np

from prompt_learning_engine.models.constants import (
    BISECTION_MAX_ITER, BISECTION_RESIDUAL_TOL, BISECTION_WIDTH_TOL,
)
from prompt_learning_engine.models.errors import InvalidInputError


def _as_real_vector(z) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    if z.ndim != 1 or z.size == 0:
        raise InvalidInputError(f"expected a non-empty 1-D vector, got shape {z.shape}")
    if not np.all(np.isfinite(z)):
        raise InvalidInputError("vector contains NaN or Inf")
    return z


def residual(z: np.ndarray, v: float) -> float:
    """g(v) = sum_j min(1, max(0, z_j - v)) - 1."""
    return float(np.clip(z - v, 0.0, 1.0).sum() - 1.0)


def solve_threshold(z, tol: float = BISECTION_RESIDUAL_TOL) -> float:
    """
    Find v* with |g(v*)| <= tol by bisection.

    Stops when the residual is within `tol`, the bracket is narrower than
    1e-12, or after 200 halvings.
    """
    if not tol > 0:
        raise InvalidInputError(f"tol must be > 0, got {tol}")
    z = _as_real_vector(z)

    lo, hi = float(z.min()) - 1.0, float(z.max())
    if abs(residual(z, lo)) <= tol:
        return lo
    if abs(residual(z, hi)) <= tol:
        return hi

    mid = 0.5 * (lo + hi)
    for _ in range(BISECTION_MAX_ITER):
        mid = 0.5 * (lo + hi)
        r = residual(z, mid)
        if abs(r) <= tol:
            break
        # g is non-increasing: positive residual means the root lies to the right.
        if r > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < BISECTION_WIDTH_TOL:
            mid = 0.5 * (lo + hi)
            break
    return mid


def project(z, tol: float = BISECTION_RESIDUAL_TOL) -> np.ndarray:
    """Project a real vector onto the probability simplex."""
    z = _as_real_vector(z)
    v = solve_threshold(z, tol)
    p = np.clip(z - v, 0.0, 1.0)
    total = p.sum()
    if total != 1.0:
        p = p / total
    return p


def project_rows(matrix) -> np.ndarray:
    """Project every row of a 2-D array independently."""
    matrix = np.asarray(matrix, dtype=np.float64)
    return np.stack([project(row) for row in matrix])

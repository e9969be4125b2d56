"""Input validation helpers.

Small check_* utilities in the spirit of scikit-learn's validation module:
they coerce array-likes to float arrays of the right shape and raise early
with readable messages.
"""

from __future__ import annotations

import numpy as np

from .errors import EmptyInputError

UNIT_NORM_TOL = 1e-9


def as_float_matrix(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-d array, got ndim={arr.ndim}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise EmptyInputError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def as_float_vector(x, name: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a 1-d array, got ndim={arr.ndim}")
    if arr.shape[0] == 0:
        raise EmptyInputError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def check_unit_rows(mat: np.ndarray, name: str, tol: float = UNIT_NORM_TOL) -> np.ndarray:
    """Require rows within tol of unit length, then renormalize exactly."""
    norms = np.linalg.norm(mat, axis=1)
    bad = np.flatnonzero(np.abs(norms - 1.0) > tol)
    if bad.size:
        raise ValueError(
            f"{name} row {bad[0]} has norm {norms[bad[0]]:.12g}, expected a unit vector"
        )
    return mat / norms[:, None]


def check_lengths_match(a, b, name_a: str, name_b: str) -> None:
    if len(a) != len(b):
        raise ValueError(f"{name_a} has length {len(a)} but {name_b} has length {len(b)}")


def check_positive_weights(w: np.ndarray, name: str) -> None:
    if np.any(w <= 0):
        i = int(np.flatnonzero(w <= 0)[0])
        raise ValueError(f"{name}[{i}] must be strictly positive, got {w[i]!r}")

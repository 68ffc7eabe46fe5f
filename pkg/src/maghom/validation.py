"""Input validation helpers shared by the functional core and the estimators."""

from __future__ import annotations

import numpy as np

from .exceptions import DuplicatePoint

__all__ = ["check_point_array", "check_square_matrix", "check_nonempty_vector"]


def check_point_array(X, *, name="X", min_points=1):
    """Validate a point cloud array: 2-D, finite, distinct rows.

    Returns a read-only float array of shape (n_points, dim).
    """
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-D array of points, got shape {arr.shape}")
    if arr.shape[0] < min_points:
        raise ValueError(f"{name} needs at least {min_points} point(s)")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite coordinates")
    n = arr.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            if np.max(np.abs(arr[i] - arr[j])) <= 1e-12:
                raise DuplicatePoint(f"points {i} and {j} coincide", i=i, j=j)
    out = arr.copy()
    out.setflags(write=False)
    return out


def check_square_matrix(table, *, name="table"):
    """Validate that ``table`` is a square 2-D array-like and return it as a list of rows."""
    rows = [list(r) for r in table]
    n = len(rows)
    if n == 0:
        raise ValueError(f"{name} must be non-empty")
    for r in rows:
        if len(r) != n:
            raise ValueError(f"{name} must be square, got row of length {len(r)} in {n}x{n}")
    return rows


def check_nonempty_vector(u, *, name="u"):
    arr = np.asarray(u, dtype=float).ravel()
    if arr.size == 0:
        raise ValueError(f"{name} must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr

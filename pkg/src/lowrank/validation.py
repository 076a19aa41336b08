"""Input validation helpers used at API boundaries.

Arrays are normalized to contiguous float64 (float32 inputs are widened)
so every numerical routine can assume one dtype.
"""

from __future__ import annotations

import numbers

import numpy as np

from .errors import ParameterError, ShapeError

MAX_SEED = 2**64 - 1


def as_matrix(value, name: str = "matrix", *, check_finite: bool = True) -> np.ndarray:
    """Coerce to a 2-D float64 array with at least one row and column."""
    arr = np.asarray(value)
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got {arr.ndim}-D")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeError(f"{name} must have at least one row and column, got {arr.shape}")
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    if check_finite and not np.isfinite(arr).all():
        raise ParameterError(f"{name} contains non-finite entries")
    return arr


def as_vector(value, name: str = "vector", *, check_finite: bool = True) -> np.ndarray:
    """Coerce to a 1-D float64 array with at least one entry."""
    arr = np.asarray(value)
    if arr.ndim != 1:
        raise ShapeError(f"{name} must be 1-D, got {arr.ndim}-D")
    if arr.shape[0] < 1:
        raise ShapeError(f"{name} must have at least one entry")
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    if check_finite and not np.isfinite(arr).all():
        raise ParameterError(f"{name} contains non-finite entries")
    return arr


def check_seed(seed) -> int:
    if isinstance(seed, bool) or not isinstance(seed, numbers.Integral):
        raise ParameterError(f"seed must be an integer, got {type(seed).__name__}")
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise ParameterError(f"seed must lie in [0, 2**64), got {seed}")
    return seed


def check_positive_int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ParameterError(f"{name} must be an integer, got {type(value).__name__}")
    value = int(value)
    if value < 1:
        raise ParameterError(f"{name} must be >= 1, got {value}")
    return value

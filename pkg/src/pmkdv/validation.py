"""Input validation helpers shared by the estimators and functionals."""
from __future__ import annotations

import numbers

import numpy as np


def check_field(grid, f, name: str = "field") -> np.ndarray:
    """Return ``f`` as a finite float array of length ``grid.n``."""
    arr = np.asarray(f, dtype=float)
    if arr.shape != (grid.n,):
        raise ValueError(f"{name} must have shape ({grid.n},), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_fields(grid, X, name: str = "X") -> np.ndarray:
    """Return a stack of fields with shape ``(n_samples, grid.n)``."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != grid.n:
        raise ValueError(f"{name} must have shape (n_samples, {grid.n}), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_scalar(value, name, *, min_val=None, max_val=None, include_min=True,
                 include_max=True, integer=False):
    """Validate a real scalar against optional bounds and return it."""
    kind = numbers.Integral if integer else numbers.Real
    if isinstance(value, bool) or not isinstance(value, kind):
        raise TypeError(f"{name} must be {'an integer' if integer else 'a real number'}, "
                        f"got {type(value).__name__}")
    if not np.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value}")
    if min_val is not None:
        if (value < min_val) if include_min else (value <= min_val):
            op = ">=" if include_min else ">"
            raise ValueError(f"{name} must be {op} {min_val}, got {value}")
    if max_val is not None:
        if (value > max_val) if include_max else (value >= max_val):
            op = "<=" if include_max else "<"
            raise ValueError(f"{name} must be {op} {max_val}, got {value}")
    return value


def check_uniform_times(t, min_samples: int = 3, rtol: float = 1e-9) -> float:
    """Return the spacing of a uniformly spaced time array."""
    from .errors import InsufficientPoints

    t = np.asarray(t, dtype=float)
    if t.size < min_samples:
        raise InsufficientPoints(f"need at least {min_samples} samples, got {t.size}")
    dt = np.diff(t)
    h = dt.mean()
    if h <= 0 or np.max(np.abs(dt - h)) > rtol * max(abs(h), 1.0) + 1e-12:
        raise ValueError("timestamps must be strictly increasing and uniformly spaced")
    return float(h)

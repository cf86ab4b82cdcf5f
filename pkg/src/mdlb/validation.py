"""Small input-validation helpers shared across the package.

These mirror the scikit-learn ``check_*`` idiom but stay dependency-free so
that the numerical core can be used without an estimator context.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "check_probability",
    "check_unit_interval",
    "check_natural",
    "check_prob_vector",
    "check_feature_matrix",
    "check_labels",
]


def check_probability(x: float, name: str = "x") -> float:
    """Validate a scalar probability in [0, 1] and return it as float."""
    x = float(x)
    if not np.isfinite(x) or x < 0.0 or x > 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {x!r}")
    return x


def check_unit_interval(x: float, name: str = "x", open_ends: bool = False) -> float:
    """Validate a scalar in [0, 1] (or (0, 1) when ``open_ends``)."""
    x = float(x)
    ok = 0.0 < x < 1.0 if open_ends else 0.0 <= x <= 1.0
    if not np.isfinite(x) or not ok:
        bracket = "(0, 1)" if open_ends else "[0, 1]"
        raise ValueError(f"{name} must lie in {bracket}, got {x!r}")
    return x


def check_natural(n: int, name: str = "n", minimum: int = 0) -> int:
    """Validate an integer >= ``minimum``."""
    if int(n) != n:
        raise ValueError(f"{name} must be an integer, got {n!r}")
    n = int(n)
    if n < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {n}")
    return n


def check_prob_vector(p, name: str = "p", atol: float = 1e-12) -> np.ndarray:
    """Validate a 1-D probability vector (entries >= 0, sums to 1)."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {p.shape}")
    if np.any(p < -atol) or not np.all(np.isfinite(p)):
        raise ValueError(f"{name} must have nonnegative finite entries")
    s = float(p.sum())
    if abs(s - 1.0) > atol:
        raise ValueError(f"{name} must sum to 1 within {atol}, got {s!r}")
    return np.clip(p, 0.0, None)


def check_feature_matrix(x, name: str = "X") -> np.ndarray:
    """Validate a 2-D finite float matrix."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise ValueError(f"{name} must be a 2-D array, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} contains non-finite values")
    return x


def check_labels(y, n_classes: int, name: str = "y") -> np.ndarray:
    """Validate integer labels in [0, n_classes)."""
    y = np.asarray(y)
    if y.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if not np.issubdtype(y.dtype, np.integer):
        yi = y.astype(int)
        if np.any(yi != y):
            raise ValueError(f"{name} must contain integers")
        y = yi
    if y.size and (y.min() < 0 or y.max() >= n_classes):
        raise ValueError(f"{name} must lie in [0, {n_classes})")
    return y.astype(np.int64)

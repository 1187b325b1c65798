"""Input validation helpers shared by the task builders and estimators."""
from __future__ import annotations

import numbers

import numpy as np

from .core import ConfigError, DimensionError


def check_image(X, name: str = "X") -> np.ndarray:
    """Return ``X`` as a finite 2-D float64 array (a copy)."""
    X = np.array(X, dtype=float)
    if X.ndim != 2:
        raise DimensionError(f"{name} must be a 2-D image, got {X.ndim}-D")
    if X.shape[0] < 1 or X.shape[1] < 1:
        raise DimensionError(f"{name} has an empty dimension: {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} contains NaN or Inf")
    return X


def check_mask(mask, shape) -> np.ndarray:
    m = np.asarray(mask, dtype=float)
    if m.shape != tuple(shape):
        m = m.reshape(shape) if m.size == int(np.prod(shape)) else m
    if m.shape != tuple(shape):
        raise DimensionError(f"mask shape {np.shape(mask)} does not match image shape {tuple(shape)}")
    if not np.all((m == 0) | (m == 1)):
        raise ConfigError("mask must be binary")
    return m


def check_positive(value, name: str) -> float:
    if not isinstance(value, numbers.Real) or not value > 0 or not np.isfinite(value):
        raise ConfigError(f"{name} must be a positive finite number, got {value!r}")
    return float(value)

"""Input validation helpers shared by the estimators and the CLI."""
from __future__ import annotations

import numbers

import numpy as np
from sklearn.utils.validation import check_array

BOX_TOL = 1e-12


def check_points(X, n_features: int | None = None) -> np.ndarray:
    """2-d float array of inputs inside ``[-1, 1]^d``."""
    X = check_array(X, dtype=np.float64)
    if n_features is not None and X.shape[1] != n_features:
        raise ValueError(f"X has {X.shape[1]} features, but the estimator expects {n_features}")
    if np.any(np.abs(X) > 1.0 + BOX_TOL):
        raise ValueError("inputs must lie in [-1, 1]^d; rescale physical parameters first")
    return X


def check_seed(seed) -> int:
    """Seeds must be explicit non-negative integers; there is no entropy fallback."""
    if isinstance(seed, bool) or not isinstance(seed, numbers.Integral) or seed < 0:
        raise ValueError(f"seed must be a non-negative integer, got {seed!r}")
    return int(seed)


def check_count(n, name: str, minimum: int = 1) -> int:
    if isinstance(n, bool) or not isinstance(n, numbers.Integral) or n < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {n!r}")
    return int(n)

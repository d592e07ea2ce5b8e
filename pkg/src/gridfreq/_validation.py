"""Input validation helpers shared by the functional API and the estimators."""

import numbers

import numpy as np
from sklearn.utils import check_array


def check_samples(samples, min_samples=1, name="samples"):
    """Return ``samples`` as a finite 1-D float64 array.

    Raises ``ValueError`` if fewer than ``min_samples`` values are given.
    """
    x = check_array(
        np.asarray(samples, dtype=np.float64).ravel(),
        ensure_2d=False,
        dtype=np.float64,
        ensure_all_finite=True,
        ensure_min_samples=0,
    )
    if x.shape[0] < min_samples:
        raise ValueError(f"{name}: need at least {min_samples} values, got {x.shape[0]}")
    return x


def check_positive(value, name, strict=True):
    if not isinstance(value, numbers.Real) or not np.isfinite(value):
        raise ValueError(f"{name} must be a finite real number, got {value!r}")
    if strict and value <= 0:
        raise ValueError(f"{name} must be > 0, got {value!r}")
    if not strict and value < 0:
        raise ValueError(f"{name} must be >= 0, got {value!r}")
    return float(value)


def check_alpha(alpha):
    alpha = float(alpha)
    if not 0.0 < alpha <= 2.0:
        raise ValueError(f"stability parameter alpha must lie in (0, 2], got {alpha}")
    return alpha


def check_skew(beta):
    beta = float(beta)
    if not -1.0 <= beta <= 1.0:
        raise ValueError(f"skewness beta must lie in [-1, 1], got {beta}")
    return beta

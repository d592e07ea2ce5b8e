"""Closed-form stationary statistics of the bulk angular velocity."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_alpha, check_positive
from .sim import GridModel, NoiseSpec


@dataclass(frozen=True)
class TheoryPrediction:
    gamma: float
    total_inertia: float
    sigma_omega: float | None = None
    sigma_s_omega: float | None = None
    alpha: float | None = None

    def to_dict(self):
        return {
            "gamma": self.gamma,
            "total_inertia": self.total_inertia,
            "sigma_omega": self.sigma_omega,
            "sigma_s_omega": self.sigma_s_omega,
            "alpha": self.alpha,
        }


def _resolve_gamma(grid: GridModel, gamma):
    if gamma is not None:
        return check_positive(gamma, "gamma")
    return grid.require_gamma()


def std_gaussian(gamma: float, total_inertia: float, amplitudes) -> float:
    """``sqrt(sum sigma_i^2 / (2 gamma)) / sum M_i``."""
    a = np.asarray(amplitudes, dtype=float)
    return float(np.sqrt(np.sum(a**2) / (2.0 * gamma)) / total_inertia)


def scale_stable(gamma: float, total_inertia: float, amplitudes, alpha: float) -> float:
    """``[sum sigma_i^alpha / (gamma alpha)]^(1/alpha) / (sqrt(2) sum M_i)``."""
    a = np.asarray(amplitudes, dtype=float)
    return float((np.sum(a**alpha) / (gamma * alpha)) ** (1.0 / alpha) / (np.sqrt(2.0) * total_inertia))


def predict_std_gaussian(grid: GridModel, noise: NoiseSpec, gamma: float | None = None) -> float:
    """Stationary standard deviation of the bulk angular velocity under Gaussian noise.

    ``gamma`` overrides the grid's damping-to-inertia ratio, e.g. with a value
    estimated from a measured autocorrelation.
    """
    if noise.kind != "gaussian":
        raise ValueError("predict_std_gaussian needs gaussian noise")
    return std_gaussian(_resolve_gamma(grid, gamma), grid.total_inertia, noise.amplitudes)


def predict_scale_stable(grid: GridModel, noise: NoiseSpec, gamma: float | None = None) -> float:
    """Stationary stable scale of the bulk angular velocity under alpha-stable noise."""
    alpha = check_alpha(noise.alpha)
    return scale_stable(_resolve_gamma(grid, gamma), grid.total_inertia, noise.amplitudes, alpha)


def predicted_autocorrelation(gamma: float, lags) -> np.ndarray:
    gamma = check_positive(gamma, "gamma")
    return np.exp(-gamma * np.asarray(lags, dtype=float))


def predict(grid: GridModel, noise: NoiseSpec, gamma: float | None = None) -> TheoryPrediction:
    g = _resolve_gamma(grid, gamma)
    m = grid.total_inertia
    if noise.kind == "gaussian":
        return TheoryPrediction(g, m, std_gaussian(g, m, noise.amplitudes), scale_stable(g, m, noise.amplitudes, 2.0), 2.0)
    sigma = std_gaussian(g, m, noise.amplitudes) if noise.alpha == 2.0 else None
    return TheoryPrediction(g, m, sigma, scale_stable(g, m, noise.amplitudes, noise.alpha), noise.alpha)

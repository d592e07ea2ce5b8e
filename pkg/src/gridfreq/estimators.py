"""scikit-learn compatible wrappers around the functional statistics API.

Each estimator accepts a 1-D sample array or an ``(n, 1)`` column.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, OneToOneFeatureMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_positive, check_samples
from .stable import fit_stable
from .stats import DEFAULT_ACF_CUTOFF, autocorrelation, fit_decay, fit_gaussian, summary_stats
from .theory import predicted_autocorrelation


def _column(X):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 2 and X.shape[1] != 1:
        raise ValueError(f"expected a single column, got shape {X.shape}")
    return check_samples(X)


class FrequencyToAngularVelocity(OneToOneFeatureMixin, TransformerMixin, BaseEstimator):
    """Map frequency in Hz to angular velocity deviation ``2 pi (f - f_ref)``."""

    def __init__(self, f_ref=50.0):
        self.f_ref = f_ref

    def fit(self, X, y=None):
        _column(X)
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        return (2.0 * np.pi * (_column(X) - self.f_ref)).reshape(-1, 1)

    def inverse_transform(self, X):
        return (_column(X) / (2.0 * np.pi) + self.f_ref).reshape(-1, 1)


class GaussianMLE(BaseEstimator):
    """Maximum-likelihood Gaussian with moment summaries."""

    def fit(self, X, y=None):
        x = _column(X)
        fit = fit_gaussian(x)
        self.mu_, self.sigma_ = fit.mu, fit.sigma
        self.kurtosis_ = summary_stats(x).kurtosis if len(x) > 1 else np.nan
        self.n_features_in_ = 1
        return self

    def score_samples(self, X):
        """Log density of each sample."""
        check_is_fitted(self, "sigma_")
        z = (_column(X) - self.mu_) / self.sigma_
        return -0.5 * z**2 - np.log(self.sigma_ * np.sqrt(2.0 * np.pi))

    def score(self, X, y=None):
        return float(np.mean(self.score_samples(X)))


class StableEstimator(BaseEstimator):
    """Four-parameter stable fit (location in the S0 parameterisation)."""

    def __init__(self, max_iter=25, tol=1e-4):
        self.max_iter = max_iter
        self.tol = tol

    def fit(self, X, y=None):
        fit = fit_stable(_column(X), max_iter=self.max_iter, tol=self.tol)
        self.alpha_, self.beta_, self.scale_, self.loc_ = fit.alpha, fit.beta, fit.sigma, fit.delta
        self.converged_ = fit.converged
        self.n_iter_ = fit.n_iter
        self.n_features_in_ = 1
        return self


class DecayRateEstimator(BaseEstimator):
    """Exponential decay rate of the sample autocorrelation of a uniformly sampled signal."""

    def __init__(self, dt=1.0, max_lag=600.0, cutoff=DEFAULT_ACF_CUTOFF):
        self.dt = dt
        self.max_lag = max_lag
        self.cutoff = cutoff

    def fit(self, X, y=None):
        dt = check_positive(self.dt, "dt")
        x = _column(X)
        est = fit_decay(autocorrelation(x, dt, self.max_lag), self.cutoff)
        self.acf_ = est.c
        self.gamma_ = est.gamma_hat
        self.fit_window_ = est.fit_window
        self.n_features_in_ = 1
        return self

    def predict(self, lags):
        """Fitted autocorrelation ``exp(-gamma lag)`` at the given lags (seconds)."""
        check_is_fitted(self, "gamma_")
        return predicted_autocorrelation(self.gamma_, lags)

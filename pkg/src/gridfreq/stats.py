"""Descriptive statistics, distribution fits and autocorrelation analysis."""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from ._validation import check_positive, check_samples
from .exceptions import FewLagsError
from .stable import MIN_FIT_SAMPLES, StableFit, fit_stable

__all__ = [
    "SummaryStats",
    "GaussianFit",
    "StableFit",
    "AutocorrEstimate",
    "Histogram",
    "summary_stats",
    "fit_gaussian",
    "fit_stable",
    "tail_excess_ratio",
    "autocorrelation",
    "fit_decay_rate",
    "histogram",
    "stats_report",
]

DEFAULT_ACF_CUTOFF = 0.1


@dataclass(frozen=True)
class SummaryStats:
    n: int
    mean: float
    std: float
    kurtosis: float

    def to_dict(self):
        return {"n": self.n, "mean": self.mean, "std": self.std, "kurtosis": self.kurtosis}


@dataclass(frozen=True)
class GaussianFit:
    mu: float
    sigma: float

    def tail_probability(self, threshold: float) -> float:
        """P(|X - mu| > threshold) under this Gaussian."""
        return float(2.0 * ndtr(-threshold / self.sigma))

    def to_dict(self):
        return {"mu": self.mu, "sigma": self.sigma}


@dataclass(frozen=True)
class AutocorrEstimate:
    dt: float
    c: np.ndarray
    gamma_hat: float | None = None
    fit_window: tuple[int, int] | None = None

    @property
    def lags(self) -> np.ndarray:
        return np.arange(len(self.c)) * self.dt


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    counts: np.ndarray
    underflow: int = 0
    overflow: int = 0

    @property
    def total(self) -> int:
        return int(self.counts.sum()) + self.underflow + self.overflow

    def density(self) -> np.ndarray:
        """Probability density over all samples, including those out of range."""
        total = self.total
        if total == 0:
            return np.zeros_like(self.counts, dtype=float)
        return self.counts / (total * np.diff(self.edges))

    def write_csv(self, path):
        dens = self.density()
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["bin_left", "bin_right", "count", "density"])
            for lo, hi, c, d in zip(self.edges[:-1], self.edges[1:], self.counts, dens):
                w.writerow([repr(float(lo)), repr(float(hi)), int(c), repr(float(d))])


def _central_moments(x):
    mean = x.mean()
    d = x - mean
    d2 = d * d
    return mean, d2.mean(), (d2 * d2).mean()


def summary_stats(samples) -> SummaryStats:
    """Mean, sample std (n - 1) and Pearson kurtosis ``m4 / m2**2`` (Gaussian: 3)."""
    x = check_samples(samples, 4)
    mean, m2, m4 = _central_moments(x)
    if m2 == 0:
        raise ValueError("kurtosis undefined for constant input")
    n = len(x)
    return SummaryStats(n, float(mean), float(np.sqrt(m2 * n / (n - 1))), float(m4 / (m2 * m2)))


def fit_gaussian(samples) -> GaussianFit:
    """Maximum-likelihood Gaussian (sigma with denominator n)."""
    x = check_samples(samples, 2)
    mu = x.mean()
    sigma = np.sqrt(np.mean((x - mu) ** 2))
    if sigma == 0:
        raise ValueError("degenerate input: all samples identical")
    return GaussianFit(float(mu), float(sigma))


def tail_excess_ratio(samples, threshold: float, fit: GaussianFit | None = None) -> float:
    """Empirical over Gaussian probability of a two-sided deviation beyond ``threshold``.

    Returns ``inf`` (with a RuntimeWarning) when the Gaussian tail probability
    underflows while the sample has exceedances.
    """
    threshold = check_positive(threshold, "threshold")
    x = check_samples(samples, 1)
    if fit is None:
        fit = fit_gaussian(x)
    empirical = np.count_nonzero(np.abs(x - fit.mu) > threshold) / len(x)
    if empirical == 0:
        return 0.0
    gauss = fit.tail_probability(threshold)
    if gauss == 0.0:
        warnings.warn(
            f"Gaussian tail probability underflows at {threshold / fit.sigma:.1f} sigma; ratio reported as inf",
            RuntimeWarning,
            stacklevel=2,
        )
        return float("inf")
    return empirical / gauss


def autocorrelation(samples, dt: float, max_lag: float) -> AutocorrEstimate:
    """Normalized biased autocorrelation of the mean-removed series at lags ``0..max_lag``."""
    dt = check_positive(dt, "dt")
    x = check_samples(samples, 2)
    n = len(x)
    if max_lag > n * dt / 10:
        raise ValueError(f"max_lag {max_lag} s exceeds a tenth of the record length ({n * dt / 10} s)")
    n_lags = int(np.floor(max_lag / dt + 1e-9)) + 1
    d = x - x.mean()
    c0 = d @ d
    if c0 == 0:
        raise ValueError("autocorrelation undefined for a constant series")
    nfft = 1 << int(np.ceil(np.log2(2 * n - 1)))
    spec = np.fft.rfft(d, nfft)
    acov = np.fft.irfft(spec * np.conj(spec), nfft)[:n_lags]
    c = acov / acov[0]
    c[0] = 1.0
    return AutocorrEstimate(dt, c)


def fit_decay_rate(acf: AutocorrEstimate, cutoff: float = DEFAULT_ACF_CUTOFF) -> float:
    """Decay rate from a least-squares line through ``log c`` versus lag.

    Uses the leading run of lags with ``c > cutoff``.
    """
    c = np.asarray(acf.c)
    below = np.flatnonzero(c <= cutoff)
    n_use = below[0] if below.size else len(c)
    if n_use < 3:
        raise FewLagsError(f"fewer than 3 usable lags (c > {cutoff})")
    lags = np.arange(n_use) * acf.dt
    slope, _ = np.polyfit(lags, np.log(c[:n_use]), 1)
    return float(-slope)


def fit_decay(acf: AutocorrEstimate, cutoff: float = DEFAULT_ACF_CUTOFF) -> AutocorrEstimate:
    """Same as :func:`fit_decay_rate` but returns the estimate with the fit attached."""
    gamma = fit_decay_rate(acf, cutoff)
    below = np.flatnonzero(np.asarray(acf.c) <= cutoff)
    n_use = below[0] if below.size else len(acf.c)
    return AutocorrEstimate(acf.dt, acf.c, gamma, (0, int(n_use) - 1))


def histogram(samples, n_bins: int, range: tuple[float, float]) -> Histogram:
    """Uniform bins, right-open except the last; out-of-range samples go to under/overflow."""
    if n_bins < 2:
        raise ValueError(f"n_bins must be >= 2, got {n_bins}")
    lo, hi = float(range[0]), float(range[1])
    if not (np.isfinite(lo) and np.isfinite(hi) and hi > lo):
        raise ValueError(f"degenerate histogram range {range}")
    x = check_samples(samples, 0)
    counts, edges = np.histogram(x, bins=n_bins, range=(lo, hi))
    return Histogram(edges, counts, int(np.count_nonzero(x < lo)), int(np.count_nonzero(x > hi)))


def stats_report(samples, threshold: float | None = None, dt: float | None = None, max_lag: float | None = None,
                 cutoff: float = DEFAULT_ACF_CUTOFF) -> dict:
    """JSON-ready block ``{n, mean, std, kurtosis, gaussian, stable, tail_ratio, gamma_hat}``.

    ``stable`` is None below the fit's sample floor; ``tail_ratio`` needs a
    threshold and ``gamma_hat`` needs ``dt`` and ``max_lag`` (a contiguous series).
    """
    x = check_samples(samples, 4)
    s = summary_stats(x)
    g = fit_gaussian(x)
    out = s.to_dict()
    out["gaussian"] = g.to_dict()
    out["stable"] = None
    if len(x) >= MIN_FIT_SAMPLES:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            sf = fit_stable(x)
        out["stable"] = sf.to_dict()
        if caught or not sf.converged:
            out["stable"]["warning"] = "did not converge; quantile estimate"
    out["tail_ratio"] = None
    if threshold is not None:
        out["tail_ratio"] = tail_excess_ratio(x, threshold, g)
    out["gamma_hat"] = None
    if dt is not None and max_lag is not None:
        try:
            out["gamma_hat"] = fit_decay_rate(autocorrelation(x, dt, max_lag), cutoff)
        except FewLagsError:
            pass
    return out

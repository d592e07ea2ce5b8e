"""Deterministic synthetic frequency recordings for tests and demos."""

from __future__ import annotations

import numpy as np
from scipy.signal import lfilter

from .profiles import DEFAULT_MARKS
from .stable import sample_stable
from .timeseries import SECONDS_PER_DAY, FrequencyTrace

START_2017 = 1483228800.0  # 2017-01-01T00:00:00Z
KINDS = ("gaussian", "hourly-jumps", "stable")


def _day_trace(values, dt, f_ref, start, days):
    starts = tuple(start + d * SECONDS_PER_DAY for d in range(days))
    return FrequencyTrace(start, dt, values, f_ref, starts)


def _ar1(rng, n, dt, std, gamma):
    """Stationary AR(1) samples with autocorrelation exp(-gamma * lag)."""
    rho = np.exp(-gamma * dt)
    innov = rng.standard_normal(n) * std * np.sqrt(1 - rho**2)
    first = rng.standard_normal() * std
    out, _ = lfilter([1.0], [1.0, -rho], innov, zi=[rho * first])
    return out


def gaussian_trace(days=7, dt=1.0, seed=0, std=0.045, gamma=0.5, f_ref=50.0, start=START_2017) -> FrequencyTrace:
    """Gaussian fluctuations with exponential autocorrelation around ``f_ref``."""
    rng = np.random.default_rng(seed)
    n = int(round(days * SECONDS_PER_DAY / dt))
    return _day_trace(f_ref + _ar1(rng, n, dt, std, gamma), dt, f_ref, start, days)


def jump_profile(elapsed_s, marks=DEFAULT_MARKS, amplitude=0.08, tau=30.0, duration=90.0, signs=None):
    """Decaying deviations starting exactly at each mark.

    ``elapsed_s`` counts seconds from an hour boundary. ``amplitude`` is a
    scalar or one value per mark. ``signs`` holds either one entry per mark
    (same every hour) or one row per hour.
    """
    elapsed_s = np.asarray(elapsed_s, dtype=float)
    hour = (elapsed_s // 3600).astype(np.int64)
    if signs is not None:
        signs = np.asarray(signs, dtype=float)
    clock = elapsed_s - hour * 3600.0
    marks = sorted(marks)
    amps = np.broadcast_to(np.asarray(amplitude, dtype=float), (len(marks),))
    out = np.zeros(len(elapsed_s))
    for j, m in enumerate(marks):
        since = clock - m * 60.0
        active = (since >= 0) & (since < duration)
        if signs is None:
            sgn = 1.0
        elif signs.ndim == 1:
            sgn = signs[j]
        else:
            sgn = signs[hour[active], j]
        out[active] += sgn * amps[j] * np.exp(-since[active] / tau)
    return out


FULL_HOUR_JUMP = 0.08
QUARTER_JUMP = 0.06


def hourly_jumps_trace(
    days=7, dt=1.0, seed=0, std=0.045, gamma=0.5, amplitude=None, tau=30.0, marks=DEFAULT_MARKS,
    f_ref=50.0, start=START_2017,
) -> FrequencyTrace:  # fmt: skip
    """Gaussian background plus jumps at every trading mark.

    Jump signs alternate (+, -, +, ...) across the marks of each hour. By
    default the full-hour jump is the largest, so the hourly mean profile
    peaks there.
    """
    if amplitude is None:
        amplitude = [FULL_HOUR_JUMP if m == 0 else QUARTER_JUMP for m in sorted(marks)]
    rng = np.random.default_rng(seed)
    n = int(round(days * SECONDS_PER_DAY / dt))
    base = _ar1(rng, n, dt, std, gamma)
    signs = np.where(np.arange(len(marks)) % 2 == 0, 1.0, -1.0)
    jumps = jump_profile(np.arange(n) * dt, marks, amplitude, tau, signs=signs)
    return _day_trace(f_ref + base + jumps, dt, f_ref, start, days)


def stable_trace(days=7, dt=1.0, seed=0, alpha=1.9, scale=0.01, f_ref=50.0, start=START_2017) -> FrequencyTrace:
    """Independent symmetric stable deviations (may fall outside plausibility bounds)."""
    rng = np.random.default_rng(seed)
    n = int(round(days * SECONDS_PER_DAY / dt))
    return _day_trace(f_ref + sample_stable(alpha, scale, 0.0, rng, size=n), dt, f_ref, start, days)


def make_trace(kind: str, **kwargs) -> FrequencyTrace:
    if kind == "gaussian":
        kwargs.pop("alpha", None)
        return gaussian_trace(**kwargs)
    if kind == "hourly-jumps":
        kwargs.pop("alpha", None)
        return hourly_jumps_trace(**kwargs)
    if kind == "stable":
        return stable_trace(**kwargs)
    raise ValueError(f"unknown synthetic kind {kind!r}; expected one of {KINDS}")

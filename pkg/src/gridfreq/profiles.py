"""Time-of-day aggregation of complete-day frequency traces."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .timeseries import SECONDS_PER_DAY, FrequencyTrace

SECONDS_PER_HOUR = 3600
DEFAULT_MARKS = (0, 15, 30, 45)
DEFAULT_HALF_WIDTH = 150.0
DEFAULT_THRESHOLD = 0.1

# deviations are compared with this slack so that 50.1 Hz vs. 0.1 Hz is not an exceedance
_EXCEEDANCE_ATOL = 1e-9


def _bins_per(period: float, dt: float) -> int:
    n = period / dt
    if abs(n - round(n)) > 1e-9 * n:
        raise ValueError(f"dt={dt} s does not divide a period of {period} s")
    return int(round(n))


def _check_blocks(trace: FrequencyTrace, period: float) -> np.ndarray:
    values = trace.values
    if len(values) == 0:
        raise ValueError("empty trace")
    if not np.all(np.isfinite(values)):
        raise ValueError("trace contains missing or non-finite samples; select complete days first")
    n = _bins_per(period, trace.dt)
    if len(values) % n:
        raise ValueError(f"trace of {len(values)} samples is not a whole number of {period:g} s blocks")
    if trace.day_starts is None and abs(np.mod(trace.start_time, period)) > 1e-6:
        raise ValueError(f"trace must start on a {period:g} s boundary")
    return values.reshape(-1, n)


@dataclass(frozen=True)
class MeanProfile:
    """Mean frequency per position within a clock period (day or hour)."""

    dt: float
    means: np.ndarray
    counts: np.ndarray

    @property
    def bin_start_s(self) -> np.ndarray:
        return np.arange(len(self.means)) * self.dt

    def to_rows(self):
        return [
            {"bin_start_s": float(b), "mean_hz": float(m), "count": int(c)}
            for b, m, c in zip(self.bin_start_s, self.means, self.counts)
        ]

    def write_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["bin_start_s", "mean_hz", "count"])
            for b, m, c in zip(self.bin_start_s, self.means, self.counts):
                w.writerow([f"{b:g}", repr(float(m)), int(c)])

    def to_json(self) -> str:
        return json.dumps({"dt": self.dt, "bins": self.to_rows()})


class DailyProfile(MeanProfile):
    pass


class HourlyProfile(MeanProfile):
    pass


@dataclass(frozen=True)
class ViolationProfile:
    threshold: float
    per_minute: np.ndarray
    n_hours: int

    def write_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["minute", "exceedance_s_per_hour"])
            for m, v in enumerate(self.per_minute):
                w.writerow([m, repr(float(v))])

    def to_dict(self):
        return {
            "threshold_hz": self.threshold,
            "n_hours": self.n_hours,
            "per_minute": [float(v) for v in self.per_minute],
        }


@dataclass(frozen=True)
class WindowPartition:
    marks: tuple[float, ...]
    half_width: float
    trading_mask: np.ndarray

    trading_samples: np.ndarray
    nontrading_samples: np.ndarray

    @property
    def trading_fraction(self) -> float:
        return len(self.trading_samples) / len(self.trading_mask)


def daily_mean_profile(trace: FrequencyTrace) -> DailyProfile:
    """Average every time-of-day position over all days."""
    blocks = _check_blocks(trace, SECONDS_PER_DAY)
    return DailyProfile(trace.dt, blocks.mean(axis=0), np.full(blocks.shape[1], blocks.shape[0]))


def hourly_mean_profile(trace: FrequencyTrace) -> HourlyProfile:
    """Average every position within the hour over all hour blocks."""
    blocks = _check_blocks(trace, SECONDS_PER_HOUR)
    return HourlyProfile(trace.dt, blocks.mean(axis=0), np.full(blocks.shape[1], blocks.shape[0]))


def violation_profile(trace: FrequencyTrace, threshold: float = DEFAULT_THRESHOLD) -> ViolationProfile:
    """Mean seconds per hour, resolved by minute-of-hour, with ``|f - f_ref| > threshold``.

    Counts are multiplied by ``dt`` and divided by the number of hour blocks,
    which makes recordings of different resolution and length comparable.
    """
    if not threshold > 0:
        raise ValueError(f"threshold must be > 0, got {threshold}")
    blocks = _check_blocks(trace, SECONDS_PER_HOUR)
    n_hours = blocks.shape[0]
    minute = (trace.clock_seconds(SECONDS_PER_HOUR) // 60).astype(np.int64)
    exceed = trace.deviation - threshold > _EXCEEDANCE_ATOL
    counts = np.bincount(minute[exceed], minlength=60)
    return ViolationProfile(float(threshold), counts * trace.dt / n_hours, n_hours)


def _check_marks(marks, half_width):
    marks = tuple(sorted({float(m) for m in marks}))
    if not marks:
        raise ValueError("empty marks")
    if any(not 0 <= m < 60 for m in marks):
        raise ValueError(f"marks must be minutes within [0, 60), got {marks}")
    if not half_width > 0:
        raise ValueError(f"half_width must be > 0, got {half_width}")
    gaps = np.diff(np.array(marks + (marks[0] + 60.0,))) * 60.0
    if half_width >= gaps.min() / 2:
        raise ValueError(
            f"overlapping windows: half_width {half_width:g} s must be below half the smallest "
            f"gap between marks ({gaps.min() / 2:g} s)"
        )
    return marks


def trading_mask(trace: FrequencyTrace, marks=DEFAULT_MARKS, half_width: float = DEFAULT_HALF_WIDTH) -> np.ndarray:
    """Boolean mask, True where the sample lies in ``[mark - hw, mark + hw)`` for some mark."""
    marks = _check_marks(marks, half_width)
    pos = trace.clock_seconds(SECONDS_PER_HOUR)
    mask = np.zeros(len(pos), dtype=bool)
    for m in marks:
        mask |= np.mod(pos - m * 60.0 + half_width, SECONDS_PER_HOUR) < 2 * half_width
    return mask


def partition_trading_windows(
    trace: FrequencyTrace, marks=DEFAULT_MARKS, half_width: float = DEFAULT_HALF_WIDTH
) -> WindowPartition:
    """Split samples into those around trading marks and all others."""
    mask = trading_mask(trace, marks, half_width)
    mask.flags.writeable = False
    values = trace.values
    return WindowPartition(
        _check_marks(marks, half_width), float(half_width), mask, values[mask], values[~mask]
    )

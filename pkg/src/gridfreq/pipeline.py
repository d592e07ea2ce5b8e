"""Trading versus non-trading comparison on complete-day recordings."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .profiles import (
    DEFAULT_HALF_WIDTH,
    DEFAULT_MARKS,
    DEFAULT_THRESHOLD,
    HourlyProfile,
    ViolationProfile,
    hourly_mean_profile,
    partition_trading_windows,
    violation_profile,
)
from .stats import DEFAULT_ACF_CUTOFF, Histogram, histogram, stats_report
from .timeseries import FrequencyTrace

OUTPUT_FILES = (
    "report.json",
    "hist_trading.csv",
    "hist_nontrading.csv",
    "hist_full.csv",
    "profile_hourly.csv",
    "violations.csv",
)


def jsonable(obj):
    """Convert numpy scalars/arrays and non-finite floats into strict JSON values."""
    if isinstance(obj, dict):
        return {k: jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    return obj


@dataclass
class PipelineResult:
    report: dict
    histograms: dict[str, Histogram]
    hourly: HourlyProfile
    violations: ViolationProfile
    extra: dict = field(default_factory=dict)

    def write(self, out_dir) -> list[Path]:
        """Write all outputs; files already written are removed if a later one fails."""
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        written = []
        try:
            p = out_dir / "report.json"
            written.append(p)
            p.write_text(json.dumps(jsonable(self.report), indent=2) + "\n", encoding="utf-8")
            for name in ("trading", "nontrading", "full"):
                p = out_dir / f"hist_{name}.csv"
                written.append(p)
                self.histograms[name].write_csv(p)
            p = out_dir / "profile_hourly.csv"
            written.append(p)
            self.hourly.write_csv(p)
            p = out_dir / "violations.csv"
            written.append(p)
            self.violations.write_csv(p)
        except BaseException:
            for p in written:
                p.unlink(missing_ok=True)
            raise
        return written


def run_pipeline(
    trace: FrequencyTrace,
    marks=DEFAULT_MARKS,
    half_width: float = DEFAULT_HALF_WIDTH,
    threshold: float = DEFAULT_THRESHOLD,
    n_bins: int = 100,
    max_lag: float = 600.0,
    acf_cutoff: float = DEFAULT_ACF_CUTOFF,
    metadata: dict | None = None,
) -> PipelineResult:
    """Partition around trading marks and compare the two populations with the full data."""
    part = partition_trading_windows(trace, marks, half_width)
    full = trace.values
    max_lag = min(max_lag, len(full) * trace.dt / 10)
    populations = {
        "full": stats_report(full, threshold, trace.dt, max_lag, acf_cutoff),
        "trading": stats_report(part.trading_samples, threshold),
        "nontrading": stats_report(part.nontrading_samples, threshold),
    }
    lo, hi = float(full.min()), float(full.max())
    if hi <= lo:
        lo, hi = lo - 0.5, hi + 0.5
    hists = {
        "full": histogram(full, n_bins, (lo, hi)),
        "trading": histogram(part.trading_samples, n_bins, (lo, hi)),
        "nontrading": histogram(part.nontrading_samples, n_bins, (lo, hi)),
    }
    hourly = hourly_mean_profile(trace)
    viol = violation_profile(trace, threshold)
    t, n = populations["trading"], populations["nontrading"]
    report = {
        "input": {
            **(metadata or {}),
            "dt": trace.dt,
            "f_ref": trace.f_ref,
            "days_used": trace.n_days,
            "n_samples": len(full),
        },
        "config": {
            "marks_min": list(part.marks),
            "half_width_s": part.half_width,
            "threshold_hz": threshold,
            "n_bins": n_bins,
            "acf_max_lag_s": max_lag,
            "acf_cutoff": acf_cutoff,
        },
        "populations": populations,
        "comparison": {
            "kurtosis_delta": t["kurtosis"] - n["kurtosis"],
            "std_rel_diff": abs(t["std"] - n["std"]) / n["std"],
            "trading_fraction": part.trading_fraction,
        },
        "violations": viol.to_dict(),
    }
    return PipelineResult(report, hists, hourly, viol)

"""Ingestion and validation of grid-frequency recordings.

Recordings are two-column CSV files (``timestamp,frequency_hz``). A loaded
trace lives on a strictly uniform grid of spacing ``dt``; samples missing
from the file appear as NaN so that gaps stay visible. Only whole calendar
days (UTC) without any defect are passed on to the analysis.
"""

from __future__ import annotations

import datetime as _dt
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from .exceptions import NoCompleteDaysError, TraceFormatError

SECONDS_PER_DAY = 86400
PLAUSIBLE_RANGE = (45.0, 55.0)
FORMATS = ("csv-iso", "csv-epoch")

_NONFINITE_LITERALS = {"nan", "inf", "+inf", "-inf", "infinity", "+infinity", "-infinity"}
_REL_TOL = 1e-6


def _freeze(values):
    arr = np.array(values, dtype=np.float64, copy=True).ravel()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class FrequencyTrace:
    """Uniformly sampled frequency recording.

    ``day_starts`` is set once the trace is a concatenation of whole days
    (see :func:`select_complete_days`); sample ``k`` then belongs to day
    ``k // samples_per_day``.
    """

    start_time: float
    dt: float
    values: np.ndarray
    f_ref: float = 50.0
    day_starts: tuple[float, ...] | None = None

    def __post_init__(self):
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be > 0, got {self.dt}")
        object.__setattr__(self, "values", _freeze(self.values))
        if self.day_starts is not None:
            starts = tuple(float(s) for s in self.day_starts)
            object.__setattr__(self, "day_starts", starts)
            if len(starts) * self.samples_per_day != len(self.values):
                raise ValueError("day_starts inconsistent with number of samples")

    def __len__(self):
        return len(self.values)

    @property
    def samples_per_day(self) -> int:
        spd = SECONDS_PER_DAY / self.dt
        if abs(spd - round(spd)) > _REL_TOL * spd:
            raise ValueError(f"dt={self.dt} does not divide one day")
        return int(round(spd))

    @property
    def n_days(self) -> int:
        return len(self.day_starts) if self.day_starts is not None else len(self) // self.samples_per_day

    @property
    def deviation(self) -> np.ndarray:
        """Absolute deviation ``|f - f_ref|`` in Hz."""
        return np.abs(self.values - self.f_ref)

    def timestamps(self) -> np.ndarray:
        """Epoch seconds of every sample."""
        k = np.arange(len(self.values))
        if self.day_starts is None:
            return self.start_time + k * self.dt
        spd = self.samples_per_day
        return np.asarray(self.day_starts)[k // spd] + (k % spd) * self.dt

    def clock_seconds(self, period: float) -> np.ndarray:
        """Position of every sample within a clock period (e.g. 3600 for time-of-hour)."""
        k = np.arange(len(self.values))
        if self.day_starts is not None and SECONDS_PER_DAY % period == 0:
            # every day starts at midnight, so the day offset drops out
            pos = (k % self.samples_per_day) * self.dt
        else:
            pos = self.start_time + k * self.dt
        return np.mod(pos, period)


@dataclass(frozen=True)
class AngularVelocityTrace:
    start_time: float
    dt: float
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _freeze(self.values))

    def __len__(self):
        return len(self.values)

    def to_frequency(self, f_ref: float = 50.0) -> FrequencyTrace:
        return FrequencyTrace(self.start_time, self.dt, f_ref + self.values / (2 * np.pi), f_ref)


@dataclass(frozen=True)
class Defect:
    date: _dt.date
    kind: str  # "gap" | "out-of-range" | "duplicate"
    detail: str

    def to_dict(self):
        return {"date": self.date.isoformat(), "kind": self.kind, "detail": self.detail}


@dataclass(frozen=True)
class ValidationReport:
    n_days_total: int
    complete_days: tuple[_dt.date, ...]
    defects: tuple[Defect, ...] = field(default_factory=tuple)

    def defects_for(self, day: _dt.date) -> list[Defect]:
        return [d for d in self.defects if d.date == day]

    def to_dict(self):
        return {
            "n_days_total": self.n_days_total,
            "complete_days": [d.isoformat() for d in self.complete_days],
            "defects": [d.to_dict() for d in self.defects],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _epoch_to_date(seconds: float) -> _dt.date:
    return _dt.date(1970, 1, 1) + _dt.timedelta(days=int(seconds // SECONDS_PER_DAY))


def _date_to_epoch(day: _dt.date) -> float:
    return float((day - _dt.date(1970, 1, 1)).days * SECONDS_PER_DAY)


def _read_rows(path: Path) -> pd.DataFrame:
    try:
        df = pd.read_csv(
            path,
            header=None,
            names=["timestamp", "frequency"],
            dtype=str,
            skip_blank_lines=False,
            keep_default_na=False,
        )
    except FileNotFoundError:
        raise
    except pd.errors.EmptyDataError:
        raise TraceFormatError(f"{path}: file is empty")
    except (pd.errors.ParserError, UnicodeDecodeError) as exc:
        raise TraceFormatError(f"{path}: {exc}") from exc
    df = df.fillna("")
    df["line"] = np.arange(1, len(df) + 1)
    blank = (df["timestamp"].str.strip() == "") & (df["frequency"].str.strip() == "")
    return df[~blank].reset_index(drop=True)


def _parse_timestamps(col: pd.Series, fmt: str) -> np.ndarray:
    if fmt == "csv-iso":
        ts = pd.to_datetime(col.str.strip(), format="ISO8601", utc=True, errors="coerce")
        out = np.full(len(col), np.nan)
        ok = ts.notna().to_numpy()
        out[ok] = ts[ok].astype("int64").to_numpy() / 1e9
        return out
    return pd.to_numeric(col.str.strip(), errors="coerce").to_numpy(dtype=np.float64)


def load_trace(path, format: str = "csv-iso", f_ref: float = 50.0) -> tuple[FrequencyTrace, ValidationReport]:
    """Read a recording and classify each UTC calendar day.

    Returns the raw trace on a uniform grid (missing samples are NaN,
    out-of-range values are kept verbatim) and a :class:`ValidationReport`.
    Nothing is repaired.
    """
    if format not in FORMATS:
        raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    df = _read_rows(path)
    if df.empty:
        raise TraceFormatError(f"{path}: no data rows")

    t = _parse_timestamps(df["timestamp"], format)
    freq_text = df["frequency"].str.strip()
    f = pd.to_numeric(freq_text, errors="coerce").to_numpy(dtype=np.float64)
    lines = df["line"].to_numpy()

    # optional header: first row parses as neither timestamp nor number
    if np.isnan(t[0]) and np.isnan(f[0]) and freq_text.iloc[0].lower() not in _NONFINITE_LITERALS:
        t, f, lines, freq_text = t[1:], f[1:], lines[1:], freq_text.iloc[1:]
    if len(t) == 0:
        raise TraceFormatError(f"{path}: no data rows")

    bad_ts = np.flatnonzero(np.isnan(t))
    if bad_ts.size:
        raise TraceFormatError(f"unparsable timestamp for format {format}", line=int(lines[bad_ts[0]]))
    # NaN/inf literals and empty fields are invalid values (defects), anything else is a parse error
    invalid_value = np.isnan(f) & freq_text.str.lower().isin(_NONFINITE_LITERALS | {""}).to_numpy()
    bad_f = np.flatnonzero(np.isnan(f) & ~invalid_value)
    if bad_f.size:
        raise TraceFormatError("unparsable frequency value", line=int(lines[bad_f[0]]))

    steps = np.diff(t)
    back = np.flatnonzero(steps < 0)
    if back.size:
        raise TraceFormatError("non-monotone timestamps", line=int(lines[back[0] + 1]))
    positive = steps[steps > 0]
    if positive.size == 0:
        raise TraceFormatError(f"{path}: need at least two distinct timestamps")
    dt = round(float(positive[0]), 6)
    spd = SECONDS_PER_DAY / dt
    if abs(spd - round(spd)) > _REL_TOL * spd:
        raise TraceFormatError(f"{path}: sample interval {dt} s does not divide one day")
    ratio = steps / dt
    mult = np.rint(ratio)
    mixed = np.flatnonzero(np.abs(ratio - mult) > _REL_TOL * np.maximum(1.0, ratio))
    if mixed.size:
        raise TraceFormatError(
            f"mixed resolution: step of {steps[mixed[0]]} s is not a multiple of dt={dt} s",
            line=int(lines[mixed[0] + 1]),
        )

    idx = np.concatenate([[0], np.cumsum(mult.astype(np.int64))])
    first_of_idx = np.ones(len(idx), dtype=bool)
    first_of_idx[1:] = mult > 0
    grid = np.full(idx[-1] + 1, np.nan)
    grid[idx[first_of_idx]] = np.where(invalid_value, np.nan, f)[first_of_idx]
    t0 = float(t[0])
    trace = FrequencyTrace(t0, dt, grid, f_ref)

    report = _classify_days(t, f, invalid_value, ~first_of_idx, dt)
    return trace, report


def _classify_days(t, f, invalid_value, duplicate, dt) -> ValidationReport:
    lo, hi = PLAUSIBLE_RANGE
    spd = int(round(SECONDS_PER_DAY / dt))
    day_of = np.floor(t / SECONDS_PER_DAY).astype(np.int64)
    first_day, last_day = int(day_of[0]), int(day_of[-1])
    n_days = last_day - first_day + 1
    rel = day_of - first_day

    offset = t - day_of * SECONDS_PER_DAY
    pos = offset / dt
    aligned = np.abs(pos - np.rint(pos)) <= _REL_TOL * np.maximum(1.0, pos)

    unique_counts = np.bincount(rel[~duplicate & aligned], minlength=n_days)
    misaligned = np.bincount(rel[~aligned], minlength=n_days)
    dup_counts = np.bincount(rel[duplicate], minlength=n_days)
    out_mask = invalid_value | (f < lo) | (f > hi)
    out_counts = np.bincount(rel[out_mask], minlength=n_days)

    defects = []
    complete = []
    for d in range(n_days):
        day = _dt.date(1970, 1, 1) + _dt.timedelta(days=first_day + d)
        found = []
        if misaligned[d]:
            found.append(Defect(day, "gap", f"{misaligned[d]} samples off the midnight-aligned {dt:g} s grid"))
        if unique_counts[d] < spd:
            found.append(Defect(day, "gap", f"missing {spd - unique_counts[d]} of {spd} samples"))
        if out_counts[d]:
            sel = np.flatnonzero(out_mask & (rel == d))
            example = "missing/non-finite value" if invalid_value[sel[0]] else f"{f[sel[0]]:g} Hz"
            found.append(
                Defect(day, "out-of-range", f"{out_counts[d]} samples outside [{lo:g}, {hi:g}] Hz (first: {example})")
            )
        if dup_counts[d]:
            found.append(Defect(day, "duplicate", f"{dup_counts[d]} duplicate timestamps"))
        if found:
            defects.extend(found)
        else:
            complete.append(day)
    return ValidationReport(n_days, tuple(complete), tuple(defects))


def select_complete_days(trace: FrequencyTrace, report: ValidationReport) -> FrequencyTrace:
    """Concatenate the complete days of a raw trace in chronological order."""
    if not report.complete_days:
        raise NoCompleteDaysError("no complete days")
    spd = trace.samples_per_day
    chunks, starts = [], []
    for day in sorted(report.complete_days):
        ds = _date_to_epoch(day)
        i0 = (ds - trace.start_time) / trace.dt
        if abs(i0 - round(i0)) > _REL_TOL * max(1.0, abs(i0)):
            raise ValueError(f"day {day} is not aligned with the trace grid")
        i0 = int(round(i0))
        chunk = trace.values[i0 : i0 + spd] if i0 >= 0 else np.empty(0)
        if len(chunk) != spd or not np.all(np.isfinite(chunk)):
            raise ValueError(f"report does not match trace: day {day} is not complete in it")
        chunks.append(chunk)
        starts.append(ds)
    return FrequencyTrace(starts[0], trace.dt, np.concatenate(chunks), trace.f_ref, tuple(starts))


def concat_days(traces) -> FrequencyTrace:
    """Merge complete-day traces (e.g. from several files) in date order."""
    traces = list(traces)
    if not traces:
        raise NoCompleteDaysError("no complete days")
    dt, f_ref = traces[0].dt, traces[0].f_ref
    days = {}
    for tr in traces:
        if tr.day_starts is None:
            raise ValueError("concat_days expects traces produced by select_complete_days")
        if tr.dt != dt or tr.f_ref != f_ref:
            raise ValueError("cannot merge traces with different dt or f_ref")
        spd = tr.samples_per_day
        for i, ds in enumerate(tr.day_starts):
            if ds in days:
                raise ValueError(f"day {_epoch_to_date(ds)} present in more than one input")
            days[ds] = tr.values[i * spd : (i + 1) * spd]
    order = sorted(days)
    return FrequencyTrace(order[0], dt, np.concatenate([days[d] for d in order]), f_ref, tuple(order))


def load_complete(paths, format: str = "csv-iso", f_ref: float = 50.0):
    """Load one or more files and return (merged complete-day trace, reports)."""
    reports, traces = [], []
    for p in paths:
        raw, rep = load_trace(p, format, f_ref)
        reports.append(rep)
        if rep.complete_days:
            traces.append(select_complete_days(raw, rep))
    return concat_days(traces), reports


def to_angular_velocity(trace: FrequencyTrace) -> AngularVelocityTrace:
    """Convert frequency to angular-velocity deviation, ``2 pi (f - f_ref)``."""
    return AngularVelocityTrace(trace.start_time, trace.dt, 2 * np.pi * (trace.values - trace.f_ref))


def write_trace_csv(trace: FrequencyTrace, path, format: str = "csv-iso", header: bool = True, decimals: int = 6):
    if format not in FORMATS:
        raise ValueError(f"unknown format {format!r}")
    ts = trace.timestamps()
    whole = np.allclose(ts, np.rint(ts))
    if format == "csv-iso":
        unit, scale = ("s", 1) if whole else ("ms", 1000)
        stamps = np.rint(ts * scale).astype(np.int64).astype(f"datetime64[{unit}]")
        stamps = np.char.add(np.datetime_as_string(stamps, unit=unit), "Z")
    elif whole:
        stamps = np.char.mod("%d", np.rint(ts).astype(np.int64))
    else:
        stamps = np.char.mod("%.3f", ts)
    vals = np.char.mod(f"%.{decimals}f", trace.values)
    body = np.char.add(np.char.add(stamps, ","), vals)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if header:
            fh.write("timestamp,frequency_hz\n")
        fh.write("\n".join(body.tolist()))
        fh.write("\n")

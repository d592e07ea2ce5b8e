import datetime as dt

import numpy as np
import pytest

from gridfreq.timeseries import FrequencyTrace

DAY0 = 1483228800.0  # 2017-01-01T00:00:00Z


def iso(seconds):
    return dt.datetime.fromtimestamp(seconds, dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@pytest.fixture
def write_rows(tmp_path):
    """Write ``(timestamp_seconds, value)`` rows as a csv-iso or csv-epoch file."""

    def _write(times, values, name="trace.csv", fmt="csv-iso", header=True):
        path = tmp_path / name
        lines = ["timestamp,frequency_hz"] if header else []
        for t, v in zip(times, values):
            stamp = iso(t) if fmt == "csv-iso" else f"{t:.0f}"
            lines.append(f"{stamp},{v}")
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path

    return _write


def hours_trace(values, dt=1.0, f_ref=50.0):
    """Complete-day style trace starting at midnight; length must be whole hours."""
    values = np.asarray(values, dtype=float)
    return FrequencyTrace(DAY0, dt, values, f_ref)


def days_trace(values, dt=1.0, f_ref=50.0):
    values = np.asarray(values, dtype=float)
    n_days = int(round(len(values) * dt / 86400))
    return FrequencyTrace(DAY0, dt, values, f_ref, tuple(DAY0 + 86400.0 * d for d in range(n_days)))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)

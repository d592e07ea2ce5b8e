"""Command-line interface.

Exit codes: 0 success, 1 domain failure (no usable data, tolerance breach,
divergence), 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .exceptions import DivergenceError, GridFreqError, NoCompleteDaysError, TraceFormatError
from .pipeline import jsonable, run_pipeline
from .profiles import (
    DEFAULT_HALF_WIDTH,
    DEFAULT_MARKS,
    daily_mean_profile,
    hourly_mean_profile,
    violation_profile,
)
from .sim import bulk_velocity, build_grid, noise_from_config, simulate
from .stable import fit_stable
from .stats import DEFAULT_ACF_CUTOFF, stats_report
from .synth import KINDS, make_trace
from .theory import predict
from .timeseries import FORMATS, load_complete, load_trace, write_trace_csv

log = logging.getLogger("gridfreq")

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2
GAUSSIAN_TOL = 0.02
STABLE_SCALE_TOL = 0.10
STABLE_ALPHA_TOL = 0.05


class _Usage(Exception):
    pass


def _emit_json(obj, out=None):
    text = json.dumps(jsonable(obj), indent=2) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _marks(text):
    try:
        return tuple(float(m) for m in text.split(",") if m.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid marks {text!r}; expected e.g. 0,15,30,45")


def _load(args):
    trace, reports = load_complete(args.paths, args.format, args.f_ref)
    log.info("loaded %d complete days from %d file(s)", trace.n_days, len(args.paths))
    return trace, reports


def _add_inputs(p):
    p.add_argument("paths", nargs="+", type=Path, help="CSV recordings (timestamp,frequency_hz)")
    p.add_argument("--format", choices=FORMATS, default="csv-iso")
    p.add_argument("--f-ref", type=float, default=50.0, help="reference frequency in Hz")


def cmd_validate(args):
    reports = {str(p): load_trace(p, args.format, args.f_ref)[1] for p in args.paths}
    if len(reports) == 1:
        _emit_json(next(iter(reports.values())).to_dict())
    else:
        _emit_json({"files": {k: r.to_dict() for k, r in reports.items()}})
    return EXIT_OK if any(r.complete_days for r in reports.values()) else EXIT_DOMAIN


def cmd_profile(args):
    trace, _ = _load(args)
    prof = daily_mean_profile(trace) if args.daily else hourly_mean_profile(trace)
    if args.out:
        prof.write_csv(args.out)
    else:
        print("bin_start_s,mean_hz,count")
        for row in prof.to_rows():
            print(f"{row['bin_start_s']:g},{row['mean_hz']!r},{row['count']}")
    return EXIT_OK


def cmd_violations(args):
    trace, _ = _load(args)
    prof = violation_profile(trace, args.threshold_mhz / 1000.0)
    if args.out:
        prof.write_csv(args.out)
    else:
        print("minute,exceedance_s_per_hour")
        for m, v in enumerate(prof.per_minute):
            print(f"{m},{float(v)!r}")
    return EXIT_OK


def cmd_pipeline(args):
    trace, reports = _load(args)
    meta = {
        "files": [str(p) for p in args.paths],
        "n_days_total": sum(r.n_days_total for r in reports),
        "complete_days": sorted(d.isoformat() for r in reports for d in r.complete_days),
    }
    result = run_pipeline(
        trace,
        marks=args.marks,
        half_width=args.half_width_s,
        threshold=args.threshold_mhz / 1000.0,
        n_bins=args.bins,
        max_lag=args.max_lag_s,
        acf_cutoff=args.acf_cutoff,
        metadata=meta,
    )
    written = result.write(args.out_dir)
    log.info("wrote %s", ", ".join(p.name for p in written))
    cmp = result.report["comparison"]
    print(json.dumps(jsonable({"out_dir": str(args.out_dir), **cmp})))
    return EXIT_OK


def _read_config(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise
    except json.JSONDecodeError as exc:
        raise _Usage(f"{path}: invalid JSON ({exc})")


def _sim_settings(cfg, seed=None):
    sim = cfg.get("sim", {}) or {}
    try:
        dt = float(sim["dt"])
        steps = int(sim["steps"])
    except KeyError as exc:
        raise _Usage(f"config sim block needs {exc}")
    return {
        "dt": dt,
        "steps": steps,
        "seed": int(sim.get("seed", 0)) if seed is None else seed,
        "burn_in_s": sim.get("burn_in_s"),
        "record_every": int(sim.get("record_every", 1)),
    }


def _run_config(grid, noise, settings, seed):
    res = simulate(
        grid, noise, settings["dt"], settings["steps"], seed,
        burn_in_s=settings["burn_in_s"], record_every=settings["record_every"],
    )  # fmt: skip
    return res, bulk_velocity(res, grid)


def cmd_simulate(args):
    cfg = _read_config(args.config)
    grid, noise = build_grid(cfg), noise_from_config(cfg)
    settings = _sim_settings(cfg)
    res, bulk = _run_config(grid, noise, settings, settings["seed"])
    gamma = grid.gamma
    max_lag = None
    if gamma is not None:
        max_lag = min(5.0 / gamma, len(bulk) * bulk.dt / 10)
    out = {
        "config": {"n_nodes": grid.n, "noise": {"kind": noise.kind, "alpha": noise.alpha}, **settings},
        "gamma": gamma,
        "bulk": stats_report(bulk.values, None, bulk.dt if max_lag else None, max_lag),
        "nodes": [{"std": float(np.std(w, ddof=1))} for w in res.omega],
        "theory": predict(grid, noise).to_dict() if gamma is not None else None,
    }
    _emit_json(out, args.out)
    if args.trajectory_csv:
        cols = [res.times] + list(res.theta) + list(res.omega) + [bulk.values]
        header = ["time_s"] + [f"theta_{i}" for i in range(grid.n)] + [f"omega_{i}" for i in range(grid.n)]
        np.savetxt(args.trajectory_csv, np.column_stack(cols), delimiter=",", header=",".join(header + ["omega_bulk"]),
                   comments="", fmt="%.10g")
    return EXIT_OK


def validate_theory(cfg, trials=1, seed=None) -> dict:
    """Compare ensemble statistics of the simulated bulk signal with the closed forms."""
    grid, noise = build_grid(cfg), noise_from_config(cfg)
    settings = _sim_settings(cfg, seed)
    pred = predict(grid, noise)
    seeds = np.random.SeedSequence(settings["seed"]).generate_state(trials)
    pooled = np.concatenate([_run_config(grid, noise, settings, int(s))[1].values for s in seeds])

    out = {"kind": noise.kind, "alpha": noise.alpha, "trials": trials, "n_samples": len(pooled),
           "prediction": pred.to_dict(), "measurement": {}, "relative_error": {}, "tolerance": {}, "checks": {}}
    std = float(np.std(pooled, ddof=1))
    if noise.kind == "gaussian" or noise.alpha == 2.0:
        err = abs(std - pred.sigma_omega) / pred.sigma_omega
        out["measurement"]["std"] = std
        out["relative_error"]["std"] = err
        out["tolerance"]["std"] = GAUSSIAN_TOL
        out["checks"]["std"] = err <= GAUSSIAN_TOL
    if noise.kind == "stable":
        fit = fit_stable(pooled)
        err = abs(fit.sigma - pred.sigma_s_omega) / pred.sigma_s_omega
        out["measurement"]["stable"] = fit.to_dict()
        out["relative_error"]["scale"] = err
        out["relative_error"]["alpha_abs"] = abs(fit.alpha - noise.alpha)
        out["tolerance"].update({"scale": STABLE_SCALE_TOL, "alpha_abs": STABLE_ALPHA_TOL})
        out["checks"]["scale"] = err <= STABLE_SCALE_TOL
        out["checks"]["alpha"] = abs(fit.alpha - noise.alpha) <= STABLE_ALPHA_TOL
    out["passed"] = all(out["checks"].values())
    return out


def cmd_validate_theory(args):
    cfg = _read_config(args.config)
    if args.trials < 1:
        raise _Usage("--trials must be >= 1")
    out = validate_theory(cfg, args.trials, args.seed)
    _emit_json(out, args.out)
    return EXIT_OK if out["passed"] else EXIT_DOMAIN


def cmd_synth(args):
    kw = {"days": args.days, "dt": args.dt, "seed": args.seed}
    if args.kind == "stable":
        kw["alpha"] = args.alpha
    trace = make_trace(args.kind, **kw)
    write_trace_csv(trace, args.out, args.format)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gridfreq", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="classify days of one or more recordings")
    _add_inputs(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("profile", help="daily or hourly mean frequency profile")
    _add_inputs(p)
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--daily", action="store_true")
    which.add_argument("--hourly", action="store_true")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("violations", help="per-minute threshold exceedances")
    _add_inputs(p)
    p.add_argument("--threshold-mhz", type=float, default=100.0)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_violations)

    p = sub.add_parser("pipeline", help="trading vs. non-trading analysis with plot data")
    _add_inputs(p)
    p.add_argument("--marks", type=_marks, default=DEFAULT_MARKS, help="minutes of the hour, comma separated")
    p.add_argument("--half-width-s", type=float, default=DEFAULT_HALF_WIDTH)
    p.add_argument("--threshold-mhz", type=float, default=100.0)
    p.add_argument("--bins", type=int, default=100)
    p.add_argument("--max-lag-s", type=float, default=600.0)
    p.add_argument("--acf-cutoff", type=float, default=DEFAULT_ACF_CUTOFF)
    p.add_argument("--out-dir", type=Path, required=True)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("simulate", help="simulate a swing-equation network from a JSON config")
    p.add_argument("--config", type=Path, required=True)
    p.add_argument("--out", type=Path)
    p.add_argument("--trajectory-csv", type=Path)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate-theory", help="Monte Carlo check of the closed-form predictions")
    p.add_argument("--config", type=Path, required=True)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_validate_theory)

    p = sub.add_parser("synth", help="write a deterministic synthetic recording")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--days", type=int, default=7)
    p.add_argument("--dt", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha", type=float, default=1.9, help="stability (stable kind only)")
    p.add_argument("--format", choices=FORMATS, default="csv-iso")
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, TraceFormatError, _Usage) as exc:
        print(f"gridfreq: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NoCompleteDaysError, DivergenceError) as exc:
        print(f"gridfreq: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (GridFreqError, ValueError) as exc:
        print(f"gridfreq: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())

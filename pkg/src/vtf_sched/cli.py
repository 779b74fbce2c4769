"""Command-line front end: run, sweep, warmstart, baseline.

Exit codes: 0 success, 2 scenario/flag validation error, 3 runtime error
(failed run, non-convergence). All outputs are plot-ready CSV/JSON; see
README for formats and plotting recipes.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from vtf_sched import metrics as metrics_mod
from vtf_sched import thermal_model
from vtf_sched.scenario import ScenarioError, load_scenario
from vtf_sched.scheduler import ConfigError, run_fixed_threshold, run_vtf_tas

log = logging.getLogger("vtf_sched")

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3


def _atomic_write(path: Path, writer) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            writer(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_run_outputs(out_dir: Path, cfg, schedule, trace, provenance: dict) -> dict:
    m = metrics_mod.compute_metrics(trace)
    _atomic_write(out_dir / "trace.csv", trace.to_csv)
    _atomic_write(out_dir / "schedule.jsonl",
                  lambda fh: fh.write("".join(ev.to_json() + "\n" for ev in schedule)))
    payload = {
        "peak_temp_c": m.peak_temp,
        "max_violation_c": m.max_violation,
        "deadline_misses": m.deadline_misses,
        "per_period_peaks_c": list(m.per_period_peaks),
        "w_d": cfg.w_d,
        "t_h0_c": cfg.t_h0,
        "dt_ms": cfg.dt,
        "t_end_ms": cfg.t_end,
        "p_len_ms": cfg.p_len,
        "overrides": provenance,
    }
    _atomic_write(out_dir / "metrics.json",
                  lambda fh: fh.write(json.dumps(payload, indent=2) + "\n"))
    return payload


def _run_one(args):
    """Worker for parallel sweeps; returns the metrics payload."""
    scenario, overrides, fixed, out_dir = args
    cfg = load_scenario(scenario, overrides)
    runner = run_fixed_threshold if fixed else run_vtf_tas
    schedule, trace = runner(cfg)
    return _write_run_outputs(Path(out_dir), cfg, schedule, trace, overrides)


def _parse_float_list(text: str, flag: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v != ""]
    except ValueError as e:
        raise ScenarioError(f"{flag}: {e}") from e
    if not values:
        raise ScenarioError(f"{flag}: empty list")
    return values


def cmd_run(args) -> int:
    overrides = {"w_d": args.w_d, "t_h0": args.t_h0, "dt": args.dt, "t_end": args.t_end}
    cfg = load_scenario(args.scenario, overrides)
    runner = run_fixed_threshold if args.fixed_threshold else run_vtf_tas
    schedule, trace = runner(cfg)
    payload = _write_run_outputs(Path(args.out), cfg, schedule, trace, overrides)
    log.info("run complete: peak=%.3f violation=%.3f misses=%d",
             payload["peak_temp_c"], payload["max_violation_c"], payload["deadline_misses"])
    return EXIT_OK


def _run_grid(scenario, jobs, work_items):
    """Run a list of (overrides, fixed, out_dir) jobs, preserving order."""
    job_args = [(scenario, ov, fixed, str(out)) for ov, fixed, out in work_items]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_one, job_args))
    return [_run_one(a) for a in job_args]


def cmd_sweep(args) -> int:
    w_d_values = _parse_float_list(args.w_d, "--w-d")
    out = Path(args.out)
    tokens = [v for v in args.w_d.split(",") if v != ""]
    items = []
    for token, w_d in zip(tokens, w_d_values):
        ov = {"w_d": w_d, "t_h0": args.t_h0, "dt": args.dt, "t_end": args.t_end}
        items.append((ov, False, out / f"wd_{token}"))
    try:
        results = _run_grid(args.scenario, args.jobs, items)
    except Exception as e:
        _atomic_write(out / "PARTIAL", lambda fh: fh.write(f"sweep aborted: {e}\n"))
        log.error("sweep failed: %s", e)
        return EXIT_RUNTIME
    def write_summary(fh):
        fh.write("w_d,peak_temp_c,max_violation_c,deadline_misses\n")
        for token, r in zip(tokens, results):
            fh.write(f"{token},{r['peak_temp_c']!r},{r['max_violation_c']!r},"
                     f"{r['deadline_misses']}\n")
    _atomic_write(out / "sweep_summary.csv", write_summary)
    return EXIT_OK


def cmd_warmstart(args) -> int:
    cfg = load_scenario(args.scenario, {"dt": args.dt})
    history = []
    try:
        state = thermal_model.steady_state_init(cfg.thermal, dt=cfg.dt, history=history)
    except thermal_model.SteadyStateError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    out = Path(args.out)
    n = cfg.thermal.n_cores
    def write_csv(fh):
        fh.write("t_ms," + ",".join(f"node{i}_c" for i in range(n)) + ",max_abs_gradient\n")
        for t, temps, grad in history:
            fh.write(f"{t!r}," + ",".join(repr(v) for v in temps) + f",{grad!r}\n")
    _atomic_write(out / "warmstart.csv", write_csv)
    _atomic_write(out / "warmstart_state.json",
                  lambda fh: fh.write(json.dumps(
                      {"node_temps_c": list(state.node_temps)}, indent=2) + "\n"))
    return EXIT_OK


def cmd_baseline(args) -> int:
    grid = _parse_float_list(args.t_h0_grid, "--t-h0-grid")
    out = Path(args.out)
    tokens = [v for v in args.t_h0_grid.split(",") if v != ""]
    items = []
    for token, t_h0 in zip(tokens, grid):
        ov = {"w_d": args.w_d, "t_h0": t_h0, "dt": args.dt, "t_end": args.t_end}
        items.append((ov, True, out / f"th_{token}"))
    try:
        results = _run_grid(args.scenario, args.jobs, items)
    except Exception as e:
        _atomic_write(out / "PARTIAL", lambda fh: fh.write(f"baseline aborted: {e}\n"))
        log.error("baseline failed: %s", e)
        return EXIT_RUNTIME
    def write_summary(fh):
        fh.write("t_h0_c,peak_temp_c,max_violation_c,deadline_misses\n")
        for token, r in zip(tokens, results):
            fh.write(f"{token},{r['peak_temp_c']!r},{r['max_violation_c']!r},"
                     f"{r['deadline_misses']}\n")
    _atomic_write(out / "baseline_summary.csv", write_summary)
    # best threshold = lowest peak among zero-miss runs
    feasible = [(t, r) for t, r in zip(grid, results) if r["deadline_misses"] == 0]
    best = min(feasible, key=lambda tr: tr[1]["peak_temp_c"]) if feasible else None
    payload = {
        "best_t_h0_c": best[0] if best else None,
        "best_peak_temp_c": best[1]["peak_temp_c"] if best else None,
        "zero_miss_runs": len(feasible),
        "grid": grid,
    }
    _atomic_write(out / "baseline_best.json",
                  lambda fh: fh.write(json.dumps(payload, indent=2) + "\n"))
    return EXIT_OK


def _add_common(p):
    p.add_argument("scenario", help="path to scenario JSON file")
    p.add_argument("-o", "--out", required=True, help="output directory")
    p.add_argument("--dt", type=float, default=None, help="override step size (ms)")
    p.add_argument("--t-end", type=float, default=None, help="override horizon (ms)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vtf-sched",
        description="Variable-threshold thermal-aware scheduling simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="single scheduling run")
    _add_common(p)
    p.add_argument("--w-d", type=float, default=None, help="dead-zone half-width")
    p.add_argument("--t-h0", type=float, default=None, help="initial threshold (degC)")
    p.add_argument("--fixed-threshold", action="store_true",
                   help="pin the threshold at t_h0 (baseline mode)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="one run per dead-zone value, plus summary")
    _add_common(p)
    p.add_argument("--w-d", required=True, help="comma-separated dead-zone values")
    p.add_argument("--t-h0", type=float, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("warmstart", help="compute the idle steady-state thermal state")
    _add_common(p)
    p.set_defaults(func=cmd_warmstart)

    p = sub.add_parser("baseline", help="fixed-threshold grid search")
    _add_common(p)
    p.add_argument("--t-h0-grid", required=True, help="comma-separated thresholds (degC)")
    p.add_argument("--w-d", type=float, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_baseline)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("VTF_SCHED_LOG", "WARNING").upper())
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, ConfigError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except thermal_model.SteadyStateError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

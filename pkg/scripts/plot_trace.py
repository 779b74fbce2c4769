#!/usr/bin/env python3
"""Plot a run's trace: temperatures vs threshold, utilization behavior,
and per-core execution activity.

Usage:
    python3 scripts/plot_trace.py RUN_DIR SCENARIO_JSON [-o figure.png]

RUN_DIR is an output directory produced by `vtf-sched run` (must contain
trace.csv); SCENARIO_JSON is the scenario the run was made from, needed
to recover the task set for the utilization panel.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from vtf_sched.metrics import utilization_series
from vtf_sched.scenario import load_scenario
from vtf_sched.scheduler import Trace


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("run_dir", type=Path)
    ap.add_argument("scenario", type=Path)
    ap.add_argument("-o", "--out", type=Path, default=None,
                    help="output image (default: RUN_DIR/trace.png)")
    args = ap.parse_args()

    cfg = load_scenario(args.scenario)
    with open(args.run_dir / "trace.csv") as fh:
        trace = Trace.from_csv(fh, cfg.p_len, cfg.dt)
    ts = cfg.make_taskset()

    fig, axes = plt.subplots(3, 1, figsize=(10, 9), sharex=True)

    ax = axes[0]
    for j, core in enumerate(trace.core_ids):
        ax.plot(trace.t_ms, [row[j] for row in trace.temps],
                lw=0.8, label=f"core {core}")
    ax.plot(trace.t_ms, trace.t_h, "k--", lw=1.2, label="threshold")
    ax.set_ylabel("temperature (°C)")
    ax.legend(ncol=3, fontsize=8)

    ax = axes[1]
    t, u_sigma, u_f, worst = utilization_series(trace, ts)
    ax.plot(t, u_sigma, lw=1.0, label="schedule")
    ax.plot(t, u_f, "--", lw=1.0, label="fluid")
    ax.plot(t, worst, ":", lw=1.0, label="worst case")
    ax.set_ylabel("remaining utilization")
    ax.legend(fontsize=8)

    ax = axes[2]
    for j, core in enumerate(trace.core_ids):
        running = [j + (0.8 if s[j] == "CR" else 0.0)
                   for s in trace.statuses]
        ax.fill_between(trace.t_ms, j, running, step="post", alpha=0.7)
    ax.set_yticks(range(len(trace.core_ids)))
    ax.set_yticklabels([f"core {c}" for c in trace.core_ids])
    ax.set_ylabel("executing")
    ax.set_xlabel("time (ms)")

    for bound in range(0, int(trace.t_ms[-1]) + 1, int(trace.p_len)):
        for ax in axes:
            ax.axvline(bound, color="grey", lw=0.3)

    out = args.out or args.run_dir / "trace.png"
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()

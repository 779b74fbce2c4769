"""Variable-threshold scheduling main loop, assignment logic and the
fixed-threshold baseline.

The simulation is a discrete-time state machine over integer ticks of dt,
so period boundaries and override triggers are exact. Each step:
assignment check -> execution grant -> time advance -> threshold update ->
thermal step -> core status update -> (boundary: miss recording + reset).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from vtf_sched import thermal_model
from vtf_sched.core_state import CoreSet, CoreStatus, HOT_IDLE, update_states_vtf
from vtf_sched.task_model import (
    TIME_EPS, TaskSet, TaskSpec, advance_execution, release_period,
)
from vtf_sched.thermal_model import ThermalModelParams
from vtf_sched.threshold_controller import ControllerState, update_threshold


class ConfigError(ValueError):
    """Simulation configuration violates an invariant; names the field."""


@dataclass(frozen=True)
class SimConfig:
    """Everything one run needs; value type, safe to copy across processes."""

    t_h0: float
    t_end: float
    w_d: float
    p_len: float
    dt: float
    thermal: ThermalModelParams
    tasks: tuple[TaskSpec, ...]
    exec_time_factor: float = 1.0
    t_h_max: float | None = None

    def __post_init__(self):
        if self.dt <= 0:
            raise ConfigError("dt_ms: must be > 0")
        if self.p_len <= 0:
            raise ConfigError("p_len_ms: must be > 0")
        steps = self.p_len / self.dt
        if abs(steps - round(steps)) > 1e-9 or round(steps) < 1:
            raise ConfigError("dt_ms: p_len_ms must be an integer multiple of dt_ms")
        periods = self.t_end / self.p_len
        if abs(periods - round(periods)) > 1e-9 or round(periods) < 1:
            raise ConfigError("t_end_ms: must be a whole number of periods")
        if self.w_d < 0:
            raise ConfigError("w_d: must be >= 0")
        if not (0 < self.exec_time_factor <= 1.0):
            raise ConfigError("exec_time_factor: must be in (0, 1]")
        for spec in self.tasks:
            if spec.wcet > self.p_len + TIME_EPS:
                raise ConfigError(f"tasks[{spec.id}].wcet_ms: exceeds p_len_ms")

    @property
    def steps_per_period(self) -> int:
        return round(self.p_len / self.dt)

    @property
    def total_steps(self) -> int:
        return round(self.t_end / self.dt)

    def make_taskset(self) -> TaskSet:
        return TaskSet.from_specs(self.tasks, self.p_len, self.exec_time_factor)


@dataclass(frozen=True)
class ScheduleEvent:
    """One emitted schedule entry: the full assignment at time t (ms)."""

    t: float
    assignment: dict[int, str]

    def to_json(self) -> str:
        mapping = {str(core): task for core, task in sorted(self.assignment.items())}
        return json.dumps({"t_ms": self.t, "assignment": mapping})


@dataclass
class Trace:
    """Column-oriented per-step diagnostics for a whole run."""

    core_ids: list[int]
    task_ids: list[str]
    p_len: float
    dt: float
    t_ms: list[float] = field(default_factory=list)
    temps: list[list[float]] = field(default_factory=list)
    t_h: list[float] = field(default_factory=list)
    h: list[float] = field(default_factory=list)
    h_scaled: list[float] = field(default_factory=list)
    c: list[int] = field(default_factory=list)
    d: list[int] = field(default_factory=list)
    statuses: list[list[str]] = field(default_factory=list)
    time_left: list[list[float]] = field(default_factory=list)
    overrides: list[str] = field(default_factory=list)
    miss_events: list[tuple[float, str]] = field(default_factory=list)

    @property
    def header(self) -> list[str]:
        return (
            ["t_ms"]
            + [f"temp_core{i}" for i in self.core_ids]
            + ["t_h", "h", "h_scaled", "c", "d"]
            + [f"status_core{i}" for i in self.core_ids]
            + [f"tl_{tid}" for tid in self.task_ids]
            + ["override_flags"]
        )

    def to_csv(self, fh) -> None:
        fh.write(",".join(self.header) + "\n")
        for i in range(len(self.t_ms)):
            row = (
                [repr(self.t_ms[i])]
                + [repr(v) for v in self.temps[i]]
                + [repr(self.t_h[i]), repr(self.h[i]), repr(self.h_scaled[i]),
                   str(self.c[i]), str(self.d[i])]
                + self.statuses[i]
                + [repr(v) for v in self.time_left[i]]
                + [self.overrides[i]]
            )
            fh.write(",".join(row) + "\n")

    @classmethod
    def from_csv(cls, fh, p_len: float, dt: float) -> "Trace":
        header = fh.readline().strip().split(",")
        core_ids = [int(h[len("temp_core"):]) for h in header if h.startswith("temp_core")]
        task_ids = [h[len("tl_"):] for h in header if h.startswith("tl_")]
        tr = cls(core_ids=core_ids, task_ids=task_ids, p_len=p_len, dt=dt)
        n = len(core_ids)
        m = len(task_ids)
        for line in fh:
            parts = line.strip().split(",")
            if not parts or parts == [""]:
                continue
            k = 0
            tr.t_ms.append(float(parts[k])); k += 1
            tr.temps.append([float(v) for v in parts[k:k + n]]); k += n
            tr.t_h.append(float(parts[k])); k += 1
            tr.h.append(float(parts[k])); k += 1
            tr.h_scaled.append(float(parts[k])); k += 1
            tr.c.append(int(parts[k])); k += 1
            tr.d.append(int(parts[k])); k += 1
            tr.statuses.append(parts[k:k + n]); k += n
            tr.time_left.append([float(v) for v in parts[k:k + m]]); k += m
            tr.overrides.append(parts[k])
        return tr


def need_assignment(ts: TaskSet, cores: CoreSet, assignment: dict[int, str],
                    t_prem: float, t_h: float) -> bool:
    """Five ordered checks deciding whether the assignment must be rebuilt."""
    assigned_ids = set(assignment.values())
    # 1. any assigned task has finished
    for task_id in assigned_ids:
        if ts.by_id(task_id).time_left <= 0:
            return True
    # 2. all tasks finished -> nothing to do
    if all(t.time_left <= 0 for t in ts.tasks):
        return False
    # 3. any overheated core still holds a task
    for core, task_id in assignment.items():
        if cores.temps[core] > t_h:
            return True
    # 4. any task needs an override but is not executing
    for t in ts.tasks:
        if t.spec.id in assigned_ids or t.time_left <= 0:
            continue
        if t.overridden or t.time_left >= t_prem - TIME_EPS:
            return True
    # 5. any incomplete unassigned task while a core sits cold and idle
    has_waiting = any(
        t.time_left > 0 and t.spec.id not in assigned_ids for t in ts.tasks
    )
    if has_waiting:
        for core in cores.cores:
            if cores.statuses[core].code == "CI":
                return True
    return False


def assign_tasks_vtf(ts: TaskSet, cores: CoreSet, t_prem: float) -> dict[int, str]:
    """Rebuild the assignment from scratch.

    Overridden tasks go to the coolest free core of any temperature;
    remaining tasks (longest time-left first) go to the coolest free
    non-overheated core. Ties break by core index and task id.
    """
    pi_sorted = sorted(cores.cores, key=lambda i: (cores.temps[i], i))
    pi_prime = [i for i in pi_sorted if cores.statuses[i] != HOT_IDLE]
    runnable = [t for t in ts.tasks if t.time_left > 0]
    tau_sorted = sorted(runnable, key=lambda t: (-t.time_left, t.spec.id))
    tau_omega = [
        t for t in tau_sorted
        if t.overridden or t.time_left >= t_prem - TIME_EPS
    ]
    omega_ids = {t.spec.id for t in tau_omega}
    tau_prime = [t for t in tau_sorted if t.spec.id not in omega_ids]

    lam: dict[int, str] = {}
    for t in tau_omega:
        for core in pi_sorted:
            if core not in lam:
                lam[core] = t.spec.id
                break
    for t in tau_prime:
        for core in pi_prime:
            if core not in lam:
                lam[core] = t.spec.id
                break
    return lam


def _run(cfg: SimConfig, variable_threshold: bool) -> tuple[list[ScheduleEvent], Trace]:
    ts = cfg.make_taskset()
    params = cfg.thermal
    state = thermal_model.steady_state_init(params)
    cores = CoreSet.initial(params.n_cores, thermal_model.core_temperatures(state))
    cs = ControllerState(t_h=cfg.t_h0)
    lam: dict[int, str] = {}
    schedule: list[ScheduleEvent] = []
    trace = Trace(core_ids=list(cores.cores), task_ids=[s.id for s in cfg.tasks],
                  p_len=cfg.p_len, dt=cfg.dt)
    spp = cfg.steps_per_period

    def record(t_ms: float, h: float, h_scaled: float):
        trace.t_ms.append(t_ms)
        trace.temps.append([cores.temps[i] for i in cores.cores])
        trace.t_h.append(cs.t_h)
        trace.h.append(h)
        trace.h_scaled.append(h_scaled)
        trace.c.append(cs.c)
        trace.d.append(cs.d)
        trace.statuses.append([cores.statuses[i].code for i in cores.cores])
        trace.time_left.append([ts.by_id(tid).time_left for tid in trace.task_ids])
        trace.overrides.append("".join(
            "1" if ts.by_id(tid).overridden else "0" for tid in trace.task_ids))

    record(0.0, 0.0, 0.0)

    for k in range(cfg.total_steps):
        t_curr = k * cfg.dt
        prem_ticks = spp - (k % spp)
        t_prem = prem_ticks * cfg.dt

        # latch overrides: a task whose remaining time has met the
        # remaining-period line must run continuously to meet its deadline
        for t in ts.tasks:
            if t.time_left > 0 and t.time_left >= t_prem - TIME_EPS:
                t.overridden = True

        boundary_start = (k % spp == 0) and ts.tasks
        if k == 0 or boundary_start or need_assignment(ts, cores, lam, t_prem, cs.t_h):
            lam = assign_tasks_vtf(ts, cores, t_prem)
            schedule.append(ScheduleEvent(t=t_curr, assignment=dict(lam)))
            cores.statuses = update_states_vtf(cores, lam, cs.t_h)

        # execution grant: cold running cores, plus assigned overrides;
        # power is sampled at the start-of-step trace offset
        granted: set[str] = set()
        for core, task_id in lam.items():
            task = ts.by_id(task_id)
            if task.time_left <= 0:
                continue
            if task.overridden or cores.statuses[core].code == "CR":
                granted.add(task_id)
        power = thermal_model.power_from_assignment(lam, ts, params, executing=granted)
        for task_id in granted:
            advance_execution(ts.by_id(task_id), cfg.dt)

        k_next = k + 1
        t_next = k_next * cfg.dt

        h = h_scaled = 0.0
        if variable_threshold and ts.tasks and not any(t.overridden for t in ts.tasks):
            p_done = (k_next % spp) / spp
            _, sample = update_threshold(cs, ts, t_next, cfg.w_d,
                                         p_done=p_done, t_h_max=cfg.t_h_max)
            h, h_scaled = sample.h, sample.h_scaled
        else:
            cs.d = 0

        state = thermal_model.step(state, power, cfg.dt, params)
        cores.temps = thermal_model.core_temperatures(state)
        cores.statuses = update_states_vtf(cores, lam, cs.t_h)

        record(t_next, h, h_scaled)

        if k_next % spp == 0:
            for tid in release_period(ts, cfg.exec_time_factor):
                trace.miss_events.append((t_next, tid))

    return schedule, trace


def run_vtf_tas(cfg: SimConfig) -> tuple[list[ScheduleEvent], Trace]:
    """Full run with the variable threshold controller enabled."""
    return _run(cfg, variable_threshold=True)


def run_fixed_threshold(cfg: SimConfig) -> tuple[list[ScheduleEvent], Trace]:
    """Baseline: identical loop with the threshold pinned at t_h0."""
    return _run(cfg, variable_threshold=False)

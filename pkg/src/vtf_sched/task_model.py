"""Frame-periodic task set: specs, per-period state, execution accounting.

All tasks share one scheduling period (the frame). A task's remaining
execution time counts down while it is granted processor time and resets
to its WCET at every period boundary.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field

# Absolute slack (ms) for time comparisons; far below any sane dt, far
# above float drift accumulated over one period of repeated decrements.
TIME_EPS = 1e-6


@dataclass(frozen=True)
class TaskSpec:
    """Immutable description of one frame-periodic task.

    wcet is in ms, dynamic_power in watts. An optional power_trace
    ((offset_ms, watts), ...) replaces the constant dynamic power with a
    step-interpolated lookup over executed time.
    """

    id: str
    wcet: float
    dynamic_power: float
    power_trace: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        if self.wcet <= 0:
            raise ValueError(f"task {self.id}: wcet must be > 0")
        if self.dynamic_power < 0:
            raise ValueError(f"task {self.id}: dynamic_power must be >= 0")
        if self.power_trace is not None:
            prev = -float("inf")
            for off, watts in self.power_trace:
                if off <= prev:
                    raise ValueError(f"task {self.id}: power_trace offsets must be strictly increasing")
                if watts < 0:
                    raise ValueError(f"task {self.id}: power_trace samples must be >= 0")
                prev = off
            if prev > self.wcet + TIME_EPS:
                raise ValueError(f"task {self.id}: power_trace offset exceeds wcet")

    def power_at(self, executed: float) -> float:
        """Dynamic power after `executed` ms of progress (step interpolation)."""
        if not self.power_trace:
            return self.dynamic_power
        offsets = [s[0] for s in self.power_trace]
        i = bisect.bisect_right(offsets, executed) - 1
        if i < 0:
            return self.dynamic_power
        return self.power_trace[i][1]


@dataclass
class TaskState:
    """Mutable per-period execution state of one task."""

    spec: TaskSpec
    time_left: float
    overridden: bool = False
    completed_this_period: bool = False
    executed: float = 0.0  # ms executed this period; drives power-trace lookup


def advance_execution(task: TaskState, dt: float) -> TaskState:
    """Grant `dt` ms of execution; saturates at zero and flags completion."""
    if dt <= 0:
        raise ValueError("dt must be > 0")
    remaining = task.time_left - dt
    if remaining < TIME_EPS:
        remaining = 0.0
    task.executed += min(dt, task.time_left)
    task.time_left = remaining
    if remaining == 0.0:
        task.completed_this_period = True
        task.overridden = False
    return task


@dataclass
class TaskSet:
    """The scheduled task set and its common period length (ms)."""

    tasks: list[TaskState]
    p_len: float

    def __post_init__(self):
        if self.p_len <= 0:
            raise ValueError("p_len must be > 0")
        ids = [t.spec.id for t in self.tasks]
        if len(set(ids)) != len(ids):
            raise ValueError("task ids must be unique")
        for t in self.tasks:
            if t.spec.wcet > self.p_len + TIME_EPS:
                raise ValueError(f"task {t.spec.id}: wcet exceeds p_len")

    @classmethod
    def from_specs(cls, specs, p_len: float, exec_time_factor: float = 1.0) -> "TaskSet":
        states = [TaskState(spec=s, time_left=exec_time_factor * s.wcet) for s in specs]
        return cls(tasks=states, p_len=p_len)

    def by_id(self, task_id: str) -> TaskState:
        for t in self.tasks:
            if t.spec.id == task_id:
                return t
        raise KeyError(task_id)


def release_period(ts: TaskSet, exec_time_factor: float = 1.0) -> list[str]:
    """Reset every task for a new period; returns ids that missed the deadline.

    A task with time remaining at the boundary is a deadline miss; it is
    recorded and reset anyway so the simulation continues.
    """
    missed = []
    for t in ts.tasks:
        if t.time_left > 0:
            missed.append(t.spec.id)
        t.time_left = exec_time_factor * t.spec.wcet
        t.overridden = False
        t.completed_this_period = False
        t.executed = 0.0
    return missed


def mean_utilization(ts: TaskSet) -> float:
    """Mean per-task utilization: average of WCET / period length."""
    if not ts.tasks:
        raise ValueError("empty task set")
    return sum(t.spec.wcet for t in ts.tasks) / (len(ts.tasks) * ts.p_len)


def remaining_utilization(ts: TaskSet) -> float:
    """Mean remaining utilization: average of time-left / period length."""
    if not ts.tasks:
        raise ValueError("empty task set")
    return sum(t.time_left for t in ts.tasks) / (len(ts.tasks) * ts.p_len)

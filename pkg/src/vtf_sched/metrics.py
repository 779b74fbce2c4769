"""Post-processing of run traces: peaks, threshold violations, misses,
and the utilization-vs-fluid series.

All functions are pure over immutable traces; boundary rows are the rows
recorded at period multiples before the task-set reset, so remaining times
there still reflect the closing period.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from vtf_sched.scheduler import Trace
from vtf_sched.task_model import TIME_EPS, TaskSet, mean_utilization


@dataclass(frozen=True)
class RunMetrics:
    peak_temp: float
    max_violation: float
    deadline_misses: int
    per_period_peaks: tuple[float, ...] = field(default=())


def _check_nonempty(trace: Trace):
    if not trace.t_ms:
        raise ValueError("empty trace")


def _step_index(trace: Trace, row: int) -> int:
    return round(trace.t_ms[row] / trace.dt)


def peak_temperature(trace: Trace) -> float:
    """Max temperature over all steps and cores."""
    _check_nonempty(trace)
    return max(max(row) for row in trace.temps)


def max_threshold_violation(trace: Trace) -> float:
    """Max over steps of (hottest core minus the instantaneous threshold),
    clamped at zero."""
    _check_nonempty(trace)
    return max(0.0, max(max(row) - th for row, th in zip(trace.temps, trace.t_h)))


def deadline_misses(trace: Trace) -> int:
    """Count of (task, period) pairs with time remaining at the boundary."""
    _check_nonempty(trace)
    spp = round(trace.p_len / trace.dt)
    misses = 0
    for i in range(len(trace.t_ms)):
        k = _step_index(trace, i)
        if k > 0 and k % spp == 0:
            misses += sum(1 for tl in trace.time_left[i] if tl > TIME_EPS)
    return misses


def per_period_peaks(trace: Trace) -> list[float]:
    """Peak temperature within each scheduling period."""
    _check_nonempty(trace)
    spp = round(trace.p_len / trace.dt)
    peaks: list[float] = []
    for i in range(len(trace.t_ms)):
        k = _step_index(trace, i)
        period = 0 if k == 0 else (k - 1) // spp
        while len(peaks) <= period:
            peaks.append(float("-inf"))
        peaks[period] = max(peaks[period], max(trace.temps[i]))
    return peaks


def utilization_series(trace: Trace, ts: TaskSet):
    """Aligned (t_ms, u_sigma, u_f, worst_case) series behind the
    utilization-behavior plots.

    u_sigma is the mean remaining utilization of the schedule, u_f the
    remaining utilization of an ideal fluid schedule, and worst_case the
    remaining period fraction: a task whose own remaining utilization
    reaches that line must execute continuously to meet its deadline.
    """
    _check_nonempty(trace)
    spp = round(trace.p_len / trace.dt)
    u_tau = mean_utilization(ts)
    t_ms, u_sigma, u_f, worst = [], [], [], []
    for i in range(len(trace.t_ms)):
        k = _step_index(trace, i)
        # the row at a boundary closes its period: p_done is exactly 1 there
        p_done = 0.0 if k == 0 else ((k - 1) % spp + 1) / spp
        t_ms.append(trace.t_ms[i])
        u_sigma.append(sum(trace.time_left[i]) / (len(trace.time_left[i]) * trace.p_len))
        u_f.append(u_tau * (1.0 - p_done))
        worst.append(1.0 - p_done)
    return t_ms, u_sigma, u_f, worst


def compute_metrics(trace: Trace) -> RunMetrics:
    return RunMetrics(
        peak_temp=peak_temperature(trace),
        max_violation=max_threshold_violation(trace),
        deadline_misses=deadline_misses(trace),
        per_period_peaks=tuple(per_period_peaks(trace)),
    )

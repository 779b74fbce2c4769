"""Deterministic multicore thermal-aware scheduling simulator.

A variable-temperature-threshold scheduler driven by a fluid-scheduling
heuristic, an RC-network thermal model with exact LTI stepping, a
fixed-threshold baseline, and a metrics/sweep harness.
"""

from vtf_sched.task_model import TaskSpec, TaskState, TaskSet
from vtf_sched.core_state import ThermalStateTag, ExecStateTag, CoreStatus, CoreSet
from vtf_sched.thermal_model import ThermalModelParams, ThermalState
from vtf_sched.threshold_controller import ControllerState, HeuristicSample
from vtf_sched.scheduler import SimConfig, ScheduleEvent, Trace, run_vtf_tas, run_fixed_threshold
from vtf_sched.metrics import RunMetrics, compute_metrics

__all__ = [
    "TaskSpec", "TaskState", "TaskSet",
    "ThermalStateTag", "ExecStateTag", "CoreStatus", "CoreSet",
    "ThermalModelParams", "ThermalState",
    "ControllerState", "HeuristicSample",
    "SimConfig", "ScheduleEvent", "Trace", "run_vtf_tas", "run_fixed_threshold",
    "RunMetrics", "compute_metrics",
]

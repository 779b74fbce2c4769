"""Scenario file ingestion and validation.

A scenario is a JSON file bundling the simulation parameters, the task
set and the thermal model parameters. Unknown keys are rejected so typos
fail loudly. See README for the schema.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from vtf_sched.scheduler import ConfigError, SimConfig
from vtf_sched.task_model import TaskSpec
from vtf_sched.thermal_model import ThermalModelParams


class ScenarioError(ValueError):
    """Scenario file is malformed; the message names the offending field."""


_TOP_KEYS = {"p_len_ms", "dt_ms", "t_end_ms", "t_h0_c", "w_d",
             "exec_time_factor", "t_h_max_c", "tasks", "thermal"}
_TASK_KEYS = {"id", "wcet_ms", "dynamic_power_w", "power_trace_csv"}
_THERMAL_KEYS = {"n_cores", "c_th_j_per_c", "r_amb_c_per_w", "r_lat_c_per_w",
                 "t_amb_c", "p_static_w"}


def _reject_unknown(mapping: dict, allowed: set, where: str):
    unknown = set(mapping) - allowed
    if unknown:
        raise ScenarioError(f"{where}: unknown key(s) {sorted(unknown)}")


def _number(mapping: dict, key: str, where: str, default=None):
    if key not in mapping:
        if default is not None:
            return default
        raise ScenarioError(f"{where}.{key}: missing")
    v = mapping[key]
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise ScenarioError(f"{where}.{key}: must be a number")
    return float(v)


def _load_power_trace(path: Path) -> tuple[tuple[float, float], ...]:
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != ["offset_ms", "power_w"]:
                raise ScenarioError(
                    f"{path}: power trace header must be offset_ms,power_w")
            return tuple((float(r["offset_ms"]), float(r["power_w"])) for r in reader)
    except OSError as e:
        raise ScenarioError(f"{path}: {e}") from e


def load_scenario(path: str | Path, overrides: dict | None = None) -> SimConfig:
    """Load, validate and (optionally) override a scenario file.

    `overrides` may carry w_d, t_h0, dt, t_end taken from the command line;
    they take precedence over file values.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as e:
        raise ScenarioError(f"{path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ScenarioError(f"{path}: invalid JSON: {e}") from e
    if not isinstance(raw, dict):
        raise ScenarioError(f"{path}: top level must be an object")
    _reject_unknown(raw, _TOP_KEYS, "scenario")

    thermal_raw = raw.get("thermal")
    if not isinstance(thermal_raw, dict):
        raise ScenarioError("scenario.thermal: missing or not an object")
    _reject_unknown(thermal_raw, _THERMAL_KEYS, "scenario.thermal")
    n_cores = thermal_raw.get("n_cores")
    if not isinstance(n_cores, int) or isinstance(n_cores, bool):
        raise ScenarioError("scenario.thermal.n_cores: must be an integer")
    try:
        thermal = ThermalModelParams(
            n_cores=n_cores,
            c_th=_number(thermal_raw, "c_th_j_per_c", "scenario.thermal"),
            r_amb=_number(thermal_raw, "r_amb_c_per_w", "scenario.thermal"),
            r_lat=_number(thermal_raw, "r_lat_c_per_w", "scenario.thermal"),
            t_amb=_number(thermal_raw, "t_amb_c", "scenario.thermal"),
            p_static=_number(thermal_raw, "p_static_w", "scenario.thermal"),
        )
    except ValueError as e:
        raise ScenarioError(f"scenario.thermal: {e}") from e

    tasks_raw = raw.get("tasks")
    if not isinstance(tasks_raw, list):
        raise ScenarioError("scenario.tasks: missing or not a list")
    specs = []
    for i, entry in enumerate(tasks_raw):
        where = f"scenario.tasks[{i}]"
        if not isinstance(entry, dict):
            raise ScenarioError(f"{where}: must be an object")
        _reject_unknown(entry, _TASK_KEYS, where)
        task_id = entry.get("id")
        if not isinstance(task_id, str) or not task_id:
            raise ScenarioError(f"{where}.id: must be a non-empty string")
        trace = None
        if "power_trace_csv" in entry:
            trace = _load_power_trace(path.parent / entry["power_trace_csv"])
        try:
            specs.append(TaskSpec(
                id=task_id,
                wcet=_number(entry, "wcet_ms", where),
                dynamic_power=_number(entry, "dynamic_power_w", where),
                power_trace=trace,
            ))
        except ValueError as e:
            raise ScenarioError(f"{where}: {e}") from e

    overrides = overrides or {}
    def pick(cli_key, file_key, default=None):
        if overrides.get(cli_key) is not None:
            return float(overrides[cli_key])
        return _number(raw, file_key, "scenario", default=default)

    t_h_max = None
    if "t_h_max_c" in raw:
        t_h_max = _number(raw, "t_h_max_c", "scenario")
    try:
        return SimConfig(
            t_h0=pick("t_h0", "t_h0_c"),
            t_end=pick("t_end", "t_end_ms"),
            w_d=pick("w_d", "w_d"),
            p_len=_number(raw, "p_len_ms", "scenario"),
            dt=pick("dt", "dt_ms"),
            thermal=thermal,
            tasks=tuple(specs),
            exec_time_factor=_number(raw, "exec_time_factor", "scenario", default=1.0),
            t_h_max=t_h_max,
        )
    except ConfigError as e:
        raise ScenarioError(str(e)) from e
    except ValueError as e:
        raise ScenarioError(str(e)) from e

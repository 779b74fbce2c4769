"""RC-network thermal model with exact LTI stepping.

One thermal node per core on a linear-chain floorplan:

    c_th * dT_i/dt = p_i - (T_i - t_amb)/r_amb - sum_adj (T_i - T_j)/r_lat

Steps use the exact matrix-exponential propagator for the chosen dt, so
integration is unconditionally stable and bit-deterministic. Time is in
ms throughout the public API; power in watts, temperatures in deg C.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

DEFAULT_EPSILON = 1e-9     # deg C per step
DEFAULT_MAX_TIME = 2000.0  # ms
DEFAULT_WARMSTART_DT = 0.1  # ms


class SteadyStateError(RuntimeError):
    """Raised when the idle warm start fails to converge in time."""

    def __init__(self, last_gradient: float, max_time: float):
        super().__init__(
            f"steady state not reached within {max_time} ms "
            f"(last max-gradient {last_gradient:.3e} degC/step)"
        )
        self.last_gradient = last_gradient


@dataclass(frozen=True)
class ThermalModelParams:
    """Per-core RC parameters; symmetric linear-chain lateral coupling.

    c_th: J/degC, r_amb and r_lat: degC/W, t_amb: degC, p_static: W.
    """

    n_cores: int
    c_th: float
    r_amb: float
    r_lat: float
    t_amb: float
    p_static: float

    def __post_init__(self):
        if self.n_cores < 1:
            raise ValueError("n_cores must be >= 1")
        if self.c_th <= 0 or self.r_amb <= 0 or self.r_lat <= 0:
            raise ValueError("c_th, r_amb and r_lat must be > 0")
        if not np.isfinite(self.t_amb):
            raise ValueError("t_amb must be finite")
        if self.p_static < 0:
            raise ValueError("p_static must be >= 0")


@dataclass(frozen=True)
class ThermalState:
    """Node temperatures (deg C), one per core."""

    node_temps: tuple[float, ...]

    def as_array(self) -> np.ndarray:
        return np.array(self.node_temps)


def system_matrix(params: ThermalModelParams) -> np.ndarray:
    """Continuous-time state matrix A (1/s) of dT/dt = A T + u."""
    n = params.n_cores
    a = np.zeros((n, n))
    for i in range(n):
        g = 1.0 / params.r_amb
        if i > 0:
            a[i, i - 1] = 1.0 / params.r_lat
            g += 1.0 / params.r_lat
        if i < n - 1:
            a[i, i + 1] = 1.0 / params.r_lat
            g += 1.0 / params.r_lat
        a[i, i] = -g
    return a / params.c_th


@lru_cache(maxsize=32)
def _propagator(params: ThermalModelParams, dt_ms: float):
    """Exact discrete propagator (E, F): T' = E T + F u, u the input term."""
    a = system_matrix(params)
    e = expm(a * (dt_ms * 1e-3))
    f = np.linalg.solve(a, e - np.eye(params.n_cores))
    e.setflags(write=False)
    f.setflags(write=False)
    return e, f


def _input_vector(params: ThermalModelParams, power: np.ndarray) -> np.ndarray:
    """Input term u (degC/s) for the given per-core power vector."""
    return (power + params.t_amb / params.r_amb) / params.c_th


def power_from_assignment(assignment: dict[int, str], ts, params: ThermalModelParams,
                          executing: set[str] | None = None) -> np.ndarray:
    """Per-core power: static everywhere plus dynamic power of executing tasks.

    `executing` restricts dynamic power to tasks actually granted time this
    step; None means every assigned incomplete task counts as executing.
    """
    power = np.full(params.n_cores, params.p_static)
    for core, task_id in assignment.items():
        task = ts.by_id(task_id)
        if executing is not None:
            if task_id not in executing:
                continue
        elif task.time_left <= 0:
            continue
        power[core] += task.spec.power_at(task.executed)
    return power


def step(state: ThermalState, power, dt: float, params: ThermalModelParams) -> ThermalState:
    """Advance the thermal state by dt ms under constant per-core power."""
    if dt <= 0:
        raise ValueError("unstable step size: dt must be > 0")
    power = np.asarray(power, dtype=float)
    if power.shape != (params.n_cores,):
        raise ValueError("power vector length must equal n_cores")
    if np.any(power < 0):
        raise ValueError("power must be >= 0")
    e, f = _propagator(params, dt)
    t_new = e @ state.as_array() + f @ _input_vector(params, power)
    return ThermalState(node_temps=tuple(float(v) for v in t_new))


def core_temperatures(state: ThermalState) -> dict[int, float]:
    """Per-core temperature map consumed by the core state machine."""
    return dict(enumerate(state.node_temps))


def steady_state_temps(params: ThermalModelParams, power: np.ndarray) -> np.ndarray:
    """Closed-form fixed point of the ODE under constant power."""
    a = system_matrix(params)
    return np.linalg.solve(a, -_input_vector(params, power))


def steady_state_init(params: ThermalModelParams,
                      epsilon: float = DEFAULT_EPSILON,
                      max_time: float = DEFAULT_MAX_TIME,
                      dt: float = DEFAULT_WARMSTART_DT,
                      history: list | None = None) -> ThermalState:
    """Idle warm start: integrate under static power from uniform ambient
    until the max absolute per-step change drops below epsilon.

    When `history` is given, (t_ms, temps tuple, max_abs_gradient) rows are
    appended for every step taken.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be > 0")
    e, f = _propagator(params, dt)
    u = _input_vector(params, np.full(params.n_cores, params.p_static))
    temps = np.full(params.n_cores, float(params.t_amb))
    t = 0.0
    steps = 0
    grad = float("inf")
    while t < max_time - 1e-12:
        new = e @ temps + f @ u
        grad = float(np.max(np.abs(new - temps)))
        temps = new
        steps += 1
        t = steps * dt
        if history is not None:
            history.append((t, tuple(temps), grad))
        if grad < epsilon:
            return ThermalState(node_temps=tuple(float(v) for v in temps))
    raise SteadyStateError(last_gradient=grad, max_time=max_time)

"""CPU core status tracking: {Cold, Hot} x {Idle, Running}.

A core at or above the hot threshold is forcibly idled, so Hot+Running is
never constructed. Statuses serialize as two-character codes CI, CR, HI.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class ThermalStateTag(Enum):
    COLD = "C"
    HOT = "H"


class ExecStateTag(Enum):
    IDLE = "I"
    RUNNING = "R"


@dataclass(frozen=True)
class CoreStatus:
    thermal: ThermalStateTag
    execution: ExecStateTag

    def __post_init__(self):
        if self.thermal is ThermalStateTag.HOT and self.execution is ExecStateTag.RUNNING:
            raise ValueError("Hot+Running status is unreachable and may not be constructed")

    @property
    def code(self) -> str:
        return self.thermal.value + self.execution.value

    @classmethod
    def from_code(cls, code: str) -> "CoreStatus":
        return cls(ThermalStateTag(code[0]), ExecStateTag(code[1]))


COLD_IDLE = CoreStatus(ThermalStateTag.COLD, ExecStateTag.IDLE)
COLD_RUNNING = CoreStatus(ThermalStateTag.COLD, ExecStateTag.RUNNING)
HOT_IDLE = CoreStatus(ThermalStateTag.HOT, ExecStateTag.IDLE)


@dataclass
class CoreSet:
    """Ordered core ids with their current statuses and temperatures (deg C)."""

    cores: list[int]
    statuses: dict[int, CoreStatus] = field(default_factory=dict)
    temps: dict[int, float] = field(default_factory=dict)

    @classmethod
    def initial(cls, n_cores: int, temps: dict[int, float] | None = None) -> "CoreSet":
        cores = list(range(n_cores))
        return cls(
            cores=cores,
            statuses={i: COLD_IDLE for i in cores},
            temps=dict(temps) if temps is not None else {i: 0.0 for i in cores},
        )


def update_states_vtf(cores: CoreSet, assignment: dict[int, str], t_h: float) -> dict[int, CoreStatus]:
    """Recompute every core's status from temperature, assignment and threshold.

    A core strictly below t_h is Cold (Running if assigned, else Idle);
    a core at or above t_h is Hot+Idle regardless of assignment.
    """
    statuses = {}
    for core in cores.cores:
        if core not in cores.temps:
            raise KeyError(f"incomplete temperature map: core {core}")
        if cores.temps[core] < t_h:
            statuses[core] = COLD_RUNNING if assignment.get(core) is not None else COLD_IDLE
        else:
            statuses[core] = HOT_IDLE
    return statuses

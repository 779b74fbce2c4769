"""Variable-threshold controller driven by the fluid-scheduling heuristic.

Each step compares the schedule's mean remaining utilization against the
remaining utilization of an ideal fluid schedule. The threshold moves up
when tasks are behind the fluid rate and down when they are ahead, with a
dead zone of half-width w_d around zero and 1/(C+1) damping over runs of
consecutive same-direction updates.
"""

from __future__ import annotations

from dataclasses import dataclass

from vtf_sched.task_model import TaskSet, mean_utilization, remaining_utilization

# Floor applied to the fluid utilization before the ratio; end-of-period
# scaling already crushes the result, this only prevents overflow.
U_F_FLOOR = 1e-6


@dataclass
class ControllerState:
    """Persistent threshold and damping state.

    c counts consecutive same-direction updates; d / d_prev hold the last
    two update directions in {-1, 0, 1}.
    """

    t_h: float
    c: int = 0
    d: int = 0
    d_prev: int = 0


@dataclass(frozen=True)
class HeuristicSample:
    """Per-step controller diagnostics."""

    p_done: float
    u_tau: float
    u_f: float
    u_sigma: float
    h: float
    h_scaled: float
    clamped: bool = False


def compute_heuristic(u_sigma: float, u_f: float) -> float:
    """Mean of ratio and difference of actual vs fluid utilization, minus 0.5.

    Zero exactly when u_sigma == u_f. The fluid utilization is clamped to
    U_F_FLOOR so the ratio never divides by zero.
    """
    u_f = max(u_f, U_F_FLOOR)
    return ((u_sigma / u_f) + (u_sigma - u_f)) / 2.0 - 0.5


def update_threshold(cs: ControllerState, ts: TaskSet, t_curr: float, w_d: float,
                     p_done: float | None = None,
                     t_h_max: float | None = None) -> tuple[ControllerState, HeuristicSample]:
    """One controller step; mutates cs in place and returns (cs, sample).

    The k-th update in an unbroken run of same-direction updates has
    magnitude exactly 1/k; any no-update step or direction flip starts a
    fresh run. Callers with exact tick arithmetic may pass p_done directly
    to avoid float-modulo drift at period boundaries.
    """
    if not ts.tasks:
        raise ValueError("empty task set")
    if p_done is None:
        p_done = (t_curr % ts.p_len) / ts.p_len
    u_tau = mean_utilization(ts)
    u_f = -1.0 * u_tau * p_done + u_tau
    u_sigma = remaining_utilization(ts)
    h = compute_heuristic(u_sigma, u_f)
    h_scaled = h * (1.0 - p_done)

    d = 0
    if h_scaled > w_d:
        d = 1
    elif h_scaled < -w_d:
        d = -1

    if d != 0:
        if cs.d_prev != 0 and d != cs.d_prev:
            cs.c = 0  # direction flip starts a fresh damping run
        cs.t_h += d * (1.0 / (cs.c + 1))
        cs.c += 1
    else:
        cs.c = 0
    cs.d = d
    cs.d_prev = d
    if t_h_max is not None and cs.t_h > t_h_max:
        cs.t_h = t_h_max

    sample = HeuristicSample(
        p_done=p_done, u_tau=u_tau, u_f=u_f, u_sigma=u_sigma,
        h=h, h_scaled=h_scaled, clamped=u_f <= U_F_FLOOR,
    )
    return cs, sample

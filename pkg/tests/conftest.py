import json
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parents[1]

# one verdict line per end-to-end criterion, printed after the test run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
REFERENCE_SCENARIO = REPO_ROOT / "scenarios" / "reference.json"
SINGLE_CORE_SCENARIO = REPO_ROOT / "scenarios" / "single_core.json"


@pytest.fixture
def reference_scenario():
    return REFERENCE_SCENARIO


@pytest.fixture
def fast_scenario(tmp_path):
    """Small scenario for CLI-level tests: 2 periods at a coarse step."""
    doc = {
        "p_len_ms": 100.0,
        "dt_ms": 0.5,
        "t_end_ms": 200.0,
        "t_h0_c": 56.0,
        "w_d": 0.0,
        "tasks": [
            {"id": "a", "wcet_ms": 40.0, "dynamic_power_w": 45.0},
            {"id": "b", "wcet_ms": 20.0, "dynamic_power_w": 30.0},
        ],
        "thermal": {
            "n_cores": 2,
            "c_th_j_per_c": 0.05,
            "r_amb_c_per_w": 2.0,
            "r_lat_c_per_w": 2.0,
            "t_amb_c": 45.0,
            "p_static_w": 1.0,
        },
    }
    path = tmp_path / "fast.json"
    path.write_text(json.dumps(doc))
    return path


def assignment_for_row(trace, schedule, row):
    """Replay the schedule to recover the assignment in effect for a trace row.

    The row at time t reflects the assignment chosen at the start of its
    step, i.e. the latest schedule event strictly before t.
    """
    t = trace.t_ms[row]
    lam = {}
    for ev in schedule:
        if ev.t < t - trace.dt / 2:
            lam = ev.assignment
        else:
            break
    return lam

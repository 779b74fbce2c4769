import json

import pytest

from vtf_sched.cli import main
from vtf_sched.scenario import ScenarioError, load_scenario
from vtf_sched.scheduler import Trace, run_vtf_tas


def rewrite(path, tmp_path, mutate):
    doc = json.loads(path.read_text())
    mutate(doc)
    out = tmp_path / "mutated.json"
    out.write_text(json.dumps(doc))
    return out


class TestLoadScenario:
    def test_reference_loads(self, reference_scenario):
        cfg = load_scenario(reference_scenario)
        assert cfg.p_len == 100.0
        assert len(cfg.tasks) == 4
        assert cfg.thermal.n_cores == 4

    def test_cli_overrides_take_precedence(self, fast_scenario):
        cfg = load_scenario(fast_scenario, {"w_d": 0.25, "t_h0": 61.0})
        assert cfg.w_d == 0.25
        assert cfg.t_h0 == 61.0

    def test_unknown_top_key_named(self, fast_scenario, tmp_path):
        bad = rewrite(fast_scenario, tmp_path, lambda d: d.update(perriod_ms=1.0))
        with pytest.raises(ScenarioError, match="perriod_ms"):
            load_scenario(bad)

    def test_unknown_task_key_named(self, fast_scenario, tmp_path):
        bad = rewrite(fast_scenario, tmp_path,
                      lambda d: d["tasks"][0].update(wect_ms=1.0))
        with pytest.raises(ScenarioError, match="wect_ms"):
            load_scenario(bad)

    def test_missing_thermal_field_named(self, fast_scenario, tmp_path):
        bad = rewrite(fast_scenario, tmp_path,
                      lambda d: d["thermal"].pop("c_th_j_per_c"))
        with pytest.raises(ScenarioError, match="c_th_j_per_c"):
            load_scenario(bad)

    def test_dt_not_dividing_period_named(self, fast_scenario, tmp_path):
        bad = rewrite(fast_scenario, tmp_path, lambda d: d.update(dt_ms=0.3))
        with pytest.raises(ScenarioError, match="dt_ms"):
            load_scenario(bad)

    def test_invalid_json_reported(self, tmp_path):
        p = tmp_path / "broken.json"
        p.write_text("{not json")
        with pytest.raises(ScenarioError, match="invalid JSON"):
            load_scenario(p)

    def test_missing_file_reported(self, tmp_path):
        with pytest.raises(ScenarioError):
            load_scenario(tmp_path / "nope.json")

    def test_power_trace_csv(self, fast_scenario, tmp_path):
        trace_csv = tmp_path / "power_a.csv"
        trace_csv.write_text("offset_ms,power_w\n0.0,40.0\n20.0,50.0\n")
        doc = json.loads(fast_scenario.read_text())
        doc["tasks"][0]["power_trace_csv"] = "power_a.csv"
        p = tmp_path / "traced.json"
        p.write_text(json.dumps(doc))
        cfg = load_scenario(p)
        assert cfg.tasks[0].power_trace == ((0.0, 40.0), (20.0, 50.0))

    def test_bad_power_trace_header(self, fast_scenario, tmp_path):
        trace_csv = tmp_path / "power_a.csv"
        trace_csv.write_text("time,watts\n0.0,40.0\n")
        doc = json.loads(fast_scenario.read_text())
        doc["tasks"][0]["power_trace_csv"] = "power_a.csv"
        p = tmp_path / "traced.json"
        p.write_text(json.dumps(doc))
        with pytest.raises(ScenarioError, match="offset_ms,power_w"):
            load_scenario(p)


class TestTraceRoundTrip:
    def test_csv_round_trip_is_lossless(self, fast_scenario, tmp_path):
        cfg = load_scenario(fast_scenario)
        _, trace = run_vtf_tas(cfg)
        p = tmp_path / "trace.csv"
        with open(p, "w") as fh:
            trace.to_csv(fh)
        with open(p) as fh:
            back = Trace.from_csv(fh, cfg.p_len, cfg.dt)
        assert back.t_ms == trace.t_ms
        assert back.temps == trace.temps
        assert back.t_h == trace.t_h
        assert back.statuses == trace.statuses
        assert back.time_left == trace.time_left
        assert back.overrides == trace.overrides


class TestCliRun:
    def test_run_writes_output_bundle(self, fast_scenario, tmp_path):
        out = tmp_path / "out"
        rc = main(["run", str(fast_scenario), "-o", str(out)])
        assert rc == 0
        assert (out / "trace.csv").exists()
        assert (out / "schedule.jsonl").exists()
        payload = json.loads((out / "metrics.json").read_text())
        assert payload["deadline_misses"] == 0
        assert payload["peak_temp_c"] > payload["t_h0_c"] - 20.0
        events = [json.loads(line)
                  for line in (out / "schedule.jsonl").read_text().splitlines()]
        assert events[0]["t_ms"] == 0.0

    def test_run_validation_error_exit_2(self, fast_scenario, tmp_path, capsys):
        bad = rewrite(fast_scenario, tmp_path, lambda d: d.update(dt_ms=0.3))
        rc = main(["run", str(bad), "-o", str(tmp_path / "out")])
        assert rc == 2
        assert "dt_ms" in capsys.readouterr().err

    def test_fixed_threshold_flag(self, fast_scenario, tmp_path):
        out = tmp_path / "fixed"
        rc = main(["run", str(fast_scenario), "-o", str(out),
                   "--fixed-threshold", "--t-h0", "75.0"])
        assert rc == 0
        with open(out / "trace.csv") as fh:
            tr = Trace.from_csv(fh, 100.0, 0.5)
        assert all(v == 75.0 for v in tr.t_h)


class TestCliSweep:
    def test_sweep_summary_and_subdirs(self, fast_scenario, tmp_path):
        out = tmp_path / "sweep"
        rc = main(["sweep", str(fast_scenario), "-o", str(out), "--w-d", "0,0.01"])
        assert rc == 0
        lines = (out / "sweep_summary.csv").read_text().splitlines()
        assert lines[0] == "w_d,peak_temp_c,max_violation_c,deadline_misses"
        assert len(lines) == 3
        assert lines[1].startswith("0,")
        assert (out / "wd_0" / "metrics.json").exists()
        assert (out / "wd_0.01" / "metrics.json").exists()
        assert not (out / "PARTIAL").exists()


class TestCliWarmstart:
    def test_warmstart_outputs(self, fast_scenario, tmp_path):
        out = tmp_path / "ws"
        rc = main(["warmstart", str(fast_scenario), "-o", str(out)])
        assert rc == 0
        lines = (out / "warmstart.csv").read_text().splitlines()
        assert lines[0] == "t_ms,node0_c,node1_c,max_abs_gradient"
        grads = [float(line.split(",")[-1]) for line in lines[1:]]
        assert all(b <= a + 1e-15 for a, b in zip(grads, grads[1:]))
        state = json.loads((out / "warmstart_state.json").read_text())
        # symmetric two-core model: identical node temperatures
        a, b = state["node_temps_c"]
        assert abs(a - b) < 1e-9


class TestCliBaseline:
    def test_degenerate_grid(self, fast_scenario, tmp_path):
        out = tmp_path / "base"
        rc = main(["baseline", str(fast_scenario), "-o", str(out),
                   "--t-h0-grid", "75"])
        assert rc == 0
        best = json.loads((out / "baseline_best.json").read_text())
        assert best["grid"] == [75.0]
        summary = (out / "baseline_summary.csv").read_text().splitlines()
        assert summary[0] == "t_h0_c,peak_temp_c,max_violation_c,deadline_misses"
        assert len(summary) == 2

    def test_best_requires_zero_misses(self, fast_scenario, tmp_path):
        out = tmp_path / "base2"
        rc = main(["baseline", str(fast_scenario), "-o", str(out),
                   "--t-h0-grid", "46,75"])
        assert rc == 0
        best = json.loads((out / "baseline_best.json").read_text())
        rows = (out / "baseline_summary.csv").read_text().splitlines()[1:]
        misses = {r.split(",")[0]: int(r.split(",")[-1]) for r in rows}
        if best["best_t_h0_c"] is not None:
            assert misses[str(int(best["best_t_h0_c"]))
                          if best["best_t_h0_c"].is_integer()
                          else str(best["best_t_h0_c"])] == 0

import csv
import json
import subprocess
import sys

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import chain_for
from swapchannel import PulseEvent, PulseSchedule, Window, schedule_to_json, swap_pulses
from swapchannel.cli import main

BUNDLED = ("fig2_quantum_wire", "fig4_classical_wire", "table1_copy")


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSolveCommand:
    def test_reference_point_json(self, capsys):
        code, out, _ = run_cli(capsys, "solve", "--t-ns", "10")
        assert code == 0
        obj = json.loads(out)
        assert_allclose(obj["delta_mhz"], 25.0, atol=1e-12)
        assert_allclose(obj["xi_mhz"], 125.0 * np.sqrt(3.0) / 10.0, rtol=1e-12)
        assert_allclose(obj["f1_mhz"], 100.0)
        assert_allclose(obj["f2_mhz"], 50.0)
        assert obj["conditions"]["ok"] is True

    def test_solve_from_coupling(self, capsys):
        code, out, _ = run_cli(capsys, "solve", "--delta-mhz", "2.5")
        assert code == 0
        assert_allclose(json.loads(out)["t_ns"], 100.0, rtol=1e-12)

    def test_out_file_matches_stdout(self, capsys, tmp_path):
        path = tmp_path / "design.json"
        code, out, _ = run_cli(capsys, "solve", "--t-ns", "10", "--out", str(path))
        assert code == 0
        assert path.read_text() == out

    def test_infeasible_exits_2(self, capsys):
        code, _, err = run_cli(capsys, "solve", "--t-ns", "10", "--m", "1", "--n", "1")
        assert code == 2
        assert "infeasible" in err

    def test_requires_exactly_one_anchor(self, capsys):
        code, _, err = run_cli(capsys, "solve")
        assert code == 1
        code, _, err = run_cli(capsys, "solve", "--t-ns", "10", "--delta-mhz", "25")
        assert code == 1
        assert "exactly one" in err


class TestScheduleAndValidate:
    def test_quantum_schedule_round_trips_through_validate(self, capsys, tmp_path):
        path = tmp_path / "wire.json"
        code, _, _ = run_cli(
            capsys,
            "schedule", "--kind", "quantum", "--n-qubits", "5",
            "--n-states", "2", "--out", str(path),
        )
        assert code == 0
        obj = json.loads(path.read_text())
        assert obj["n_qubits"] == 5
        code, out, _ = run_cli(capsys, "validate", "--schedule", str(path))
        assert code == 0
        report = json.loads(out)
        assert report["ok"] is True
        assert report["violations"] == []
        assert report["line_check"]["ok"] is True

    def test_classical_schedule(self, capsys, tmp_path):
        path = tmp_path / "bits.json"
        code, _, _ = run_cli(
            capsys,
            "schedule", "--kind", "classical", "--n-qubits", "6",
            "--bits", "101", "--out", str(path),
        )
        assert code == 0
        code, out, _ = run_cli(capsys, "validate", "--schedule", str(path))
        assert code == 0

    def test_schedule_to_stdout(self, capsys):
        code, out, _ = run_cli(
            capsys, "schedule", "--kind", "quantum", "--n-qubits", "3", "--n-states", "1"
        )
        assert code == 0
        assert json.loads(out)["format"].startswith("swapchannel-schedule/")

    def test_missing_kind_arguments(self, capsys):
        code, _, err = run_cli(capsys, "schedule", "--kind", "quantum", "--n-qubits", "5")
        assert code == 1
        assert "n-states" in err
        code, _, err = run_cli(capsys, "schedule", "--kind", "classical", "--n-qubits", "6")
        assert code == 1
        code, _, err = run_cli(
            capsys, "schedule", "--kind", "classical", "--n-qubits", "6", "--bits", "21"
        )
        assert code == 1

    def test_validate_flags_bad_schedule(self, capsys, tmp_path, design):
        spec = chain_for(design, 4, eps_high=25000.0)
        triple = swap_pulses(spec, 1, 2, design.t_ns)
        inject = Window(
            start_ns=-design.t_ns,
            duration_ns=design.t_ns,
            biases_mhz=triple.windows[0].biases_mhz,
            events=(PulseEvent(kind="inject", qubit=0, data_index=0),),
        )
        bad = PulseSchedule(n_qubits=4, windows=(inject,) + triple.windows)
        path = tmp_path / "bad.json"
        path.write_text(schedule_to_json(bad, None))
        code, out, _ = run_cli(capsys, "validate", "--schedule", str(path))
        assert code == 3
        report = json.loads(out)
        assert report["ok"] is False
        assert report["violations"][0]["kind"] == "sacrificial_occupied"

    def test_validate_unreadable_or_malformed(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "validate", "--schedule", str(tmp_path / "none.json"))
        assert code == 1
        broken = tmp_path / "broken.json"
        broken.write_text("{]")
        code, _, err = run_cli(capsys, "validate", "--schedule", str(broken))
        assert code == 1


class TestTraceCommand:
    def test_csv_columns_agree(self, capsys, tmp_path):
        path = tmp_path / "trace.csv"
        code, out, _ = run_cli(
            capsys,
            "trace", "--delta-mhz", "25", "--bias-mhz", "43.30127018922193",
            "--duration-ns", "40", "--samples", "80", "--out", str(path),
        )
        assert code == 0
        summary = json.loads(out)
        assert summary["rows"] == 81
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 81
        assert list(rows[0]) == ["time_ns", "p1_simulated", "p1_analytic"]
        for row in rows:
            assert_allclose(
                float(row["p1_simulated"]), float(row["p1_analytic"]), atol=1e-9
            )

    def test_plot_script_references_csv(self, capsys, tmp_path):
        path = tmp_path / "trace.csv"
        script = tmp_path / "plot.py"
        code, _, _ = run_cli(
            capsys,
            "trace", "--delta-mhz", "10", "--duration-ns", "5",
            "--out", str(path), "--plot-script", str(script),
        )
        assert code == 0
        body = script.read_text()
        assert str(path) in body
        assert "matplotlib" in body

    def test_zero_duration_gives_empty_trace(self, capsys, tmp_path):
        path = tmp_path / "trace.csv"
        code, out, _ = run_cli(
            capsys, "trace", "--delta-mhz", "10", "--duration-ns", "0", "--out", str(path)
        )
        assert code == 0
        assert json.loads(out)["rows"] == 0
        assert path.read_text().strip() == "time_ns,p1_simulated,p1_analytic"

    def test_negative_duration_rejected(self, capsys, tmp_path):
        code, _, _ = run_cli(
            capsys,
            "trace", "--delta-mhz", "10", "--duration-ns", "-1",
            "--out", str(tmp_path / "x.csv"),
        )
        assert code == 1

    def test_zero_samples_rejected(self, capsys, tmp_path):
        code, _, err = run_cli(
            capsys,
            "trace", "--delta-mhz", "10", "--duration-ns", "10",
            "--samples", "0", "--out", str(tmp_path / "x.csv"),
        )
        assert code == 1
        assert "--samples" in err


class TestRunCommand:
    @pytest.mark.parametrize("name", BUNDLED)
    def test_bundled_configs_pass(self, capsys, tmp_path, name):
        code, out, _ = run_cli(capsys, "run", "--config", name, "--out-dir", str(tmp_path))
        assert code == 0
        lines = [l for l in out.splitlines() if l.startswith(("PASS", "FAIL"))]
        assert lines and all(l.startswith("PASS") for l in lines)
        report_files = list(tmp_path.glob("*report*.json"))
        assert len(report_files) == 1
        report = json.loads(report_files[0].read_text())
        assert report["assertions"]["passed"] is True

    def test_quantum_wire_outputs_schedule_file(self, capsys, tmp_path):
        code, _, _ = run_cli(
            capsys, "run", "--config", "fig2_quantum_wire", "--out-dir", str(tmp_path)
        )
        assert code == 0
        sch = json.loads((tmp_path / "quantum_wire_schedule.json").read_text())
        assert sch["n_qubits"] == 5

    def test_reports_are_deterministic(self, capsys, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for d in (a, b):
            code, _, _ = run_cli(capsys, "run", "--config", "table1_copy", "--out-dir", str(d))
            assert code == 0
        (name,) = [p.name for p in a.glob("*.json")]
        assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_failing_assertion_exits_3(self, capsys, tmp_path):
        cfg = {
            "experiment": "copy_table",
            "t_ns": 10.0,
            "mode": "full",
            "assertions": {"min_fidelity": 1.1},
            "outputs": {"report": "copy.json"},
        }
        path = tmp_path / "impossible.json"
        path.write_text(json.dumps(cfg))
        code, out, _ = run_cli(capsys, "run", "--config", str(path), "--out-dir", str(tmp_path))
        assert code == 3
        assert any(l.startswith("FAIL") for l in out.splitlines())

    def test_gate_config_with_sweep(self, capsys, tmp_path):
        cfg = {
            "experiment": "gate",
            "t_ns": 10.0,
            "mode": "full",
            "eps_grid": [250.0, 2500.0, 25000.0],
            "assertions": {
                "max_worst_infidelity": 0.015,
                "slope_range": [-2.5, -1.5],
            },
            "outputs": {"report": "gate.json"},
        }
        path = tmp_path / "gate.json.cfg"
        path.write_text(json.dumps(cfg))
        code, out, _ = run_cli(capsys, "run", "--config", str(path), "--out-dir", str(tmp_path))
        assert code == 0
        report = json.loads((tmp_path / "gate.json").read_text())
        assert len(report["sweep"]["points"]) == 3
        assert -2.5 < report["sweep"]["slope"] < -1.5

    @pytest.mark.parametrize(
        "patch, fragment",
        [
            ({"mystery": 1}, "config.mystery"),
            ({"mode": "fastest"}, "config.mode"),
            ({"assertions": {"min_latency": 1}}, "config.assertions.min_latency"),
            ({"outputs": {"plot": "x.png"}}, "config.outputs.plot"),
            ({"bits": [0, 2]}, "config.bits"),
        ],
    )
    def test_config_validation_errors(self, capsys, tmp_path, patch, fragment):
        cfg = {
            "experiment": "classical_wire",
            "n_qubits": 6,
            "bits": [1, 0],
            "outputs": {"report": "r.json"},
        }
        cfg.update(patch)
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(cfg))
        code, _, err = run_cli(capsys, "run", "--config", str(path), "--out-dir", str(tmp_path))
        assert code == 1
        assert fragment in err

    def test_random_states_require_seed(self, capsys, tmp_path):
        cfg = {
            "experiment": "quantum_wire",
            "n_qubits": 5,
            "n_states": 1,
            "states": "random",
            "mode": "reduced",
        }
        path = tmp_path / "noseed.json"
        path.write_text(json.dumps(cfg))
        code, _, err = run_cli(capsys, "run", "--config", str(path), "--out-dir", str(tmp_path))
        assert code == 1
        assert "config.seed" in err

    def test_explicit_states_must_be_normalised(self, capsys, tmp_path):
        cfg = {
            "experiment": "quantum_wire",
            "n_qubits": 5,
            "n_states": 1,
            "states": [[1.0, 0.0, 1.0, 0.0]],
            "mode": "reduced",
        }
        path = tmp_path / "badnorm.json"
        path.write_text(json.dumps(cfg))
        code, _, err = run_cli(capsys, "run", "--config", str(path), "--out-dir", str(tmp_path))
        assert code == 1
        assert "norm" in err

    def test_unknown_config_name(self, capsys, tmp_path):
        code, _, err = run_cli(
            capsys, "run", "--config", "fig9_missing", "--out-dir", str(tmp_path)
        )
        assert code == 1


class TestModuleEntryPoint:
    def test_subprocess_smoke(self):
        proc = subprocess.run(
            [sys.executable, "-m", "swapchannel", "solve", "--t-ns", "10"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert_allclose(json.loads(proc.stdout)["delta_mhz"], 25.0)

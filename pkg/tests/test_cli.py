import json
import math
import subprocess
import sys

import pytest

from thermoshift import full_shift
from thermoshift.cli import (EXPERIMENTS, list_experiments, parse_config,
                             potential_from_json, potential_to_json, run)


def run_cli(*args):
    return subprocess.run([sys.executable, "-m", "thermoshift.cli", *args],
                          capture_output=True, text=True)


def write_config(tmp_path, name, cfg):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return path


BASE_SYSTEM = {"transitions": [[1, 1], [1, 1]]}


class TestCatalog:
    def test_contains_exactly_nine_kinds(self):
        assert len(EXPERIMENTS) == 9
        assert set(EXPERIMENTS) == {
            "enumerate", "pressure", "equilibrium", "variance", "clt",
            "livshits-positive-proportion", "livshits-nonpositive",
            "suspension-asymptotics", "lfunction"}

    def test_entries_name_required_keys(self):
        for kind, spec in EXPERIMENTS.items():
            assert "required" in spec and spec["required"], kind

    def test_byte_identical_across_runs(self):
        a = run_cli("list-experiments")
        b = run_cli("list-experiments")
        assert a.returncode == b.returncode == 0
        assert a.stdout == b.stdout == list_experiments() + "\n"


class TestPotentialJson:
    def test_round_trip(self):
        sft = full_shift(2)
        spec = {"depth": 2, "values": {"00": 0.5, "01": -1.0, "10": 2.0, "11": 0.0}}
        pot = potential_from_json(sft, spec)
        assert potential_to_json(pot) == spec

    def test_builders(self):
        sft = full_shift(2)
        coin = potential_from_json(sft, {"builder": "coin_flip", "p": 0.3})
        assert coin.values[(0,)] == pytest.approx(math.log(0.3))
        par = potential_from_json(sft, {"builder": "parity"})
        assert par.values[(1,)] == -1.0
        const = potential_from_json(sft, {"builder": "constant", "value": 2.0})
        assert const.values[(0,)] == 2.0


class TestRun:
    def test_enumerate_rows(self, tmp_path):
        cfg = write_config(tmp_path, "enum.json", {
            "experiment": "enumerate", "system": BASE_SYSTEM, "params": {"n": 4}})
        out = tmp_path / "out"
        result = run_cli("run", str(cfg), "--out", str(out))
        assert result.returncode == 0, result.stderr
        rows = (out / "enumerate.csv").read_text().splitlines()
        assert rows[0] == "index,word,period"
        assert [r.split(",")[1] for r in rows[1:]] == ["0001", "0011", "0111"]

    def test_metadata_sidecar(self, tmp_path):
        cfg = write_config(tmp_path, "enum.json", {
            "experiment": "enumerate", "system": BASE_SYSTEM,
            "params": {"n": 3}, "seed": 7})
        out = tmp_path / "out"
        assert run_cli("run", str(cfg), "--out", str(out)).returncode == 0
        meta = json.loads((out / "metadata.json").read_text())
        assert meta["seed"] == 7
        assert "orbit_multiplicity" in meta["conventions"]
        assert meta["config"]["experiment"] == "enumerate"

    def test_invalid_matrix_exits_2(self, tmp_path):
        cfg = write_config(tmp_path, "bad.json", {
            "experiment": "enumerate",
            "system": {"transitions": [[1, 0], [0, 1]]}, "params": {"n": 3}})
        result = run_cli("run", str(cfg), "--out", str(tmp_path / "o"))
        assert result.returncode == 2
        assert "reducible" in result.stderr

    def test_unknown_experiment_exits_2(self, tmp_path):
        cfg = write_config(tmp_path, "bad.json", {
            "experiment": "nope", "system": BASE_SYSTEM, "params": {}})
        assert run_cli("run", str(cfg), "--out", str(tmp_path / "o")).returncode == 2

    def test_budget_exceeded_exits_3(self, tmp_path):
        cfg = write_config(tmp_path, "budget.json", {
            "experiment": "enumerate", "system": BASE_SYSTEM,
            "params": {"n": 18, "budget": 10}})
        result = run_cli("run", str(cfg), "--out", str(tmp_path / "o"))
        assert result.returncode == 3
        assert "budget" in result.stderr.lower()

    def test_numerical_failure_exits_4(self, tmp_path):
        # pole bracket in the divergent region triggers a numerics error
        cfg = write_config(tmp_path, "num.json", {
            "experiment": "lfunction", "system": BASE_SYSTEM,
            "potentials": {"zero": {"builder": "constant", "value": 0.0}},
            "psi": "zero",
            "params": {"s_grid": [1.0], "bracket": [0.1, 0.3]}})
        result = run_cli("run", str(cfg), "--out", str(tmp_path / "o"))
        assert result.returncode == 4

    def test_version_flag(self):
        result = run_cli("--version")
        assert result.returncode == 0
        assert result.stdout.startswith("thermoshift")


class TestDeterminism:
    def test_threads_do_not_change_clt_csv(self, tmp_path):
        cfg = write_config(tmp_path, "clt.json", {
            "experiment": "clt", "system": BASE_SYSTEM,
            "potentials": {"psi": {"builder": "coin_flip", "p": 0.3},
                           "phi": {"builder": "parity"}},
            "psi": "psi", "phi": "phi", "params": {"n_range": [6, 12]}})
        bodies = []
        for threads, name in ((1, "a"), (8, "b")):
            out = tmp_path / name
            result = run_cli("run", str(cfg), "--out", str(out),
                             "--threads", str(threads))
            assert result.returncode == 0, result.stderr
            bodies.append((out / "clt.csv").read_bytes())
        assert bodies[0] == bodies[1]

    def test_enumerate_partition_deterministic(self, tmp_path):
        cfg = write_config(tmp_path, "enum.json", {
            "experiment": "enumerate", "system": BASE_SYSTEM, "params": {"n": 9}})
        bodies = []
        for threads, name in ((1, "a"), (4, "b")):
            out = tmp_path / name
            assert run_cli("run", str(cfg), "--out", str(out),
                           "--threads", str(threads)).returncode == 0
            bodies.append((out / "enumerate.csv").read_bytes())
        assert bodies[0] == bodies[1]


class TestInProcess:
    def test_pressure_experiment(self, tmp_path):
        raw = {"experiment": "pressure", "system": BASE_SYSTEM,
               "potentials": {"psi": {"builder": "coin_flip", "p": 0.3}},
               "psi": "psi", "params": {"n_range": [8, 16]}}
        config = parse_config(raw, str(tmp_path / "out"))
        run(config)
        rows = (tmp_path / "out" / "pressure.csv").read_text().splitlines()
        header = rows[0].split(",")
        values = {r.split(",")[0]: float(r.split(",")[1]) for r in rows[1:]}
        assert header[0] == "method"
        assert values["spectral"] == pytest.approx(0.0, abs=1e-10)
        assert values["orbit_sum"] == pytest.approx(0.0, abs=1e-3)

    def test_livshits_report_files(self, tmp_path):
        raw = {"experiment": "livshits-nonpositive", "system": BASE_SYSTEM,
               "potentials": {"phi": {"builder": "parity"}},
               "phi": "phi", "params": {"n_range": [4, 14]}}
        config = parse_config(raw, str(tmp_path / "out"))
        run(config)
        report = (tmp_path / "out" / "report.txt").read_text()
        assert "verdict: rejected" in report
        assert "witness_orbit: 0" in report
        assert "convention_qprime_counting" in report
        qprime = (tmp_path / "out" / "qprime.csv").read_text().splitlines()
        assert qprime[0] == "n,qprime_count"

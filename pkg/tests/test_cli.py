"""Command-line interface: config handling, output contracts, exit codes."""

import csv
import hashlib
import json
import os

import numpy as np
import pytest
from click.testing import CliRunner

from mhdlab.cli import (EXIT_ACCEPTANCE, EXIT_BLOWUP, EXIT_OK, EXIT_VALIDATION,
                        ConfigError, build_run_config, load_config_file, main,
                        worker_count)
from mhdlab.diagnostics import CSV_COLUMNS


@pytest.fixture
def runner():
    return CliRunner()


def write_config(tmp_path, payload, name="config.json"):
    path = tmp_path / name
    path.write_text(payload if isinstance(payload, str) else json.dumps(payload))
    return str(path)


BASE_CONFIG = {
    "n": 2, "N": 16, "regime": "non_resistive", "symmetry": "Sym1",
    "s": 5.0, "delta": 0.1, "epsilon": 1e-3, "dt": 0.05, "T": 1.0,
    "band_limit": 4, "seed": 0, "output_every": 2,
}


class TestConfigParsing:
    def test_valid_file(self, tmp_path):
        path = write_config(tmp_path, BASE_CONFIG)
        config = build_run_config(load_config_file(path), {})
        assert config.N == 16 and config.s == 5.0

    def test_duplicate_key_reports_lines(self, tmp_path):
        payload = '{\n  "N": 16,\n  "s": 5.0,\n  "N": 32\n}'
        path = write_config(tmp_path, payload)
        with pytest.raises(ConfigError, match=r"duplicate key 'N' \(lines \[2, 4\]\)"):
            load_config_file(path)

    def test_invalid_json(self, tmp_path):
        path = write_config(tmp_path, "{not json")
        with pytest.raises(ConfigError, match="invalid JSON"):
            load_config_file(path)

    def test_non_object_top_level(self, tmp_path):
        path = write_config(tmp_path, "[1, 2]")
        with pytest.raises(ConfigError, match="top level must be an object"):
            load_config_file(path)

    def test_unknown_keys_rejected(self):
        with pytest.raises(ConfigError, match=r"unknown config keys \['resolutoin'\]"):
            build_run_config({"resolutoin": 16}, {})

    def test_overrides_beat_file(self):
        config = build_run_config(dict(BASE_CONFIG), {"epsilon": 0.5, "dt": None})
        assert config.epsilon == 0.5
        assert config.dt == 0.05  # None override leaves the file value

    def test_all_violations_listed(self):
        bad = dict(BASE_CONFIG, s=2.0, delta=-1.0, T=-5.0)
        with pytest.raises(ConfigError) as err:
            build_run_config(bad, {})
        msg = str(err.value)
        assert "s > n/2 + 3" in msg and "T must be nonnegative" in msg


class TestSimulate:
    def run_simulate(self, runner, tmp_path, config=BASE_CONFIG, **extra):
        cfg = write_config(tmp_path, dict(config, **extra))
        outdir = str(tmp_path / "out")
        result = runner.invoke(main, ["simulate", "--config", cfg,
                                      "--outdir", outdir])
        return result, outdir

    def test_outputs_and_contracts(self, runner, tmp_path):
        result, outdir = self.run_simulate(runner, tmp_path)
        assert result.exit_code == EXIT_OK, result.output
        with open(os.path.join(outdir, "timeseries.csv")) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == CSV_COLUMNS
        # t=0, steps 2..20 every 2 -> 11 records
        assert len(rows) - 1 == 11
        values = np.array([[float(x) for x in row] for row in rows[1:]])
        assert np.all(np.isfinite(values)) and np.all(values >= 0.0)
        assert np.all(np.diff(values[:, 0]) > 0)

        with open(os.path.join(outdir, "summary.json")) as fh:
            summary = json.load(fh)
        assert summary["config"]["N"] == 16
        assert summary["invariant_checks"]["mean_zero"] is True
        assert "functionals" in summary and "rate_fits" in summary

        with open(os.path.join(outdir, "manifest.json")) as fh:
            manifest = json.load(fh)
        assert manifest["seed"] == 0
        for name, digest in manifest["hashes"].items():
            h = hashlib.sha256()
            with open(os.path.join(outdir, name), "rb") as fh:
                h.update(fh.read())
            assert h.hexdigest() == digest

    def test_float_round_trip_precision(self, runner, tmp_path):
        # %.17g serialization must round-trip doubles exactly
        result, outdir = self.run_simulate(runner, tmp_path)
        assert result.exit_code == EXIT_OK
        from mhdlab import RunConfig, run
        records, _ = run(RunConfig(**BASE_CONFIG))
        with open(os.path.join(outdir, "timeseries.csv")) as fh:
            rows = list(csv.reader(fh))[1:]
        for row, rec in zip(rows, records):
            assert [float(x) for x in row] == rec.csv_values()

    def test_zero_epsilon_run(self, runner, tmp_path):
        result, outdir = self.run_simulate(runner, tmp_path, epsilon=0.0)
        assert result.exit_code == EXIT_OK
        with open(os.path.join(outdir, "timeseries.csv")) as fh:
            rows = list(csv.reader(fh))[1:]
        for row in rows:
            assert all(float(x) == 0.0 for x in row[1:])

    def test_invalid_config_exit_code(self, runner, tmp_path):
        result, _ = self.run_simulate(runner, tmp_path, s=2.0)
        assert result.exit_code == EXIT_VALIDATION
        assert "s > n/2 + 3" in result.output

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_blow_up_exit_code(self, runner, tmp_path):
        # negative viscosity in the general regime amplifies every mode
        unstable = dict(BASE_CONFIG, regime="general", symmetry="Unconstrained",
                        mu=-40.0, nu=0.0, epsilon=0.1, dt=0.1, T=20.0)
        result, _ = self.run_simulate(runner, tmp_path, **unstable)
        assert result.exit_code == EXIT_BLOWUP
        assert "blow-up" in result.output

    def test_flag_overrides(self, runner, tmp_path):
        cfg = write_config(tmp_path, BASE_CONFIG)
        outdir = str(tmp_path / "out")
        result = runner.invoke(main, ["simulate", "--config", cfg,
                                      "--final-time", "0.5",
                                      "--outdir", outdir])
        assert result.exit_code == EXIT_OK
        with open(os.path.join(outdir, "summary.json")) as fh:
            assert json.load(fh)["config"]["T"] == 0.5


class TestOtherCommands:
    def test_linear_oracle(self, runner, tmp_path):
        outdir = str(tmp_path / "lin")
        result = runner.invoke(main, [
            "linear-oracle", "--outdir", outdir, "--modes", "3",
            "--dt", "0.01", "--final-time", "0.3"])
        assert result.exit_code == EXIT_OK, result.output
        with open(os.path.join(outdir, "summary.json")) as fh:
            summary = json.load(fh)
        assert summary["ok"] is True
        assert summary["max_relative_error"] <= 1e-12

    def test_commutator_campaign(self, runner, tmp_path):
        outdir = str(tmp_path / "comm")
        result = runner.invoke(main, [
            "commutator", "--outdir", outdir, "--case", "2",
            "--trials", "3", "--resolutions", "16", "--n", "2"])
        assert result.exit_code == EXIT_OK, result.output
        with open(os.path.join(outdir, "samples.csv")) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["n", "resolution", "case", "s", "l", "eta",
                           "op_kind", "lhs", "rhs", "ratio", "seed"]
        assert len(rows) > 1
        with open(os.path.join(outdir, "summary.json")) as fh:
            assert json.load(fh)["resolution_growth_ok"] is True

    def test_symmetry_check(self, runner, tmp_path):
        cfg = write_config(tmp_path, BASE_CONFIG)
        outdir = str(tmp_path / "sym")
        result = runner.invoke(main, [
            "symmetry-check", "--config", cfg, "--outdir", outdir])
        assert result.exit_code == EXIT_OK, result.output
        with open(os.path.join(outdir, "summary.json")) as fh:
            summary = json.load(fh)
        assert summary["ok"] is True

    def test_decay_study(self, runner, tmp_path):
        cfg = write_config(tmp_path, dict(BASE_CONFIG, T=0.5))
        outdir = str(tmp_path / "study")
        result = runner.invoke(main, [
            "decay-study", "--config", cfg, "--outdir", outdir,
            "--epsilons", "1e-3,2e-3", "--seeds", "0"])
        assert result.exit_code == EXIT_OK, result.output
        with open(os.path.join(outdir, "summary.json")) as fh:
            summary = json.load(fh)
        assert summary["stability_constant"]["spread_ok"] is True
        assert len(summary["runs"]) == 2
        for run_info in summary["runs"]:
            assert os.path.exists(os.path.join(run_info["outdir"],
                                               "timeseries.csv"))


class TestWorkerCount:
    def test_default_and_env(self, monkeypatch):
        monkeypatch.delenv("MHDLAB_WORKERS", raising=False)
        assert worker_count() == 1
        monkeypatch.setenv("MHDLAB_WORKERS", "4")
        assert worker_count() == 4
        monkeypatch.setenv("MHDLAB_WORKERS", "zero")
        assert worker_count() == 1
        monkeypatch.setenv("MHDLAB_WORKERS", "-3")
        assert worker_count() == 1

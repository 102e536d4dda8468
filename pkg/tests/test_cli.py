import csv
import io
import json

import pytest

from mccalib.cli import main
from mccalib.dataset import load_csv


@pytest.fixture
def wave_csv(tmp_path):
    out = tmp_path / "wave.csv"
    assert main(["gen-waveform", "--n", "120", "--seed", "7", "--out", str(out)]) == 0
    return out


class TestGenWaveform:
    def test_output_loads_back(self, wave_csv):
        ds = load_csv(wave_csv, "label")
        assert ds.n_samples == 120
        assert ds.n_features == 21
        assert ds.n_classes == 3

    def test_deterministic(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        main(["gen-waveform", "--n", "50", "--seed", "3", "--out", str(a)])
        main(["gen-waveform", "--n", "50", "--seed", "3", "--out", str(b)])
        assert a.read_text() == b.read_text()


class TestRunSingleDataset:
    def test_markdown_run(self, wave_csv, tmp_path, capsys):
        out = tmp_path / "result.md"
        code = main(
            [
                "run",
                "--data", str(wave_csv),
                "--label", "label",
                "--classifier", "nb",
                "--scenario", "multiclass-raw",
                "--scenario", "ovr-raw",
                "--folds", "3",
                "--seed", "5",
                "--out", str(out),
                "--format", "markdown",
            ]
        )
        assert code == 0
        text = out.read_text()
        assert "Multi-class Raw MSE" in text
        assert (tmp_path / "result_timing.md").exists()

    def test_csv_run_round_trips(self, wave_csv, tmp_path):
        out = tmp_path / "result.csv"
        code = main(
            [
                "run",
                "--data", str(wave_csv),
                "--label", "label",
                "--scenario", "multiclass-raw",
                "--folds", "3",
                "--out", str(out),
                "--format", "csv",
            ]
        )
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out.read_text())))
        assert float(rows[0]["multiclass-raw:mse"]) > 0

    def test_missing_input_fails(self, tmp_path, capsys):
        code = main(
            ["run", "--data", str(tmp_path / "nope.csv"), "--label", "y", "--folds", "2"]
        )
        assert code == 1

    def test_needs_data_or_config(self):
        with pytest.raises(SystemExit):
            main(["run", "--folds", "3"])


class TestRunConfig:
    def test_config_json_run(self, tmp_path, capsys):
        doc = {
            "datasets": [{"id": "wave", "synthetic": "waveform", "n": 150, "seed": 2}],
            "classifiers": [{"name": "nb"}],
            "scenarios": ["multiclass-raw", "ovr-calibrated"],
            "n_folds": 3,
            "seed": 9,
            "dgg": {"pool_target": 120, "holdout_fraction": 0.2, "group_size": 10},
        }
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps(doc))
        out = tmp_path / "res.json"
        code = main(["run", "--config", str(cfg), "--out", str(out), "--format", "json"])
        assert code == 0
        bundle = json.loads(out.read_text())
        assert {r["scenario"] for r in bundle["results"]} == {
            "multiclass-raw",
            "ovr-calibrated",
        }
        assert bundle["results"][0]["calibration_seconds_per_task"] is None


def test_selftest_passes(capsys):
    assert main(["selftest"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 7
    assert all(line.startswith("[PASS]") for line in lines)

import csv
import json
import re

import pytest

from main import main
from schemas.response_schema import METRICS_COLUMNS
from services.experiment_services import parse_config
from utils.metrics_io import read_metrics_csv


def base_config(**training):
    settings = {
        "rounds": 2,
        "active_fraction": 0.5,
        "local_updates": 4,
        "batch_size": 5,
        "high_level": "b",
        "low_level": "g",
        "budget": {"mode": "fix", "beta": 0.5},
    }
    settings.update(training)
    return {
        "seed": 7,
        "dataset": {"kind": "synthetic", "num_classes": 3, "dims": 4, "per_class": 25, "spread": 0.5},
        "partition": {"mode": "balanced_k", "K": 1, "num_clients": 6},
        "training": settings,
        "model": {"objective": {"kind": "softmax"}, "optimizer": {"learning_rate": 0.1}},
    }


@pytest.fixture
def write_config(tmp_path):
    def write(document, name="config.json"):
        path = tmp_path / name
        path.write_text(json.dumps(document))
        return str(path)

    return write


def read_rows(path):
    with open(path, newline="") as handle:
        return list(csv.DictReader(handle))


class TestRunCommand:
    def test_writes_one_row_per_round(self, tmp_path, write_config, capsys):
        out = tmp_path / "run"
        assert main(["run", "--config", write_config(base_config()), "--out", str(out)]) == 0
        assert "2 rounds" in capsys.readouterr().out

        records = read_metrics_csv(out / "metrics.csv")
        assert [record.t for record in records] == [1, 2]
        with open(out / "metrics.csv") as handle:
            assert handle.readline().strip() == ",".join(METRICS_COLUMNS)
        assert len(json.loads((out / "metrics.json").read_text())) == 2

        resolved = json.loads((out / "resolved_config.json").read_text())
        assert resolved["training"]["seed"] == 7
        assert resolved["partition"]["seed"] == 7
        assert resolved["model"]["objective"]["num_classes"] == 3

    def test_reruns_are_byte_identical(self, tmp_path, write_config):
        config = write_config(base_config())
        first, second = tmp_path / "first", tmp_path / "second"
        assert main(["run", "--config", config, "--out", str(first)]) == 0
        assert main(["run", "--config", config, "--out", str(second), "--threads", "3"]) == 0
        for name in ("metrics.csv", "metrics.json"):
            assert (first / name).read_bytes() == (second / name).read_bytes()

    def test_rerun_from_resolved_config(self, tmp_path, write_config):
        first, second = tmp_path / "first", tmp_path / "second"
        assert main(["run", "--config", write_config(base_config()), "--out", str(first)]) == 0
        resolved = str(first / "resolved_config.json")
        assert main(["run", "--config", resolved, "--out", str(second)]) == 0
        assert (first / "metrics.csv").read_bytes() == (second / "metrics.csv").read_bytes()

    def test_seed_override_changes_run(self, tmp_path, write_config):
        config = write_config(base_config())
        first, second = tmp_path / "first", tmp_path / "second"
        assert main(["run", "--config", config, "--out", str(first)]) == 0
        assert main(["run", "--config", config, "--out", str(second), "--seed", "8"]) == 0
        resolved = json.loads((second / "resolved_config.json").read_text())
        assert resolved["seed"] == 8 and resolved["training"]["seed"] == 8

    def test_fedavg_normalized_cost(self, tmp_path, write_config):
        out = tmp_path / "fedavg"
        assert main(["run", "--config", write_config(base_config(algorithm="fedavg")), "--out", str(out)]) == 0
        for record in read_metrics_csv(out / "metrics.csv"):
            assert record.normalized_cost == pytest.approx(0.25)

    def test_unknown_key_is_reported_by_name(self, tmp_path, write_config, capsys):
        config = base_config(freqency="a")
        assert main(["run", "--config", write_config(config), "--out", str(tmp_path / "bad")]) == 2
        assert "training.freqency" in capsys.readouterr().err

    def test_missing_config(self, tmp_path):
        assert main(["run", "--config", str(tmp_path / "missing.json")]) == 2

    def test_invalid_beta(self, tmp_path, write_config, capsys):
        config = base_config(budget={"mode": "fix", "beta": 0.0})
        assert main(["run", "--config", write_config(config), "--out", str(tmp_path / "bad")]) == 2
        assert "training.budget.beta" in capsys.readouterr().err


class TestParseConfig:
    def test_minimal_config_gets_defaults(self, write_config):
        config = parse_config(write_config({}))
        assert config.training.ens_times == 4
        assert config.model.optimizer.momentum == 0.9
        assert config.model.optimizer.schedule == "cosine"
        assert config.training.seed == config.partition.seed == 0

    def test_serialized_config_parses_back_identically(self, write_config):
        config = parse_config(write_config(base_config()))
        again = parse_config(write_config(config.model_dump(mode="json"), name="again.json"))
        assert again == config
        assert again.model_dump(mode="json") == config.model_dump(mode="json")


class TestTheoryCommand:
    def test_small_grid_passes(self, tmp_path, capsys):
        code = main(
            ["theory", "--eta", "0.5", "--k", "1,3", "--r", "2", "--scenarios", "2", "--out", str(tmp_path)]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "PASS" in out
        max_delta = float(re.search(r"max_delta=([0-9.eE+-]+)", out).group(1))
        assert max_delta <= 1e-10
        report = json.loads((tmp_path / "theory_report.json").read_text())
        assert report["passed"] and report["scenarios"] == 4

    def test_learning_rate_above_one_rejected(self, capsys):
        assert main(["theory", "--eta", "1.5", "--k", "1", "--r", "1", "--scenarios", "1"]) == 2
        assert "eta" in capsys.readouterr().err


class TestCostTableCommand:
    def test_reference_configurations(self, tmp_path):
        assert main(["cost-table", "--out", str(tmp_path)]) == 0
        rows = {row["configuration"]: float(row["normalized_cost"]) for row in read_rows(tmp_path / "cost_table.csv")}
        assert rows["a"] == 1.0
        assert rows["FedAvg"] == pytest.approx(0.004)
        assert rows["b"] == pytest.approx(0.252, abs=0.005)

    def test_invalid_arguments_rejected(self, tmp_path):
        assert main(["cost-table", "--L", "0", "--out", str(tmp_path)]) == 2


class TestSelectorBenchCommand:
    def test_writes_tables(self, tmp_path):
        assert main(["selector-bench", "--sizes", "6", "--trials", "2", "--out", str(tmp_path)]) == 0
        rows = read_rows(tmp_path / "selector_bench.csv")
        assert len(rows) == 2
        for row in rows:
            assert float(row["brute_kl"]) <= float(row["dynacomm_kl"])
        summary = json.loads((tmp_path / "selector_bench_summary.json").read_text())
        assert summary["brute_le_dynacomm_rate"] == 1.0
        assert (tmp_path / "kl_curve.csv").exists()

    def test_zero_trials_rejected(self, tmp_path):
        assert main(["selector-bench", "--trials", "0", "--out", str(tmp_path)]) == 2


class TestPartitionStatsCommand:
    def test_one_row_per_client(self, tmp_path, write_config):
        assert main(["partition-stats", "--config", write_config(base_config()), "--out", str(tmp_path)]) == 0
        rows = read_rows(tmp_path / "partition_stats.csv")
        assert [int(row["client_id"]) for row in rows] == list(range(6))
        assert all(int(row["count"]) == 10 for row in rows)

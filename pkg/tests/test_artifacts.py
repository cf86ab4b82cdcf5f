"""Config parsing, checkpoint round trips, atomic writes, SVG rendering."""

import json

import numpy as np
import pytest

from mdlb.artifacts import (
    ConfigError,
    atomic_write_text,
    history_to_csv,
    load_checkpoint,
    load_config_file,
    parse_data_config,
    parse_train_config,
    save_checkpoint,
)
from mdlb.charts import Series, line_chart, two_panel_chart
from mdlb.training import GeneratorSpec, PriorBank, TrainConfig, init_params


class TestConfigParsing:
    def test_toml_kebab_case(self, tmp_path):
        cfg = tmp_path / "run.toml"
        cfg.write_text(
            "[train]\nobjective = 'vib'\nbeta = 0.001\nbatch-size = 32\n"
            "[data]\nkind = 'blobs'\ntrain-size = 100\n"
        )
        raw = load_config_file(cfg)
        configs = parse_train_config(raw)
        assert len(configs) == 1 and configs[0].batch_size == 32
        data = parse_data_config(raw)
        assert data["train_size"] == 100
        assert isinstance(data["spec"], GeneratorSpec)

    def test_json_accepted(self, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"train": {"objective": "vib"}, "data": {}}))
        assert parse_train_config(load_config_file(cfg))[0].objective == "vib"

    def test_unknown_key_rejected(self, tmp_path):
        cfg = tmp_path / "run.toml"
        cfg.write_text("[train]\nlearning-rage = 0.1\n")
        with pytest.raises(ConfigError, match="learning-rage"):
            parse_train_config(load_config_file(cfg))

    def test_negative_beta_rejected(self, tmp_path):
        cfg = tmp_path / "run.toml"
        cfg.write_text("[train]\nbeta = -0.5\n")
        with pytest.raises(ConfigError):
            parse_train_config(load_config_file(cfg))

    def test_sweep_expansion(self, tmp_path):
        cfg = tmp_path / "run.toml"
        cfg.write_text(
            "[train]\nobjective = ['vib', 'cdvib_lossy']\nbeta = [0.001, 0.01]\nseed = [1, 2]\n"
        )
        configs = parse_train_config(load_config_file(cfg))
        assert len(configs) == 8
        assert [c.objective for c in configs[:4]] == ["vib"] * 4

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config_file(tmp_path / "absent.toml")


class TestCheckpointRoundTrip:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(0)
        params = init_params(3, 4, 2, 5, rng)
        bank = PriorBank.initial(5, 2, 2, 0.01, "lossy")
        bank.means += rng.standard_normal(bank.means.shape)
        config = TrainConfig(objective="cdvib_lossy", alpha=0.01, seed=3)
        path = tmp_path / "ckpt.json"
        save_checkpoint(path, params, bank, config)
        params2, bank2, config2 = load_checkpoint(path)
        for name, arr in params.arrays().items():
            np.testing.assert_array_equal(arr, params2.arrays()[name])
        np.testing.assert_array_equal(bank.means, bank2.means)
        assert config2 == config

    def test_bad_format_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{}")
        with pytest.raises(ConfigError):
            load_checkpoint(path)


class TestAtomicWrite:
    def test_writes_and_replaces(self, tmp_path):
        target = tmp_path / "sub" / "file.txt"
        atomic_write_text(target, "one")
        atomic_write_text(target, "two")
        assert target.read_text() == "two"
        assert list(target.parent.glob("*.tmp")) == []


class TestHistoryCsv:
    def test_schema_line(self):
        rows = [
            {
                "epoch": 0,
                "split": "train",
                "accuracy": 0.5,
                "loss": 1.25,
                "mean_kl": 0.1,
                "log_likelihood": -0.7,
            }
        ]
        text = history_to_csv(rows)
        header, line = text.strip().split("\n")
        assert header == "epoch,split,accuracy,loss,mean_kl,log_likelihood"
        assert line.startswith("0,train,0.5,1.25,")


class TestCharts:
    def test_line_chart_structure(self):
        svg = line_chart(
            [Series("a", [0, 1, 2], [0.1, 0.5, 0.4])], "title", "x", "y"
        )
        assert svg.startswith("<svg ")
        assert 'viewBox="0 0 800 400"' in svg
        assert svg.count("<polyline") == 1
        assert "title" in svg

    def test_two_panel_with_bands(self):
        s = Series("m", [0, 1], [0.2, 0.6], band_low=[0.1, 0.5], band_high=[0.3, 0.7])
        svg = two_panel_chart([s], [s], ("A", "B"), "epoch", ("acc", "ll"))
        assert svg.count("<polygon") == 2
        assert svg.count("<polyline") == 2

    def test_deterministic_output(self):
        s = [Series("a", [0, 1, 2], [0.1, 0.5, 0.4])]
        assert line_chart(s, "t", "x", "y") == line_chart(s, "t", "x", "y")

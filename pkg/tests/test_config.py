"""Tests for the TOML configuration layer and logging setup."""

import logging

import pytest

from cpow_innovation.config import check_keys, dump_toml, load_toml
from cpow_innovation.config.settings import ExperimentConfig
from cpow_innovation.errors import ConfigError
from cpow_innovation.logging_config import configure_logging


class TestExperimentConfig:
    def test_defaults(self):
        config = ExperimentConfig()
        assert config.experiment.scenario == "F2"
        assert config.experiment.methods == ("conventional", "aocr", "isfd")
        assert config.experiment.target_fpr == 0.05
        assert config.isfd.K == 4 and config.isfd.C == 42.5
        assert config.conventional.pickup_grid[0] == 1.0
        assert config.conventional.pickup_grid[-1] == 2.0
        assert len(config.conventional.pickup_grid) == 101
        assert len(config.aocr.alpha_grid) == 201
        assert config.compression.relay == "R3"

    def test_partial_tables_keep_defaults(self):
        data = {"isfd": {"epsilon": 0.01}, "experiment": {"n_runs": 5}}
        config = ExperimentConfig.from_dict(data)
        assert config.isfd.epsilon == 0.01
        assert config.isfd.K == 4
        assert config.experiment.n_runs == 5

    def test_unknown_key_names_the_table(self):
        with pytest.raises(ConfigError, match=r"\[isfd\]"):
            ExperimentConfig.from_dict({"isfd": {"epsilonn": 0.01}})
        with pytest.raises(ConfigError, match=r"\[config\]"):
            ExperimentConfig.from_dict({"detector": {}})

    def test_invalid_values(self):
        with pytest.raises(ConfigError, match="Unknown method"):
            ExperimentConfig.from_dict({"experiment": {"methods": ["isfd", "distance"]}})
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict({"experiment": {"target_fpr": 1.5}})
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict({"conventional": {"curve": "steep"}})
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict({"compression": {"distortion_fraction": 0.0}})

    def test_toml_round_trip(self, tmp_path):
        config = ExperimentConfig.from_dict(
            {
                "experiment": {"scenario": "F3", "n_runs": 20, "methods": ["isfd", "aocr"]},
                "aocr": {"i_fault_min": {"R2": 300.0}},
                "compression": {"suppress_when_normal": [2, 3]},
            }
        )
        path = config.to_toml(tmp_path / "nested" / "experiment.toml")
        assert path.exists()
        assert ExperimentConfig.from_toml(path) == config

    def test_overrides(self):
        config = ExperimentConfig().with_overrides(seed=9, runs=12, out="elsewhere")
        assert config.experiment.master_seed == 9
        assert config.experiment.n_runs == 12
        assert config.experiment.output_dir == "elsewhere"
        assert config.isfd == ExperimentConfig().isfd
        unchanged = ExperimentConfig()
        assert unchanged.with_overrides() is unchanged


class TestTomlIo:
    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_toml(tmp_path / "absent.toml")

    def test_invalid_toml(self, tmp_path):
        path = tmp_path / "bad.toml"
        path.write_text("[experiment\nn_runs = 3\n", encoding="utf-8")
        with pytest.raises(ConfigError, match="Invalid TOML"):
            load_toml(path)

    def test_none_values_are_dropped(self, tmp_path):
        path = dump_toml({"table": {"a": 1, "b": None}}, tmp_path / "x.toml")
        assert load_toml(path) == {"table": {"a": 1}}

    def test_check_keys_lists_valid_keys(self):
        check_keys({"a": 1}, ["a", "b"], "t")
        with pytest.raises(ConfigError, match="Valid keys are: a, b"):
            check_keys({"c": 1}, ["b", "a"], "t")


class TestLogging:
    def test_single_handler(self):
        logger = configure_logging("debug")
        configure_logging(logging.WARNING)
        assert logger.name == "cpow_innovation"
        assert len(logger.handlers) == 1
        assert logger.level == logging.WARNING
        assert not logger.propagate

    def test_unknown_level(self):
        with pytest.raises(ValueError, match="Unknown log level"):
            configure_logging("chatty")

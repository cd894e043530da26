"""Tests for CSV ingestion and block bootstrap resampling."""

import numpy as np
import pytest

from cpow_innovation.errors import ConfigError, ParseError
from cpow_innovation.ingest import block_bootstrap, read_waveform_csv, write_waveform_csv
from cpow_innovation.waveform.scenario_io import scenario_from_toml
from cpow_innovation.waveform.sdg import SdgKind, sample_sdg_trajectory
from cpow_innovation.waveform.series import WaveformSeries


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


class TestReadWaveformCsv:
    def test_reads_uniform_profile(self, tmp_path):
        path = _write(tmp_path / "p.csv", "t,i\n0.00,1.5\n0.02,2.5\n0.04,3.5\n")
        dataset = read_waveform_csv(path, time_col="t", value_col="i")
        assert len(dataset) == 3
        assert dataset.series.sample_rate == pytest.approx(50.0)
        np.testing.assert_array_equal(dataset.series.samples, [1.5, 2.5, 3.5])
        assert dataset.units == "A"

    def test_written_series_reads_back(self, tmp_path, sine):
        series = sine(duration=0.1)
        dataset = read_waveform_csv(write_waveform_csv(series, tmp_path / "s.csv"))
        np.testing.assert_allclose(dataset.series.samples, series.samples, rtol=0, atol=1e-12)
        assert dataset.series.sample_rate == pytest.approx(series.sample_rate, rel=1e-9)

    def test_missing_column(self, tmp_path):
        path = _write(tmp_path / "p.csv", "time_s,voltage\n0,1\n1,2\n")
        with pytest.raises(ParseError, match="current_a"):
            read_waveform_csv(path)

    def test_non_numeric_cell_reports_row(self, tmp_path):
        path = _write(tmp_path / "p.csv", "time_s,current_a\n0,1\n1,abc\n2,3\n")
        with pytest.raises(ParseError) as info:
            read_waveform_csv(path)
        assert info.value.row == 2
        assert info.value.column == "current_a"

    def test_too_few_rows(self, tmp_path):
        path = _write(tmp_path / "p.csv", "time_s,current_a\n0,1\n")
        with pytest.raises(ParseError, match="at least 2"):
            read_waveform_csv(path)

    def test_non_uniform_spacing(self, tmp_path):
        path = _write(tmp_path / "p.csv", "time_s,current_a\n0,1\n1,1\n2,1\n3.5,1\n4.5,1\n")
        with pytest.raises(ParseError) as info:
            read_waveform_csv(path)
        assert info.value.row == 4

    def test_parse_error_is_a_value_error(self, tmp_path):
        path = _write(tmp_path / "p.csv", "time_s\n0\n1\n")
        with pytest.raises(ValueError):
            read_waveform_csv(path)


class TestBlockBootstrap:
    def test_blocks_are_contiguous_source_runs(self):
        source = WaveformSeries(np.arange(100.0), sample_rate=1.0)
        out = block_bootstrap(source, block_len=10, n=35, seed=1)
        assert out.size == 35
        for start in range(0, 35, 10):
            block = out[start : start + 10]
            np.testing.assert_array_equal(np.diff(block), np.ones(block.size - 1))

    def test_deterministic(self):
        source = WaveformSeries(np.random.default_rng(0).standard_normal(500), sample_rate=1.0)
        np.testing.assert_array_equal(
            block_bootstrap(source, 50, 1000, seed=3), block_bootstrap(source, 50, 1000, seed=3)
        )

    def test_block_longer_than_source(self):
        source = WaveformSeries(np.zeros(10), sample_rate=1.0)
        with pytest.raises(ValueError, match="exceeds"):
            block_bootstrap(source, block_len=11, n=5)


class TestBootstrapSdg:
    def test_scenario_with_source_csv(self, tmp_path):
        profile = WaveformSeries(20.0 + np.arange(200.0) % 7, sample_rate=100.0)
        write_waveform_csv(profile, tmp_path / "sdg.csv")
        _write(
            tmp_path / "scenario.toml",
            "[scenario]\nduration = 1.0\nsample_rate = 6000.0\n\n"
            '[sdg]\nsource_csv = "sdg.csv"\nblock_len = 20\n\n'
            "[relays.A]\nbase_envelope = 50.0\nsdg_coupling = 1.0\n",
        )
        scenario = scenario_from_toml(tmp_path / "scenario.toml")
        assert scenario.sdg.kind is SdgKind.BOOTSTRAP
        trajectory = sample_sdg_trajectory(scenario.sdg, 300, seed=0)
        assert set(np.unique(trajectory)) <= set(profile.samples)

    def test_block_len_exceeding_source_is_a_config_error(self, tmp_path):
        write_waveform_csv(WaveformSeries(np.ones(10), sample_rate=100.0), tmp_path / "sdg.csv")
        _write(
            tmp_path / "scenario.toml",
            "[scenario]\nduration = 1.0\n\n"
            '[sdg]\nsource_csv = "sdg.csv"\nblock_len = 50\n\n'
            "[relays.A]\nbase_envelope = 50.0\n",
        )
        with pytest.raises(ConfigError, match="block_len"):
            scenario_from_toml(tmp_path / "scenario.toml")

"""Tests for the overcurrent relays and their false-positive calibration."""

import numpy as np
import pytest

from cpow_innovation.baselines import (
    CURVES,
    AocrConfig,
    OvercurrentConfig,
    RunFeatures,
    aocr_detect,
    calibrate,
    conventional_detect,
    get_curve,
    inverse_time_delay,
    rectified_block_max,
    trailing_block_mean,
)
from cpow_innovation.errors import CalibrationInfeasibleError, ConfigError
from cpow_innovation.isfd import IsfdConfig
from cpow_innovation.nst import Hypothesis
from cpow_innovation.waveform.series import WaveformSeries


def _modulated(envelope, fs=3000.0, freq=60.0):
    t = np.arange(envelope.size) / fs
    return WaveformSeries(envelope * np.sin(2 * np.pi * freq * t), fs)


@pytest.fixture
def noise_runs():
    rng = np.random.default_rng(5)
    return [WaveformSeries(rng.standard_normal(500), 1000.0) for _ in range(100)]


class TestCurves:
    def test_reference_operating_time(self):
        config = OvercurrentConfig(100.0, time_dial=1.0)
        assert inverse_time_delay(2.0, config) == pytest.approx(3.803, abs=1e-3)

    def test_no_trip_at_or_below_pickup(self):
        cfg = OvercurrentConfig(100.0)
        assert inverse_time_delay(1.0, cfg) is None
        assert inverse_time_delay(0.5, cfg) is None
        with pytest.raises(ValueError):
            inverse_time_delay(0.0, cfg)

    def test_operating_time_decreases_with_current(self):
        cfg = OvercurrentConfig(100.0)
        times = [inverse_time_delay(m, cfg) for m in (1.1, 1.5, 2.0, 5.0, 20.0)]
        assert all(a > b for a, b in zip(times, times[1:]))

    def test_catalog(self):
        assert get_curve("very_inverse") is CURVES["very_inverse"]
        with pytest.raises(ValueError, match="Available curves"):
            get_curve("steep")


class TestRectifiedBlockMax:
    def test_one_cycle_blocks_see_the_amplitude(self, sine):
        _, maxima = rectified_block_max(sine(amplitude=100.0, duration=0.5), 100)
        assert maxima.size == 30
        np.testing.assert_allclose(maxima, 100.0, rtol=1e-9)

    def test_partial_block_dropped(self):
        _, maxima = rectified_block_max(WaveformSeries(-np.arange(25.0), 1.0), 10)
        np.testing.assert_array_equal(maxima, [9.0, 19.0])


class TestConventional:
    def test_constant_multiple_trips_after_curve_time(self, sine):
        x = sine(amplitude=200.0, duration=2.0)
        cfg = OvercurrentConfig(100.0, time_dial=0.01, block_len=100)
        outcome = conventional_detect(x, (1.0, 2.0), cfg)
        assert outcome.decision is Hypothesis.H1
        assert outcome.delay_seconds == pytest.approx(inverse_time_delay(2.0, cfg), abs=1e-3)
        assert outcome.statistic == pytest.approx(2.0)
        assert outcome.tripped and outcome.method == "conventional"

    def test_below_pickup_never_trips(self, sine):
        cfg = OvercurrentConfig(250.0, block_len=100)
        outcome = conventional_detect(sine(amplitude=200.0, duration=2.0), (1.0, 2.0), cfg)
        assert outcome.decision is Hypothesis.H0
        assert outcome.trip_time is None
        assert outcome.statistic == pytest.approx(0.8)

    def test_timer_resets_between_short_excursions(self):
        envelope = np.where((np.arange(60_000) // 50) % 2 == 0, 150.0, 50.0)
        cfg = OvercurrentConfig(100.0, time_dial=0.01, block_len=50)
        outcome = conventional_detect(_modulated(envelope), (1.0, 20.0), cfg)
        assert outcome.decision is Hypothesis.H0

    def test_scaling_current_and_pickup_together(self, sine):
        x = sine(amplitude=200.0, duration=2.0)
        base = conventional_detect(x, (1.0, 2.0), OvercurrentConfig(100.0, block_len=100))
        scaled = conventional_detect(
            x.with_samples(3.0 * x.samples), (1.0, 2.0), OvercurrentConfig(300.0, block_len=100)
        )
        assert scaled.trip_time == pytest.approx(base.trip_time, abs=1e-9)

    def test_sample_rate_cross_check(self, sine):
        with pytest.raises(ValueError, match="disagrees"):
            conventional_detect(sine(), (0.1, 0.9), OvercurrentConfig(1.0), sample_rate=50000.0)


class TestAocr:
    def test_tracks_slow_load_growth(self):
        t = np.arange(36_000) / 3000.0
        x = _modulated(100.0 + 5.0 * t)
        window = (10.0, 12.0)
        adaptive = aocr_detect(x, window, AocrConfig(alpha=1.25, avg_window=10.0, block_len=50))
        fixed = conventional_detect(x, window, OvercurrentConfig(120.0, block_len=50))
        assert adaptive.decision is Hypothesis.H0
        assert adaptive.statistic < 0.0
        assert fixed.decision is Hypothesis.H1

    def test_step_increase_trips(self):
        t = np.arange(36_000) / 3000.0
        x = _modulated(np.where(t < 10.0, 100.0, 160.0))
        outcome = aocr_detect(x, (10.0, 12.0), AocrConfig(alpha=1.25, avg_window=10.0, block_len=50))
        assert outcome.decision is Hypothesis.H1
        assert 0.1 < outcome.delay_seconds < 0.4

    def test_trailing_mean_excludes_current_block(self):
        x = WaveformSeries(np.concatenate((np.ones(100), np.full(20, 9.0))), 10.0)
        _, maxima, trailing, _ = trailing_block_mean(x, (10.0, 12.0), 10, 10.0)
        np.testing.assert_array_equal(maxima, [9.0, 9.0])
        np.testing.assert_allclose(trailing, [1.0, 1.8])

    def test_needs_history(self):
        x = _modulated(np.full(30_000, 100.0))
        with pytest.raises(ValueError, match="history"):
            aocr_detect(x, (5.0, 6.0), AocrConfig(avg_window=10.0, block_len=50))

    def test_invalid_weights(self):
        with pytest.raises(ConfigError):
            AocrConfig(alpha=0.0, beta=0.0)


class TestRelayConfigTables:
    def test_named_curve(self):
        cfg = OvercurrentConfig.from_dict({"pickup_current": 50.0, "curve": "very_inverse"})
        assert cfg.curve == CURVES["very_inverse"]

    def test_dict_round_trip(self):
        cfg = AocrConfig(alpha=1.4, beta=0.2, i_fault_min=150.0, curve="extremely_inverse")
        assert AocrConfig.from_dict(cfg.to_dict()) == cfg

    def test_unknown_key_and_curve(self):
        with pytest.raises(ConfigError, match="pickup"):
            OvercurrentConfig.from_dict({"pickup": 50.0})
        with pytest.raises(ConfigError, match="Available curves"):
            OvercurrentConfig(50.0, curve="steep")


class TestCalibration:
    def test_conventional_picks_smallest_feasible_pickup(self, noise_runs):
        grid = [0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0]
        result = calibrate(
            "conventional", noise_runs, 0.05, grid, (0.1, 0.5), OvercurrentConfig(1.0, block_len=10)
        )
        fprs = dict(result.grid_fprs)
        chosen = result.config.pickup_current
        assert result.achieved_fpr <= 0.05
        assert all(fprs[value] > 0.05 for value in grid if value < chosen)
        rates = [fpr for _, fpr in result.grid_fprs]
        assert rates == sorted(rates, reverse=True)
        assert result.config.block_len == 10

    def test_aocr_searches_alpha(self, noise_runs):
        base = AocrConfig(avg_window=0.1, block_len=10)
        result = calibrate("aocr", noise_runs, 0.05, [1.0, 1.5, 2.0, 3.0, 4.0, 6.0], (0.2, 0.5), base)
        assert result.achieved_fpr <= 0.05
        assert result.config.beta == 0.0
        assert result.to_dict()["config"]["alpha"] == result.config.alpha

    def test_isfd_picks_largest_feasible_epsilon(self):
        runs = [RunFeatures(peak_statistic=float(s)) for s in np.linspace(0.0, 10.0, 100)]
        result = calibrate("isfd", runs, 0.05, [0.001, 0.01, 0.05, 0.1], (0.0, 1.0))
        assert result.config.epsilon == 0.01
        assert dict(result.grid_fprs)[0.05] == pytest.approx(0.06)
        assert isinstance(result.config, IsfdConfig)

    def test_infeasible_target(self, noise_runs):
        with pytest.raises(CalibrationInfeasibleError) as info:
            base = OvercurrentConfig(1.0, block_len=10)
            calibrate("conventional", noise_runs, 0.05, [0.01], (0.1, 0.5), base)
        assert info.value.best_fpr == 1.0

    def test_argument_checks(self, noise_runs):
        with pytest.raises(ValueError, match="Available methods"):
            calibrate("distance", noise_runs, 0.05, [1.0], (0.1, 0.5))
        with pytest.raises(ValueError, match="at least 100"):
            calibrate("conventional", noise_runs[:10], 0.05, [1.0], (0.1, 0.5))
        with pytest.raises(ConfigError):
            calibrate("aocr", noise_runs, 0.05, [1.0], (0.1, 0.5), OvercurrentConfig(1.0))

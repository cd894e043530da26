"""Tests for the sequential innovation-based fault detector."""

import json

import numpy as np
import pytest

from cpow_innovation.errors import ConfigError, TruncatedStreamError
from cpow_innovation.innovation.ar_model import ArInnovationModel, estimate_ar_model
from cpow_innovation.isfd import (
    IsfdConfig,
    isfd_detect,
    isfd_state_flags,
    run_isfd_on_waveform,
    window_statistics,
)
from cpow_innovation.linear_prediction import synthesize_ar
from cpow_innovation.nst import Hypothesis
from cpow_innovation.scenarios.catalog import get_scenario
from cpow_innovation.waveform.feeder import simulate_scenario
from cpow_innovation.waveform.series import WaveformSeries

FS = 50000.0


def _stratified_stream():
    # every look covers whole copies of an 85-point midpoint grid
    return np.tile((np.arange(85) + 0.5) / 85, 8)


class TestIsfdConfig:
    def test_default_windows(self):
        config = IsfdConfig()
        assert config.max_iterations == 4
        assert config.window_sizes() == (85, 170, 340, 680)
        assert config.threshold == pytest.approx(9.4877, abs=1e-4)

    def test_ceiling_adds_a_look(self):
        assert IsfdConfig(ceiling=True).window_sizes() == (85, 170, 340, 680, 1360)
        assert IsfdConfig(lambda_sep=16.0, ceiling=True).max_iterations == 4

    def test_bonferroni_raises_threshold(self):
        assert IsfdConfig(bonferroni=True).threshold > IsfdConfig().threshold

    @pytest.mark.parametrize("kwargs", [{"K": 0}, {"epsilon": 1.0}, {"C": 0.0}, {"lambda_sep": 1.5}])
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigError):
            IsfdConfig(**kwargs)

    def test_to_dict(self):
        assert IsfdConfig(epsilon=0.01).to_dict()["epsilon"] == 0.01


class TestIsfdDetect:
    def test_concentrated_stream_trips_on_first_look(self):
        outcome = isfd_detect(np.full(680, 0.999), FS)
        assert outcome.decision is Hypothesis.H1
        assert outcome.samples_consumed == 85
        assert outcome.iterations_run == 1
        assert outcome.delay_seconds == pytest.approx(0.0017)

    def test_uniform_stream_runs_every_look(self):
        outcome = isfd_detect(_stratified_stream(), FS)
        assert outcome.decision is Hypothesis.H0
        assert outcome.samples_consumed == 680
        assert outcome.iterations_run == 4
        assert outcome.delay_seconds is None
        assert [entry[0] for entry in outcome.statistic_trace] == [85, 170, 340, 680]

    def test_stops_at_first_rejection(self):
        stream = np.concatenate((_stratified_stream()[:170], np.full(510, 0.999)))
        outcome = isfd_detect(stream, FS)
        assert outcome.decision is Hypothesis.H1
        assert outcome.samples_consumed == 340
        sizes, statistics, thresholds = zip(*outcome.statistic_trace)
        assert all(s <= phi for s, phi in zip(statistics[:-1], thresholds[:-1]))
        assert statistics[-1] > thresholds[-1]

    def test_pulls_lazily_from_an_iterator(self):
        pulled = []

        def stream():
            for value in np.full(10_000, 0.999):
                pulled.append(value)
                yield value

        isfd_detect(stream(), FS)
        assert len(pulled) == 85

    def test_truncated_stream(self):
        with pytest.raises(TruncatedStreamError) as info:
            isfd_detect(_stratified_stream()[:300], FS)
        assert info.value.samples_seen == 300
        assert info.value.needed == 340
        assert len(info.value.trace) == 2

    def test_outcome_serializes(self):
        outcome = isfd_detect(np.full(85, 0.999), FS)
        document = json.loads(outcome.to_json())
        assert document["decision"] == "H1"
        assert document["trace"][0][0] == 85

    def test_false_positive_rate_under_uniform_innovations(self):
        rng = np.random.default_rng(99)
        reps = 2000
        rejections = sum(
            isfd_detect(rng.random(680), FS).decision is Hypothesis.H1 for _ in range(reps)
        )
        assert 0.03 <= rejections / reps <= 0.19


class TestWindowStatistics:
    def test_maximum_matches_sequential_decision(self, rng):
        config = IsfdConfig()
        for _ in range(50):
            values = rng.random(680) ** rng.uniform(0.8, 1.25)
            peak = window_statistics(values, config).max()
            tripped = isfd_detect(values, FS, config).decision is Hypothesis.H1
            assert tripped == (peak > config.threshold)

    def test_requires_full_stream(self):
        with pytest.raises(TruncatedStreamError):
            window_statistics(np.full(600, 0.5))


class TestRunOnWaveform:
    @pytest.fixture
    def ar1(self):
        return ArInnovationModel(order=1, ar_coeffs=(0.5,), innovation_std=1.0)

    def test_mean_shift_is_detected_on_first_look(self, ar1, rng):
        samples = synthesize_ar([0.5], rng.standard_normal(3000))
        samples[1000:] += 10.0
        x = WaveformSeries(samples, sample_rate=1000.0)
        outcome = run_isfd_on_waveform(ar1, x, t_start=1.0)
        assert outcome.decision is Hypothesis.H1
        assert outcome.delay_seconds == pytest.approx(0.085)

    def test_start_inside_warmup(self, ar1, rng):
        x = WaveformSeries(rng.standard_normal(2000), sample_rate=1000.0)
        with pytest.raises(ValueError, match="warm-up"):
            run_isfd_on_waveform(ar1, x, t_start=0.0)
        with pytest.raises(ValueError):
            run_isfd_on_waveform(ar1, x, t_start=5.0)


class TestStateFlags:
    @pytest.fixture
    def ar1(self):
        return ArInnovationModel(order=1, ar_coeffs=(0.5,), innovation_std=1.0)

    def test_blocks_after_a_shift_are_flagged(self, ar1, rng):
        samples = synthesize_ar([0.5], rng.standard_normal(1 + 4 * 680 + 100))
        samples[1 + 2 * 680 :] += 10.0
        flags = isfd_state_flags(ar1, WaveformSeries(samples, sample_rate=1000.0))
        assert len(flags) == 4
        assert flags[2:] == [True, True]

    def test_needs_one_full_block(self, ar1, rng):
        x = WaveformSeries(rng.standard_normal(600), sample_rate=1000.0)
        with pytest.raises(ValueError, match="680"):
            isfd_state_flags(ar1, x)


@pytest.mark.slow
def test_primary_fault_trips_on_the_first_look():
    scenario = get_scenario("F1", sample_rate=6000.0, duration=3.0, onset=2.5)
    clean = simulate_scenario(scenario.without_faults().with_seed(10_000))["R3"]
    training = clean.window(0.5, 2.5)
    model = estimate_ar_model(training, 16, envelope_mode=False, fundamental_freq=60.0)
    first_look = 0
    for seed in range(100):
        x = simulate_scenario(scenario.with_seed(seed))["R3"]
        outcome = run_isfd_on_waveform(model, x.window(2.0), t_start=2.5)
        first_look += outcome.decision is Hypothesis.H1 and outcome.samples_consumed == 85
    assert first_look >= 95

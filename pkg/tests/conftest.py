"""Shared fixtures for the cpow-innovation test suite."""

from pathlib import Path

import numpy as np
import pytest

from cpow_innovation.innovation.ar_model import ArInnovationModel
from cpow_innovation.linear_prediction import synthesize_ar
from cpow_innovation.scenarios.catalog import get_scenario
from cpow_innovation.waveform.scenario_io import scenario_to_toml
from cpow_innovation.waveform.series import WaveformSeries

# 6 kHz keeps the 11.5 s presets cheap while leaving room for the 3rd harmonic
FAST_RATE = 6000.0
AR2_COEFFS = (0.6, -0.3)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def ar2_model():
    return ArInnovationModel(
        order=2, ar_coeffs=AR2_COEFFS, innovation_std=1.0, mean=0.0, envelope_mode=False
    )


@pytest.fixture
def ar2_series(rng):
    """10⁴ stationary samples of the AR(2) law of ``ar2_model``."""
    burn = 1000
    samples = synthesize_ar(AR2_COEFFS, rng.standard_normal(10_000 + burn))[burn:]
    return WaveformSeries(samples, sample_rate=1000.0)


@pytest.fixture
def sine():
    """Factory for pure tones: ``sine(amplitude, freq, fs, duration)``."""

    def make(amplitude=100.0, freq=60.0, fs=FAST_RATE, duration=1.0, t0=0.0):
        t = t0 + np.arange(int(round(duration * fs))) / fs
        return WaveformSeries(amplitude * np.sin(2.0 * np.pi * freq * t), fs, t0)

    return make


@pytest.fixture
def fast_scenario():
    """Preset F2 at 6 kHz."""
    return get_scenario("F2", seed=0, sample_rate=FAST_RATE)


@pytest.fixture
def fast_scenario_path(tmp_path, fast_scenario) -> Path:
    return scenario_to_toml(fast_scenario, tmp_path / "f2_fast.toml")


@pytest.fixture(params=["F1", "F2", "F3"])
def preset_pair(request):
    """Every catalog preset at 6 kHz together with its no-fault twin."""
    scenario = get_scenario(request.param, seed=0, sample_rate=FAST_RATE)
    return scenario, scenario.without_faults()

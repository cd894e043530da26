"""Waveform containers and the synthetic feeder simulator."""

from cpow_innovation.waveform.feeder import (
    DEFAULT_MULTIPLIERS,
    FaultSpec,
    FeederScenario,
    RelayRole,
    RelaySpec,
    simulate_scenario,
    transient_profile,
)
from cpow_innovation.waveform.sdg import SdgKind, SdgProcess, sample_sdg_trajectory
from cpow_innovation.waveform.series import WaveformSeries

__all__ = [
    "DEFAULT_MULTIPLIERS",
    "FaultSpec",
    "FeederScenario",
    "RelayRole",
    "RelaySpec",
    "SdgKind",
    "SdgProcess",
    "WaveformSeries",
    "sample_sdg_trajectory",
    "simulate_scenario",
    "transient_profile",
]

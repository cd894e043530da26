"""Per-relay current waveforms for a radial feeder with SDG and injected faults."""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.interpolate import CubicSpline

from cpow_innovation.errors import ConfigError
from cpow_innovation.waveform.sdg import SdgProcess, sample_sdg_trajectory
from cpow_innovation.waveform.series import WaveformSeries

logger = logging.getLogger(__name__)

# Defaults for the relay catalog; multipliers are post-fault / pre-fault envelope ratios
DEFAULT_MULTIPLIERS: Dict[str, float] = {
    "primary": 6.0,
    "backup": 3.0,
    "sympathetic": 1.6,
    "blinded_primary": 1.8,
}
DEFAULT_TRANSIENT_TAU = 0.005
DEFAULT_NOISE_FRACTION = 0.005
DEFAULT_HARMONIC_FRACTION = 0.10
DEFAULT_ARC_FRACTION = 0.02

# independent random streams of one simulation, keyed for SeedSequence spawn keys
_STREAM_SDG = 0
_STREAM_PHASE = 1
_STREAM_NOISE = 2
_STREAM_ARC = 3
_STREAM_ONOFF = 4


class RelayRole(str, Enum):
    """Part a relay plays in a fault scenario."""

    PRIMARY = "primary"
    BACKUP = "backup"
    SYMPATHETIC = "sympathetic"
    BLINDED_PRIMARY = "blinded_primary"
    UNAFFECTED = "unaffected"


@dataclass(frozen=True)
class FaultSpec:
    """A single-phase fault as seen by one relay.

    Attributes:
        onset: Fault instant in seconds
        envelope_multiplier: Post-fault / pre-fault fundamental envelope ratio
        transient_tau: Time constant of the envelope transition in seconds
        harmonic_injection: Harmonic amplitudes in amperes keyed by harmonic index
        arc_noise: Standard deviation of broadband arcing distortion in amperes
    """

    onset: float
    envelope_multiplier: float
    transient_tau: float = DEFAULT_TRANSIENT_TAU
    harmonic_injection: Dict[int, float] = field(default_factory=dict)
    arc_noise: float = 0.0

    def __post_init__(self) -> None:
        if not np.isfinite(self.envelope_multiplier) or self.envelope_multiplier <= 0:
            raise ValueError(
                f"envelope_multiplier must be positive and finite, got {self.envelope_multiplier}"
            )
        if self.transient_tau <= 0:
            raise ValueError(f"transient_tau must be positive, got {self.transient_tau}")
        if self.arc_noise < 0:
            raise ValueError(f"arc_noise must be non-negative, got {self.arc_noise}")
        harmonics = {int(k): float(v) for k, v in self.harmonic_injection.items()}
        for index, amplitude in harmonics.items():
            if index < 2 or amplitude < 0:
                raise ValueError(f"Invalid harmonic injection {index}: {amplitude}")
        object.__setattr__(self, "harmonic_injection", harmonics)


@dataclass(frozen=True)
class RelaySpec:
    """One protective relay and what it sees.

    Attributes:
        name: Relay identifier
        role: Role in the scenario
        base_envelope: Fundamental envelope without SDG in amperes
        sdg_coupling: Weight of the SDG trajectory in this relay's envelope
        fault: Fault seen by this relay, if any
        noise_fraction: Sensor noise standard deviation as a fraction of ``base_envelope``
    """

    name: str
    role: RelayRole = RelayRole.UNAFFECTED
    base_envelope: float = 100.0
    sdg_coupling: float = 0.0
    fault: Optional[FaultSpec] = None
    noise_fraction: float = DEFAULT_NOISE_FRACTION

    def __post_init__(self) -> None:
        object.__setattr__(self, "role", RelayRole(self.role))
        if not self.name:
            raise ConfigError("Relay name must not be empty")
        if self.base_envelope <= 0:
            raise ConfigError(
                f"Relay {self.name}: base_envelope must be positive, got {self.base_envelope}"
            )
        if self.sdg_coupling < 0:
            raise ConfigError(
                f"Relay {self.name}: sdg_coupling must be non-negative, got {self.sdg_coupling}"
            )
        if self.noise_fraction < 0:
            raise ConfigError(f"Relay {self.name}: noise_fraction must be non-negative")
        if self.fault is None:
            return
        if self.role is RelayRole.SYMPATHETIC and self.fault.envelope_multiplier <= 1:
            raise ConfigError(f"Sympathetic relay {self.name} needs a fault multiplier > 1")
        if (
            self.role is RelayRole.BLINDED_PRIMARY
            and self.effective_multiplier() >= DEFAULT_MULTIPLIERS["primary"]
        ):
            raise ConfigError(
                f"Blinded relay {self.name} needs a fault multiplier below the primary default"
            )

    def effective_multiplier(self) -> float:
        """Envelope ratio actually reached after the fault.

        SDG offsets the grid fault current at a blinded primary relay: the nominal
        increment ``m - 1`` is divided by ``1 + sdg_coupling``.
        """
        if self.fault is None:
            return 1.0
        m = self.fault.envelope_multiplier
        if self.role is RelayRole.BLINDED_PRIMARY:
            return 1.0 + (m - 1.0) / (1.0 + self.sdg_coupling)
        return m

    @property
    def noise_std(self) -> float:
        return self.noise_fraction * self.base_envelope


@dataclass(frozen=True)
class FeederScenario:
    """A fault-injection experiment on the synthetic feeder.

    Attributes:
        relays: Relays observed in the scenario
        duration: Simulated span in seconds
        sample_rate: Waveform sampling rate in Hz
        fundamental_freq: Grid frequency in Hz
        seed: Master seed of the simulation
        sdg: SDG trajectory generator shared by all relays
        name: Scenario label
    """

    relays: Tuple[RelaySpec, ...]
    duration: float
    sample_rate: float = 50000.0
    fundamental_freq: float = 60.0
    seed: int = 0
    sdg: Optional[SdgProcess] = None
    name: str = "custom"

    def __post_init__(self) -> None:
        object.__setattr__(self, "relays", tuple(self.relays))
        if not self.relays:
            raise ConfigError("A scenario needs at least one relay")
        names = [relay.name for relay in self.relays]
        if len(set(names)) != len(names):
            raise ConfigError(f"Duplicate relay names in scenario: {names}")
        if self.duration <= 0:
            raise ConfigError(f"duration must be positive, got {self.duration}")
        if self.fundamental_freq <= 0:
            raise ConfigError(f"fundamental_freq must be positive, got {self.fundamental_freq}")
        if self.seed < 0:
            raise ConfigError(f"seed must be unsigned, got {self.seed}")
        highest = self.highest_harmonic() * self.fundamental_freq
        if self.sample_rate < 2 * highest:
            raise ConfigError(
                f"sample_rate {self.sample_rate} Hz below twice the highest modeled harmonic "
                f"({highest} Hz)"
            )
        for relay in self.relays:
            if relay.fault is not None and not 0 <= relay.fault.onset < self.duration:
                raise ConfigError(
                    f"Relay {relay.name}: fault onset {relay.fault.onset} outside [0, {self.duration})"
                )

    def highest_harmonic(self) -> int:
        indices = [1]
        for relay in self.relays:
            if relay.fault is not None:
                indices.extend(relay.fault.harmonic_injection)
        if self.sdg is not None:
            indices.extend(self.sdg.harmonic_onoff)
        return max(indices)

    @property
    def n_samples(self) -> int:
        return int(round(self.duration * self.sample_rate))

    @property
    def onset(self) -> Optional[float]:
        """Earliest fault onset, or None for a fault-free scenario."""
        onsets = [relay.fault.onset for relay in self.relays if relay.fault is not None]
        return min(onsets) if onsets else None

    def relay(self, name: str) -> RelaySpec:
        for relay in self.relays:
            if relay.name == name:
                return relay
        available = ", ".join(relay.name for relay in self.relays)
        raise ValueError(f"Relay {name} not found. Available relays: {available}")

    def relay_names(self) -> Tuple[str, ...]:
        return tuple(relay.name for relay in self.relays)

    def without_faults(self) -> "FeederScenario":
        """The no-fault twin; shares every random stream with this scenario."""
        return replace(self, relays=tuple(replace(relay, fault=None) for relay in self.relays))

    def with_seed(self, seed: int) -> "FeederScenario":
        return replace(self, seed=int(seed))


def transient_profile(elapsed: np.ndarray, tau: float) -> np.ndarray:
    """Continuously differentiable 0→1 transition, ``1 - (1 + s/τ)·exp(-s/τ)`` for s ≥ 0."""
    s = np.maximum(np.asarray(elapsed, dtype=float), 0.0) / tau
    return 1.0 - (1.0 + s) * np.exp(-s)


def _stream(seed: int, key: int, index: int = 0) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(key, index)))


def _sdg_waveform(scenario: FeederScenario, t: np.ndarray) -> np.ndarray:
    sdg = scenario.sdg
    if sdg is None:
        return np.zeros_like(t)
    rate = sdg.native_rate
    n_native = int(np.ceil(scenario.duration * rate)) + 4
    sequence = np.random.SeedSequence(entropy=scenario.seed, spawn_key=(_STREAM_SDG,))
    seed = int(sequence.generate_state(1)[0])
    trajectory = sample_sdg_trajectory(sdg, n_native, seed)
    spline = CubicSpline(np.arange(n_native) / rate, trajectory)
    values = spline(t)
    if sdg.floor is not None:
        values = np.maximum(values, sdg.floor)
    return values


def _sporadic_harmonics(scenario: FeederScenario, t: np.ndarray, phase: float) -> np.ndarray:
    sdg = scenario.sdg
    if sdg is None or not sdg.harmonic_onoff:
        return np.zeros_like(t)
    rng = _stream(scenario.seed, _STREAM_ONOFF)
    rate = sdg.native_rate
    n_native = int(np.ceil(scenario.duration * rate)) + 2
    switch_prob = min(1.0, 1.0 / (sdg.harmonic_dwell * rate))
    total = np.zeros_like(t)
    for index, amplitude in sorted(sdg.harmonic_onoff.items()):
        flips = rng.random(n_native) < switch_prob
        state = (np.cumsum(flips) + int(rng.integers(0, 2))) % 2
        level = np.interp(t, np.arange(n_native) / rate, state.astype(float))
        # smoothstep keeps the on/off ramps free of slope jumps
        level = level * level * (3.0 - 2.0 * level)
        carrier = np.sin(2 * np.pi * index * scenario.fundamental_freq * t + index * phase)
        total += amplitude * level * carrier
    return total


def simulate_scenario(scenario: FeederScenario) -> Dict[str, WaveformSeries]:
    """Simulate the current waveform at every relay of a scenario.

    Each relay's waveform is ``envelope(t)·sin(2π f0 t + φ)`` plus harmonic terms, arcing
    distortion and Gaussian sensor noise. The envelope is ``base + coupling·SDG(t)`` before
    onset and moves toward ``multiplier × pre-fault mean`` afterwards.

    Args:
        scenario: Scenario to simulate

    Returns:
        Mapping relay name → waveform, deterministic given ``scenario.seed``
    """
    n = scenario.n_samples
    fs = scenario.sample_rate
    f0 = scenario.fundamental_freq
    t = np.arange(n) / fs
    sdg = _sdg_waveform(scenario, t)
    phase = float(_stream(scenario.seed, _STREAM_PHASE).uniform(0.0, 2.0 * np.pi))
    sporadic = _sporadic_harmonics(scenario, t, phase)
    carrier = np.sin(2.0 * np.pi * f0 * t + phase)

    waveforms: Dict[str, WaveformSeries] = {}
    for index, relay in enumerate(scenario.relays):
        # draw every stream unconditionally so fault and no-fault twins share sample paths
        sensor = _stream(scenario.seed, _STREAM_NOISE, index).standard_normal(n)
        arc = _stream(scenario.seed, _STREAM_ARC, index).standard_normal(n)

        envelope = relay.base_envelope + relay.sdg_coupling * sdg
        signal = relay.sdg_coupling * sporadic
        onset = None
        if relay.fault is not None:
            fault = relay.fault
            onset = fault.onset
            k0 = min(int(np.ceil(onset * fs - 1e-9)), n)
            pre_mean = float(envelope[:k0].mean()) if k0 > 0 else float(envelope[0])
            target = relay.effective_multiplier() * pre_mean
            ramp = transient_profile(t[k0:] - onset, fault.transient_tau)
            envelope = envelope.copy()
            envelope[k0:] += (target - envelope[k0:]) * ramp
            for harmonic, amplitude in sorted(fault.harmonic_injection.items()):
                signal[k0:] += (
                    amplitude * ramp * np.sin(2.0 * np.pi * harmonic * f0 * t[k0:] + harmonic * phase)
                )
            signal[k0:] += fault.arc_noise * arc[k0:]

        samples = envelope * carrier + signal + relay.noise_std * sensor
        waveforms[relay.name] = WaveformSeries(
            samples,
            fs,
            0.0,
            {"relay": relay.name, "role": relay.role.value, "onset": onset, "phase": phase},
        )
    logger.debug(
        "Simulated %s (%d relays, %d samples, seed %d)",
        scenario.name,
        len(waveforms),
        n,
        scenario.seed,
    )
    return waveforms

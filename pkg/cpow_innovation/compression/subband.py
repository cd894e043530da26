"""Harmonic subband filter bank.

Subband k shifts the k-th harmonic to DC, low-passes it to ``W/2`` and decimates, so a
narrowband power waveform is carried by ``m`` complex sequences at about ``2W`` Hz.
Reconstruction interpolates, remodulates and sums ``2·Re{z_k e^{j2πkf0t}}``.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from cpow_innovation.errors import ConfigError
from cpow_innovation.multirate import (
    DecimationStage,
    decimate,
    design_stages,
    interpolate,
    largest_factorable,
    total_delay_samples,
)
from cpow_innovation.waveform.series import WaveformSeries

DEFAULT_SUBBAND_WIDTH = 2.0
DEFAULT_FILTER_TAPS = 255


@dataclass(frozen=True)
class SubbandPlan:
    """Layout of the harmonic filter bank.

    Attributes:
        f0: Fundamental frequency in Hz
        m: Number of subbands (fundamental plus m-1 harmonics)
        W: Two-sided passband width of each subband in Hz
        fs: Input sample rate in Hz
        decimation: Total decimation; defaults to the largest stage-factorable value ≤ fs/(2W)
        filter_taps: Tap limit per filter stage
    """

    f0: float
    m: int
    fs: float
    W: float = DEFAULT_SUBBAND_WIDTH
    decimation: Optional[int] = None
    filter_taps: int = DEFAULT_FILTER_TAPS

    def __post_init__(self) -> None:
        if self.f0 <= 0 or self.W <= 0 or self.fs <= 0:
            raise ConfigError(f"f0, W and fs must be positive, got {self.f0}, {self.W}, {self.fs}")
        if self.m < 1:
            raise ConfigError(f"m must be at least 1, got {self.m}")
        if self.m * self.f0 + self.W / 2.0 >= self.fs / 2.0:
            raise ConfigError(
                f"Sample rate {self.fs} Hz too low for {self.m} subbands of {self.W} Hz at {self.f0} Hz"
            )
        limit = int(np.floor(self.fs / (2.0 * self.W)))
        if self.decimation is None:
            object.__setattr__(self, "decimation", largest_factorable(limit))
        if not 1 <= self.decimation <= limit:
            raise ConfigError(f"decimation must lie in [1, {limit}], got {self.decimation}")

    @property
    def rate(self) -> float:
        """Subband sample rate in Hz."""
        return self.fs / self.decimation

    @property
    def center_freqs(self) -> Tuple[float, ...]:
        return tuple(k * self.f0 for k in range(1, self.m + 1))

    def stages(self) -> Tuple[DecimationStage, ...]:
        return design_stages(self.fs, self.decimation, self.W / 2.0, self.filter_taps)

    @property
    def delay_samples(self) -> int:
        """One-way group delay of the decimation cascade in input samples."""
        return total_delay_samples(self.stages(), self.fs)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "f0": self.f0,
            "m": self.m,
            "fs": self.fs,
            "W": self.W,
            "decimation": self.decimation,
            "filter_taps": self.filter_taps,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SubbandPlan":
        unknown = sorted(set(data) - {"f0", "m", "fs", "W", "decimation", "filter_taps"})
        if unknown:
            raise ConfigError(f"Unknown key(s) {', '.join(unknown)} for SubbandPlan")
        return cls(**data)


@dataclass(frozen=True)
class SubbandSignal:
    """Complex baseband of one harmonic subband.

    Attributes:
        baseband: Complex samples at ``rate``
        center_freq: Harmonic frequency shifted to DC (Hz)
        rate: Post-decimation rate in Hz
        harmonic: Harmonic index k
        metadata: Group delay and input length
    """

    baseband: np.ndarray
    center_freq: float
    rate: float
    harmonic: int = 1
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return int(self.baseband.size)

    def with_baseband(self, baseband: np.ndarray) -> "SubbandSignal":
        return SubbandSignal(
            np.asarray(baseband, dtype=complex),
            self.center_freq,
            self.rate,
            self.harmonic,
            dict(self.metadata),
        )


def _padding(plan: SubbandPlan) -> int:
    return 2 * plan.delay_samples + plan.decimation


def subband_decompose(x: WaveformSeries, plan: SubbandPlan) -> List[SubbandSignal]:
    """Split a waveform into its harmonic subbands.

    The input is zero-padded at the end so the reconstruction filters can flush.

    Args:
        x: Input waveform sampled at ``plan.fs``
        plan: Filter bank layout

    Returns:
        One SubbandSignal per harmonic, fundamental first

    Raises:
        ConfigError: If the series rate does not match the plan

    Example:
        >>> bands = subband_decompose(series, SubbandPlan(f0=60.0, m=3, fs=50000.0))
        >>> [band.harmonic for band in bands]
        [1, 2, 3]
    """
    if not np.isclose(x.sample_rate, plan.fs):
        raise ConfigError(f"Series rate {x.sample_rate} Hz does not match plan rate {plan.fs} Hz")
    stages = plan.stages()
    delay = total_delay_samples(stages, plan.fs)
    padded = np.concatenate((x.samples, np.zeros(_padding(plan))))
    t = x.t0 + np.arange(padded.size) / plan.fs
    metadata = {"delay_samples": delay, "length": len(x), "t0": x.t0}

    bands = []
    for k, freq in enumerate(plan.center_freqs, start=1):
        baseband = decimate(padded * np.exp(-2j * np.pi * freq * t), stages)
        bands.append(SubbandSignal(baseband, freq, plan.rate, k, dict(metadata)))
    return bands


def subband_reconstruct(
    subbands: Sequence[SubbandSignal],
    plan: SubbandPlan,
    length: int,
    t0: float = 0.0,
) -> WaveformSeries:
    """Assemble a waveform from harmonic subbands.

    Args:
        subbands: Basebands produced with ``plan``; absent harmonics contribute nothing
        plan: Filter bank layout used for decomposition
        length: Number of output samples
        t0: Time of the first output sample

    Returns:
        Delay-compensated reconstruction at ``plan.fs``

    Raises:
        ValueError: If a subband does not belong to the plan or is too short
    """
    stages = plan.stages()
    delay = total_delay_samples(stages, plan.fs)
    start = 2 * delay
    t = t0 + np.arange(length) / plan.fs
    out = np.zeros(length)
    for band in subbands:
        if not 1 <= band.harmonic <= plan.m or not np.isclose(band.center_freq, band.harmonic * plan.f0):
            raise ValueError(f"Subband at {band.center_freq} Hz is not part of the plan")
        if not np.isclose(band.rate, plan.rate):
            raise ValueError(f"Subband rate {band.rate} Hz does not match plan rate {plan.rate} Hz")
        upsampled = interpolate(band.baseband, stages)
        if upsampled.size < start + length:
            raise ValueError(f"Subband {band.harmonic} too short for {length} output samples")
        segment = upsampled[start : start + length]
        out += 2.0 * np.real(segment * np.exp(2j * np.pi * band.center_freq * t))
    return WaveformSeries(out, plan.fs, t0, {"delay_samples": delay})


def settled_slice(plan: SubbandPlan, length: int) -> slice:
    """Output samples unaffected by the filter edges of a decompose/reconstruct round trip."""
    edge = 2 * plan.delay_samples
    return slice(min(edge, length), max(min(edge, length), length - edge))

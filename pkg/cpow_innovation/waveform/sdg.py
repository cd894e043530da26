"""Stochastic distributed generation (SDG) current trajectories."""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from cpow_innovation.errors import ConfigError
from cpow_innovation.ingest.bootstrap import block_bootstrap
from cpow_innovation.linear_prediction import is_stable, spectral_radius, synthesize_ar
from cpow_innovation.waveform.series import WaveformSeries

logger = logging.getLogger(__name__)

# burn-in stops once the slowest AR mode has decayed to this fraction
_BURN_IN_DECAY = 1e-12
_MAX_BURN_IN = 1_000_000


class SdgKind(str, Enum):
    """How an SDG trajectory is synthesized."""

    AR_GAUSSIAN = "ar_gaussian"
    BOOTSTRAP = "bootstrap"


@dataclass(frozen=True)
class SdgProcess:
    """Generator description for an SDG current trajectory.

    Attributes:
        kind: ``ar_gaussian`` or ``bootstrap``
        ar_coeffs: AR predictor weights (ar_gaussian)
        noise_std: Driving noise standard deviation (ar_gaussian)
        mean_power: Mean envelope contribution in amperes (ar_gaussian)
        bootstrap_source: Ingested profile to resample (bootstrap)
        block_len: Bootstrap block length in samples; defaults to one second of the source
        rate: Native trajectory rate in Hz for ar_gaussian (bootstrap uses the source rate)
        floor: Lower clip applied after upsampling (generation cannot go negative), None disables
        harmonic_onoff: Sporadic harmonic amplitudes keyed by harmonic index
        harmonic_dwell: Mean on/off dwell time of sporadic harmonics in seconds
    """

    kind: SdgKind = SdgKind.AR_GAUSSIAN
    ar_coeffs: Tuple[float, ...] = ()
    noise_std: float = 1.0
    mean_power: float = 0.0
    bootstrap_source: Optional[WaveformSeries] = None
    block_len: Optional[int] = None
    rate: float = 100.0
    floor: Optional[float] = None
    harmonic_onoff: Dict[int, float] = field(default_factory=dict)
    harmonic_dwell: float = 0.5

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", SdgKind(self.kind))
        object.__setattr__(self, "ar_coeffs", tuple(float(a) for a in self.ar_coeffs))
        if self.noise_std < 0:
            raise ValueError(f"noise_std must be non-negative, got {self.noise_std}")
        if self.rate <= 0:
            raise ValueError(f"rate must be positive, got {self.rate}")
        if self.block_len is not None and self.block_len < 1:
            raise ValueError(f"block_len must be positive, got {self.block_len}")
        if self.harmonic_dwell <= 0:
            raise ValueError(f"harmonic_dwell must be positive, got {self.harmonic_dwell}")
        for index, amplitude in self.harmonic_onoff.items():
            if int(index) < 2 or amplitude < 0:
                raise ValueError(f"Invalid sporadic harmonic {index}: {amplitude}")
        if self.kind is SdgKind.AR_GAUSSIAN and not is_stable(self.ar_coeffs):
            raise ValueError(f"AR coefficients {self.ar_coeffs} are not stable")
        if self.bootstrap_source is not None and self.resolved_block_len > len(self.bootstrap_source):
            raise ValueError(
                f"block_len {self.resolved_block_len} exceeds source length {len(self.bootstrap_source)}"
            )

    @property
    def native_rate(self) -> float:
        """Rate of the trajectory returned by :func:`sample_sdg_trajectory`."""
        if self.kind is SdgKind.BOOTSTRAP and self.bootstrap_source is not None:
            return self.bootstrap_source.sample_rate
        return self.rate

    @property
    def resolved_block_len(self) -> int:
        if self.block_len is not None:
            return int(self.block_len)
        if self.bootstrap_source is not None:
            return max(1, min(int(round(self.bootstrap_source.sample_rate)), len(self.bootstrap_source)))
        return 1

    @property
    def stationary_std(self) -> float:
        """Stationary standard deviation of the AR law (ar_gaussian only)."""
        impulse = synthesize_ar(self.ar_coeffs, np.r_[1.0, np.zeros(_burn_in(self.ar_coeffs) + 1)])
        return float(self.noise_std * np.sqrt(np.sum(impulse**2)))


def _burn_in(coeffs: Sequence[float]) -> int:
    if len(coeffs) == 0:
        return 0
    rho = spectral_radius(coeffs)
    if rho <= 0:
        return len(coeffs)
    return int(min(_MAX_BURN_IN, max(len(coeffs), np.ceil(np.log(_BURN_IN_DECAY) / np.log(rho)))))


def sample_sdg_trajectory(process: SdgProcess, n: int, seed: Optional[int] = None) -> np.ndarray:
    """Draw ``n`` samples of an SDG trajectory at the process's native rate.

    Args:
        process: Trajectory generator
        n: Number of samples
        seed: Random seed

    Returns:
        Array of ``n`` current values in amperes

    Raises:
        ConfigError: If a bootstrap trajectory is requested without a source
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")

    if process.kind is SdgKind.BOOTSTRAP:
        if process.bootstrap_source is None:
            raise ConfigError("Bootstrap SDG process requires a bootstrap_source")
        return block_bootstrap(process.bootstrap_source, process.resolved_block_len, n, seed)

    rng = np.random.default_rng(seed)
    burn = _burn_in(process.ar_coeffs)
    drive = process.noise_std * rng.standard_normal(n + burn)
    path = synthesize_ar(process.ar_coeffs, drive)[burn:]
    return process.mean_power + path

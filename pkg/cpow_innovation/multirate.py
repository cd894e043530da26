"""Multi-stage FIR decimation and interpolation.

A total decimation factor is split into stages of at most ``MAX_STAGE_FACTOR``.
Every stage is a Hamming-windowed sinc applied polyphase. Intermediate stages only
have to keep the final passband free of aliases, so their transition band is wide
and their filters short; the last stage cuts off at the requested band edge.
"""

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from scipy.signal import firwin, upfirdn

from cpow_innovation.errors import ConfigError

MAX_STAGE_FACTOR = 10
# taps per (input rate / transition width); Hamming needs about 3.3
TAPS_PER_TRANSITION = 6.0


def decimation_factors(total: int, max_factor: int = MAX_STAGE_FACTOR) -> List[int]:
    """Split ``total`` into stage factors no larger than ``max_factor``, largest first.

    Raises:
        ConfigError: If ``total`` has a prime factor above ``max_factor``
    """
    if total < 1:
        raise ConfigError(f"Decimation must be a positive integer, got {total}")
    factors = []
    remaining = int(total)
    while remaining > 1:
        for candidate in range(min(max_factor, remaining), 1, -1):
            if remaining % candidate == 0:
                factors.append(candidate)
                remaining //= candidate
                break
        else:
            raise ConfigError(
                f"Decimation {total} has a prime factor above {max_factor}; choose another decimation"
            )
    return factors


def largest_factorable(limit: int, max_factor: int = MAX_STAGE_FACTOR) -> int:
    """Largest integer ≤ ``limit`` whose prime factors are all ≤ ``max_factor``."""
    for candidate in range(int(limit), 0, -1):
        remaining = candidate
        for prime in (2, 3, 5, 7):
            if prime > max_factor:
                break
            while remaining % prime == 0:
                remaining //= prime
        if remaining == 1:
            return candidate
    return 1


@dataclass(frozen=True)
class DecimationStage:
    factor: int
    input_rate: float
    taps: np.ndarray

    @property
    def delay_seconds(self) -> float:
        return (self.taps.size - 1) / (2.0 * self.input_rate)


def _odd_taps(count: float, limit: int) -> int:
    n = int(np.ceil(count))
    n = max(3, min(n, limit))
    return n if n % 2 == 1 else n + 1 if n + 1 <= limit else n - 1


def design_stages(
    sample_rate: float,
    decimation: int,
    band_edge: float,
    max_taps: int = 255,
) -> Tuple[DecimationStage, ...]:
    """Design the filter cascade for decimating a complex baseband.

    Args:
        sample_rate: Input rate in Hz
        decimation: Total decimation factor
        band_edge: One-sided edge of the band to keep (Hz); the last stage cuts off here
        max_taps: Upper bound on taps per stage

    Returns:
        Stages in processing order
    """
    if max_taps < 3:
        raise ConfigError(f"filter_taps must be at least 3, got {max_taps}")
    factors = decimation_factors(decimation)
    final_rate = sample_rate / decimation
    if band_edge <= 0 or band_edge >= final_rate:
        raise ConfigError(f"Band edge {band_edge} Hz incompatible with output rate {final_rate} Hz")

    stages = []
    rate = float(sample_rate)
    for position, factor in enumerate(factors):
        out_rate = rate / factor
        if position == len(factors) - 1:
            cutoff = band_edge
            transition = final_rate - 2.0 * band_edge if final_rate > 3.0 * band_edge else band_edge
        else:
            # keep [0, band_edge] alias-free after this stage
            cutoff = out_rate / 2.0
            transition = out_rate - 2.0 * band_edge
        n_taps = _odd_taps(TAPS_PER_TRANSITION * rate / transition, max_taps)
        taps = firwin(n_taps, cutoff, window="hamming", fs=rate)
        stages.append(DecimationStage(factor, rate, taps))
        rate = out_rate
    return tuple(stages)


def total_delay_samples(stages: Sequence[DecimationStage], sample_rate: float) -> int:
    """Group delay of the decimation cascade in input-rate samples."""
    total = 0.0
    for stage in stages:
        total += (stage.taps.size - 1) / 2.0 * (sample_rate / stage.input_rate)
    return int(round(total))


def decimate(x: np.ndarray, stages: Sequence[DecimationStage]) -> np.ndarray:
    """Filter and downsample through every stage.

    Output index j maps to input index j·D minus the delay.
    """
    y = np.asarray(x)
    for stage in stages:
        y = upfirdn(stage.taps, y, up=1, down=stage.factor)
    return y


def interpolate(z: np.ndarray, stages: Sequence[DecimationStage]) -> np.ndarray:
    """Upsample and filter through the stages in reverse, with gain restoring the passband."""
    y = np.asarray(z)
    for stage in reversed(stages):
        y = stage.factor * upfirdn(stage.taps, y, up=stage.factor, down=1)
    return y

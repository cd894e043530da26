"""Gaussian rate-distortion allocation by inverse water-filling."""

from dataclasses import dataclass
from typing import Any, Dict, Sequence, Tuple

import numpy as np


@dataclass(frozen=True)
class RateAllocation:
    """Per-band distortions at a common water level.

    Attributes:
        variances: Band variances σᵢ²
        distortions: Allocated distortions Dᵢ = min(θ, σᵢ²)
        water_level: θ
        total_rate: Σ max(0, ½·ln(σᵢ²/Dᵢ)) in nats per sample vector
    """

    variances: Tuple[float, ...]
    distortions: Tuple[float, ...]
    water_level: float
    total_rate: float

    @property
    def rates(self) -> Tuple[float, ...]:
        """Per-band rates in nats per sample."""
        return tuple(_band_rate(s, d) for s, d in zip(self.variances, self.distortions))

    @property
    def total_bits(self) -> float:
        return self.total_rate / np.log(2.0)

    @property
    def total_distortion(self) -> float:
        return float(sum(self.distortions))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "variances": list(self.variances),
            "distortions": list(self.distortions),
            "water_level": self.water_level,
            "total_rate": self.total_rate,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RateAllocation":
        return cls(
            tuple(float(v) for v in data["variances"]),
            tuple(float(d) for d in data["distortions"]),
            float(data["water_level"]),
            float(data["total_rate"]),
        )


def _band_rate(variance: float, distortion: float) -> float:
    if variance <= 0 or distortion >= variance:
        return 0.0
    return 0.5 * float(np.log(variance / distortion))


def _water_level(variances: np.ndarray, D_target: float) -> float:
    """Closed-form θ for D_target < Σ σᵢ²: the k smallest bands sit below the water."""
    ordered = np.sort(variances)
    below = np.concatenate(([0.0], np.cumsum(ordered)))
    n = ordered.size
    for k in range(n):
        theta = (D_target - below[k]) / (n - k)
        if theta <= ordered[k]:
            return float(theta)
    return float(ordered[-1])


def allocate_distortion(variances: Sequence[float], D_target: float) -> RateAllocation:
    """Spread a distortion budget over independent Gaussian bands.

    Args:
        variances: Band variances, at least one positive
        D_target: Total distortion Σ Dᵢ

    Returns:
        RateAllocation at the water level solving Σ min(θ, σᵢ²) = D_target

    Raises:
        ValueError: If ``D_target`` is not positive or every variance is zero

    Example:
        >>> allocation = allocate_distortion([4.0, 1.0], 2.0)
        >>> round(allocation.water_level, 6), round(allocation.total_rate, 4)
        (1.0, 0.6931)
    """
    s = np.asarray(variances, dtype=float)
    if D_target <= 0:
        raise ValueError(f"D_target must be positive, got {D_target}")
    if s.size == 0 or np.any(s < 0) or not np.any(s > 0):
        raise ValueError("Need non-negative variances with at least one positive")

    if D_target >= s.sum():
        theta = float(s.max())
        distortions = s.copy()
    else:
        theta = _water_level(s, D_target)
        distortions = np.minimum(theta, s)

    total = sum(_band_rate(v, d) for v, d in zip(s, distortions))
    return RateAllocation(
        tuple(float(v) for v in s), tuple(float(d) for d in distortions), theta, float(total)
    )


def rate_distortion(variances: Sequence[float], D: float) -> float:
    """Rate R(D) in nats of a set of independent Gaussian bands."""
    return allocate_distortion(variances, D).total_rate

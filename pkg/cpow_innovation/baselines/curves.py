"""Inverse-time overcurrent characteristics ``t = TD · (A / (M^p - 1) + B)``."""

from dataclasses import dataclass
from typing import Dict

from cpow_innovation.errors import ConfigError


@dataclass(frozen=True)
class InverseTimeCurve:
    """Inverse-time constants.

    Attributes:
        A: Inverse term numerator in seconds
        B: Constant term in seconds
        p: Exponent of the current multiple
    """

    A: float = 0.0515
    B: float = 0.114
    p: float = 0.02

    def __post_init__(self) -> None:
        if self.A <= 0 or self.B < 0:
            raise ConfigError(f"Curve constants must be positive, got A={self.A}, B={self.B}")
        if not 0.0 < self.p <= 2.0:
            raise ConfigError(f"Curve exponent must lie in (0, 2], got {self.p}")


# Standard IEEE inverse-time families
CURVES: Dict[str, InverseTimeCurve] = {
    "moderately_inverse": InverseTimeCurve(0.0515, 0.114, 0.02),
    "very_inverse": InverseTimeCurve(19.61, 0.491, 2.0),
    "extremely_inverse": InverseTimeCurve(28.2, 0.1217, 2.0),
}


def get_curve(name: str) -> InverseTimeCurve:
    """Look up a named curve.

    Raises:
        ValueError: If the curve is not in the catalog
    """
    if name not in CURVES:
        available = ", ".join(CURVES.keys())
        raise ValueError(f"Curve {name} not found. Available curves: {available}")
    return CURVES[name]

"""Innovation sequences produced by the encoders."""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from cpow_innovation.innovation.normal import normal_cdf, normal_ppf


class InnovationMode(str, Enum):
    UNIFORM = "uniform"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True, eq=False)
class InnovationSequence:
    """Latent sequence of an innovation autoencoder.

    Attributes:
        values: One innovation per input sample, warm-up positions included
        mode: ``uniform`` (values in [0, 1]) or ``gaussian`` (standardized residuals)
        warmup: Number of leading values computed without a full past
        sample_rate: Rate of the sequence in Hz
        t0: Time of the first value in seconds
    """

    values: np.ndarray
    mode: InnovationMode = InnovationMode.UNIFORM
    warmup: int = 0
    sample_rate: float = 1.0
    t0: float = 0.0

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float).reshape(-1)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "mode", InnovationMode(self.mode))
        if self.warmup < 0 or self.warmup > values.size:
            raise ValueError(f"warmup {self.warmup} outside [0, {values.size}]")
        if self.mode is InnovationMode.UNIFORM and values.size:
            if np.any(~(values >= 0.0)) or np.any(~(values <= 1.0)):
                raise ValueError("Uniform-mode innovations must lie in [0, 1]")

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def valid(self) -> np.ndarray:
        """Innovations past the warm-up."""
        return self.values[self.warmup :]

    def index_at(self, t: float) -> int:
        return int(np.ceil((t - self.t0) * self.sample_rate - 1e-9))

    def to_uniform(self) -> "InnovationSequence":
        if self.mode is InnovationMode.UNIFORM:
            return self
        return InnovationSequence(
            normal_cdf(self.values), InnovationMode.UNIFORM, self.warmup, self.sample_rate, self.t0
        )

    def to_gaussian(self) -> "InnovationSequence":
        if self.mode is InnovationMode.GAUSSIAN:
            return self
        return InnovationSequence(
            normal_ppf(self.values), InnovationMode.GAUSSIAN, self.warmup, self.sample_rate, self.t0
        )

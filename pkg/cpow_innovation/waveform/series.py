"""Uniformly sampled waveform container."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
import pandas as pd


@dataclass(frozen=True, eq=False)
class WaveformSeries:
    """A uniformly sampled real-valued measurement stream.

    Attributes:
        samples: Current samples in amperes
        sample_rate: Sampling rate in Hz
        t0: Time of the first sample in seconds
        metadata: Free-form annotations (not part of the signal)

    Example:
        >>> series = WaveformSeries(np.zeros(10), sample_rate=50000.0)
        >>> len(series), series.duration
        (10, 0.0002)
    """

    samples: np.ndarray
    sample_rate: float
    t0: float = 0.0
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=float).reshape(-1)
        if samples.size < 1:
            raise ValueError("WaveformSeries needs at least one sample")
        if not np.all(np.isfinite(samples)):
            bad = int(np.flatnonzero(~np.isfinite(samples))[0])
            raise ValueError(
                f"WaveformSeries samples must be finite, found {samples[bad]} at index {bad}"
            )
        if not self.sample_rate > 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", float(self.sample_rate))
        object.__setattr__(self, "t0", float(self.t0))

    def __len__(self) -> int:
        return int(self.samples.size)

    @property
    def duration(self) -> float:
        """Span covered by the samples in seconds."""
        return len(self) / self.sample_rate

    def times(self) -> np.ndarray:
        """Sample timestamps in seconds."""
        return self.t0 + np.arange(len(self)) / self.sample_rate

    def index_at(self, t: float) -> int:
        """Index of the first sample at or after time ``t``."""
        return int(np.ceil((t - self.t0) * self.sample_rate - 1e-9))

    def window(self, start: float, stop: Optional[float] = None) -> "WaveformSeries":
        """Sub-series covering ``[start, stop)`` seconds."""
        i0 = max(self.index_at(start), 0)
        i1 = len(self) if stop is None else min(self.index_at(stop), len(self))
        if i1 <= i0:
            raise ValueError(f"Empty window [{start}, {stop}) for series starting at {self.t0}")
        return WaveformSeries(self.samples[i0:i1], self.sample_rate, self.t0 + i0 / self.sample_rate)

    def with_samples(self, samples: np.ndarray) -> "WaveformSeries":
        """Same timing, new samples."""
        return WaveformSeries(samples, self.sample_rate, self.t0, dict(self.metadata))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"time_s": self.times(), "current_a": self.samples})

    def to_csv(self, path: Union[str, Path]) -> Path:
        """Dump as two-column ``time_s,current_a`` CSV with a header line."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(path, index=False, float_format="%.17g")
        return path

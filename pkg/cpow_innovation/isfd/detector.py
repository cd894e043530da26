"""Innovation-based sequential fault detection by doubling search.

Starting at the test instant t*, the detector grows a window of innovations to
``round(2^i · C)`` samples for i = 1..imax and runs the smooth test on the whole
window each time, stopping at the first rejection.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from itertools import islice
from typing import Any, Dict, Iterable, Iterator, List, Optional, Tuple, Union

import numpy as np

from cpow_innovation.errors import ConfigError, TruncatedStreamError
from cpow_innovation.innovation.ar_model import ArInnovationModel, encode
from cpow_innovation.nst.chi_square import chi_square_quantile
from cpow_innovation.nst.legendre import MAX_ORDER
from cpow_innovation.nst.smooth_test import Hypothesis, nst_statistic
from cpow_innovation.waveform.series import WaveformSeries

logger = logging.getLogger(__name__)

TraceEntry = Tuple[int, float, float]


def _round_half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


@dataclass(frozen=True)
class IsfdConfig:
    """Sequential detector settings.

    Attributes:
        K: Legendre kernels of the smooth test
        epsilon: Per-look false-positive rate
        C: Base batch scale (first window is round(2C) samples)
        lambda_sep: Minimum separation bounding the number of looks
        bonferroni: Split epsilon evenly across the looks
        ceiling: Use ceil(log2 lambda_sep) looks instead of floor
    """

    K: int = 4
    epsilon: float = 0.05
    C: float = 42.5
    lambda_sep: float = 20.0
    bonferroni: bool = False
    ceiling: bool = False

    def __post_init__(self) -> None:
        if not 1 <= self.K <= MAX_ORDER:
            raise ConfigError(f"K must be in [1, {MAX_ORDER}], got {self.K}")
        if not 0.0 < self.epsilon < 1.0:
            raise ConfigError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.C <= 0:
            raise ConfigError(f"C must be positive, got {self.C}")
        if self.lambda_sep <= 1 or math.floor(math.log2(self.lambda_sep)) < 1:
            raise ConfigError(f"lambda_sep must be at least 2, got {self.lambda_sep}")

    @property
    def max_iterations(self) -> int:
        exponent = math.log2(self.lambda_sep)
        return int(math.ceil(exponent) if self.ceiling else math.floor(exponent))

    def window_sizes(self) -> Tuple[int, ...]:
        """Cumulative window lengths round(2^i·C), i = 1..imax."""
        return tuple(_round_half_up(2**i * self.C) for i in range(1, self.max_iterations + 1))

    @property
    def threshold(self) -> float:
        level = self.epsilon / self.max_iterations if self.bonferroni else self.epsilon
        return chi_square_quantile(self.K, 1.0 - level)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "K": self.K,
            "epsilon": self.epsilon,
            "C": self.C,
            "lambda_sep": self.lambda_sep,
            "bonferroni": self.bonferroni,
            "ceiling": self.ceiling,
        }


@dataclass(frozen=True)
class IsfdOutcome:
    """Decision of one sequential test.

    Attributes:
        decision: H1 when a window rejected uniformity
        samples_consumed: Window length at the stopping look
        iterations_run: Number of looks performed
        statistic_trace: (N, T, φ) for each look
        sample_rate: Rate of the innovation stream in Hz
    """

    decision: Hypothesis
    samples_consumed: int
    iterations_run: int
    statistic_trace: List[TraceEntry] = field(default_factory=list)
    sample_rate: float = 1.0

    @property
    def delay_seconds(self) -> Optional[float]:
        if self.decision is not Hypothesis.H1:
            return None
        return self.samples_consumed / self.sample_rate

    @property
    def statistic(self) -> float:
        """Statistic of the last look."""
        return self.statistic_trace[-1][1] if self.statistic_trace else 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "decision": self.decision.value,
            "samples_consumed": self.samples_consumed,
            "iterations_run": self.iterations_run,
            "delay_seconds": self.delay_seconds,
            "trace": [list(entry) for entry in self.statistic_trace],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _pull(source: Iterator[float], count: int) -> np.ndarray:
    return np.fromiter(islice(source, count), dtype=float)


def isfd_detect(
    source: Union[Iterable[float], np.ndarray],
    sample_rate: float,
    config: IsfdConfig = IsfdConfig(),
) -> IsfdOutcome:
    """Run the doubling-search smooth test on an innovation stream.

    Args:
        source: Innovations in [0, 1] starting at the test instant; pulled lazily
        sample_rate: Rate of the stream in Hz
        config: Detector settings

    Returns:
        Outcome with the decision, window at stopping and per-look trace

    Raises:
        TruncatedStreamError: If the stream ends before the last window without a rejection

    Example:
        >>> outcome = isfd_detect(np.full(680, 0.999), 50000.0)
        >>> outcome.samples_consumed, outcome.delay_seconds
        (85, 0.0017)
    """
    if sample_rate <= 0:
        raise ValueError(f"sample_rate must be positive, got {sample_rate}")
    iterator = iter(source)
    phi = config.threshold
    window = np.empty(0)
    trace: List[TraceEntry] = []

    for iteration, size in enumerate(config.window_sizes(), start=1):
        window = np.concatenate((window, _pull(iterator, size - window.size)))
        if window.size < size:
            raise TruncatedStreamError(int(window.size), size, trace)
        statistic, _ = nst_statistic(window, config.K)
        trace.append((size, statistic, phi))
        if statistic > phi:
            return IsfdOutcome(Hypothesis.H1, size, iteration, trace, sample_rate)
    return IsfdOutcome(Hypothesis.H0, int(window.size), len(trace), trace, sample_rate)


def window_statistics(values: np.ndarray, config: IsfdConfig = IsfdConfig()) -> np.ndarray:
    """Smooth-test statistic of every look without early stopping.

    The sequential test rejects at level epsilon exactly when the largest entry exceeds
    ``config.threshold``, so one pass serves a whole grid of epsilon values.

    Raises:
        TruncatedStreamError: If ``values`` is shorter than the last window
    """
    values = np.asarray(values, dtype=float)
    sizes = config.window_sizes()
    if values.size < sizes[-1]:
        raise TruncatedStreamError(int(values.size), sizes[-1], [])
    return np.array([nst_statistic(values[:size], config.K)[0] for size in sizes])


def run_isfd_on_waveform(
    model: ArInnovationModel,
    x: WaveformSeries,
    t_start: float,
    config: IsfdConfig = IsfdConfig(),
    sample_rate: Optional[float] = None,
) -> IsfdOutcome:
    """Encode a waveform causally and test its innovations from ``t_start`` on.

    Args:
        model: Analytic innovation model of normal operation
        x: Waveform; encoding starts at its first sample
        t_start: Test instant in seconds
        config: Detector settings
        sample_rate: Rate of the innovation stream (defaults to the model domain rate)

    Raises:
        ValueError: If ``t_start`` falls outside the series or inside the model warm-up
    """
    v = encode(model, x)
    start = v.index_at(t_start)
    if start < v.warmup or start >= len(v):
        raise ValueError(
            f"t_start {t_start} s must lie after the {v.warmup}-sample warm-up and within the series"
        )
    rate = v.sample_rate if sample_rate is None else sample_rate
    return isfd_detect(v.values[start:], rate, config)


def isfd_state_flags(
    model: ArInnovationModel, x: WaveformSeries, config: IsfdConfig = IsfdConfig()
) -> List[bool]:
    """Per-block fault flags for local analytics (True = fault).

    The innovations after the model warm-up are cut into consecutive blocks of the
    largest window; each block is tested on its own. A trailing partial block is dropped.

    Raises:
        ValueError: If not even one full block follows the warm-up
    """
    v = encode(model, x)
    values = v.valid
    size = config.window_sizes()[-1]
    n_blocks = values.size // size
    if n_blocks == 0:
        raise ValueError(
            f"State flags need at least {size} innovations after warm-up, got {values.size}"
        )
    flags = [
        isfd_detect(values[i * size : (i + 1) * size], v.sample_rate, config).decision
        is Hypothesis.H1
        for i in range(n_blocks)
    ]
    logger.debug("State flags: %d of %d blocks flagged", sum(flags), n_blocks)
    return flags

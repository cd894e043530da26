"""Conventional and adaptive overcurrent relays.

Both relays compare the rectified maximum of each decision block with a pickup
current. While the ratio M exceeds 1 an integrating timer advances by
``block_duration / t(M)``; the relay trips when the timer reaches one, and the timer
resets on any block with M ≤ 1. For a constant M this trips ``t(M)`` after the first
block above pickup.
"""

from dataclasses import asdict, dataclass, field, fields
from typing import Any, Dict, Mapping, Optional, Tuple, Union

import numpy as np

from cpow_innovation.baselines.curves import InverseTimeCurve, get_curve
from cpow_innovation.baselines.outcome import DetectionOutcome
from cpow_innovation.config.toml_io import check_keys
from cpow_innovation.errors import ConfigError
from cpow_innovation.nst.smooth_test import Hypothesis
from cpow_innovation.waveform.series import WaveformSeries

DEFAULT_TIME_DIAL = 0.02
DEFAULT_BLOCK_LEN = 833  # one 60 Hz cycle at 50 kHz

Window = Tuple[float, float]


def _curve_from(value: Any) -> InverseTimeCurve:
    if isinstance(value, InverseTimeCurve):
        return value
    if isinstance(value, str):
        try:
            return get_curve(value)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    if isinstance(value, Mapping):
        return InverseTimeCurve(**value)
    raise ConfigError(f"Cannot interpret curve {value!r}")


def _check_common(time_dial: float, block_len: int) -> None:
    if time_dial <= 0:
        raise ConfigError(f"time_dial must be positive, got {time_dial}")
    if block_len < 2:
        raise ConfigError(f"block_len must be at least 2, got {block_len}")


class _TableMixin:
    """TOML table conversion shared by the relay configs."""

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]):
        check_keys(data, [f.name for f in fields(cls)], cls.__name__)
        options = dict(data)
        if "curve" in options:
            options["curve"] = _curve_from(options["curve"])
        return cls(**options)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class OvercurrentConfig(_TableMixin):
    """Fixed-pickup relay.

    Attributes:
        pickup_current: Pickup in amperes
        time_dial: Time dial (TD)
        curve: Inverse-time constants
        block_len: Samples per decision block
    """

    pickup_current: float
    time_dial: float = DEFAULT_TIME_DIAL
    curve: InverseTimeCurve = field(default_factory=InverseTimeCurve)
    block_len: int = DEFAULT_BLOCK_LEN

    def __post_init__(self) -> None:
        object.__setattr__(self, "curve", _curve_from(self.curve))
        if self.pickup_current <= 0:
            raise ConfigError(f"pickup_current must be positive, got {self.pickup_current}")
        _check_common(self.time_dial, self.block_len)


@dataclass(frozen=True)
class AocrConfig(_TableMixin):
    """Adaptive relay with pickup ``alpha · trailing mean block max + beta · i_fault_min``.

    Attributes:
        alpha: Weight on the trailing moving average
        beta: Weight on the zone's minimum fault current
        avg_window: Trailing average span in seconds
        i_fault_min: Minimum fault current in the zone (amperes)
        time_dial: Time dial (TD)
        curve: Inverse-time constants
        block_len: Samples per decision block
    """

    alpha: float = 1.0
    beta: float = 0.0
    avg_window: float = 10.0
    i_fault_min: float = 1.0
    time_dial: float = DEFAULT_TIME_DIAL
    curve: InverseTimeCurve = field(default_factory=InverseTimeCurve)
    block_len: int = DEFAULT_BLOCK_LEN

    def __post_init__(self) -> None:
        object.__setattr__(self, "curve", _curve_from(self.curve))
        if self.alpha < 0 or self.beta < 0 or self.alpha + self.beta <= 0:
            raise ConfigError(
                f"Need alpha, beta >= 0 with alpha + beta > 0, got {self.alpha}, {self.beta}"
            )
        if self.avg_window <= 0:
            raise ConfigError(f"avg_window must be positive, got {self.avg_window}")
        if self.i_fault_min <= 0:
            raise ConfigError(f"i_fault_min must be positive, got {self.i_fault_min}")
        _check_common(self.time_dial, self.block_len)


RelayConfig = Union[OvercurrentConfig, AocrConfig]


def rectified_block_max(x: WaveformSeries, block_len: int) -> Tuple[np.ndarray, np.ndarray]:
    """Maximum |current| of consecutive non-overlapping blocks.

    Returns:
        Tuple of (block indices, block maxima); a trailing partial block is dropped
    """
    if block_len < 2:
        raise ValueError(f"block_len must be at least 2, got {block_len}")
    count = len(x) // block_len
    maxima = np.abs(x.samples[: count * block_len]).reshape(count, block_len).max(axis=1)
    return np.arange(count), maxima


def inverse_time_delay(M: float, cfg: RelayConfig) -> Optional[float]:
    """Operating time for a current multiple ``M``; None when ``M ≤ 1`` (no trip).

    Example:
        >>> round(inverse_time_delay(2.0, OvercurrentConfig(100.0, time_dial=1.0)), 2)
        3.8
    """
    if not M > 0:
        raise ValueError(f"Current multiple must be positive, got {M}")
    if M <= 1.0:
        return None
    curve = cfg.curve
    return cfg.time_dial * (curve.A / (M**curve.p - 1.0) + curve.B)


def _window_blocks(x: WaveformSeries, block_len: int, window: Window) -> Tuple[int, int]:
    start, stop = window
    if stop <= start:
        raise ValueError(f"Empty observation window {window}")
    first = max(0, int(np.ceil(x.index_at(start) / block_len)))
    last = min(len(x) // block_len, int(np.ceil(x.index_at(stop) / block_len)))
    if first >= last:
        raise ValueError(f"Observation window {window} holds no complete block")
    return first, last


def window_block_maxima(
    x: WaveformSeries, fault_window: Window, block_len: int
) -> Tuple[np.ndarray, np.ndarray, float]:
    """Start times and maxima of the decision blocks inside an observation window.

    Returns:
        Tuple of (block start times, block maxima, block duration in seconds)
    """
    _, maxima = rectified_block_max(x, block_len)
    first, last = _window_blocks(x, block_len, fault_window)
    block_duration = block_len / x.sample_rate
    starts = x.t0 + np.arange(first, last) * block_duration
    return starts, maxima[first:last], block_duration


def integrate_trip(
    starts: np.ndarray,
    ratios: np.ndarray,
    block_duration: float,
    cfg: RelayConfig,
) -> Optional[float]:
    progress = 0.0
    for start, ratio in zip(starts, ratios):
        operate = inverse_time_delay(ratio, cfg) if ratio > 0 else None
        if operate is None:
            progress = 0.0
            continue
        step = block_duration / operate
        if progress + step >= 1.0:
            return float(start + (1.0 - progress) * operate)
        progress += step
    return None


def trip_outcome(
    trip: Optional[float],
    window: Window,
    statistic: float,
    method: str,
) -> DetectionOutcome:
    if trip is not None and trip < window[1]:
        return DetectionOutcome(Hypothesis.H1, trip, trip - window[0], statistic, method)
    return DetectionOutcome(Hypothesis.H0, None, None, statistic, method)


def _check_rate(x: WaveformSeries, sample_rate: Optional[float]) -> None:
    if sample_rate is not None and not np.isclose(sample_rate, x.sample_rate):
        raise ValueError(f"sample_rate {sample_rate} disagrees with the series rate {x.sample_rate}")


def conventional_detect(
    x: WaveformSeries,
    fault_window: Window,
    cfg: OvercurrentConfig,
    sample_rate: Optional[float] = None,
) -> DetectionOutcome:
    """Fixed-pickup inverse-time relay over an observation window.

    Args:
        x: Relay current
        fault_window: (onset, end) of the observation window in seconds
        cfg: Relay settings
        sample_rate: Optional cross-check of the series rate

    Returns:
        Outcome; ``statistic`` is the largest block multiple M in the window
    """
    _check_rate(x, sample_rate)
    starts, maxima, block_duration = window_block_maxima(x, fault_window, cfg.block_len)
    ratios = maxima / cfg.pickup_current
    trip = integrate_trip(starts, ratios, block_duration, cfg)
    return trip_outcome(trip, fault_window, float(ratios.max()), "conventional")


def trailing_block_mean(
    x: WaveformSeries, fault_window: Window, block_len: int, avg_window: float
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    """Window blocks with the mean block maximum of the preceding ``avg_window`` seconds.

    The current block is excluded from its own average.

    Returns:
        Tuple of (block start times, block maxima, trailing means, block duration)

    Raises:
        ValueError: If less than ``avg_window`` seconds precede the window
    """
    _, maxima = rectified_block_max(x, block_len)
    first, last = _window_blocks(x, block_len, fault_window)
    block_duration = block_len / x.sample_rate
    history = max(1, int(round(avg_window / block_duration)))
    if first < history:
        raise ValueError(
            f"AOCR needs {avg_window} s of history before {fault_window[0]} s; "
            f"only {first * block_duration:.3f} s available"
        )
    cumulative = np.concatenate(([0.0], np.cumsum(maxima)))
    index = np.arange(first, last)
    trailing = (cumulative[index] - cumulative[index - history]) / history
    starts = x.t0 + index * block_duration
    return starts, maxima[first:last], trailing, block_duration


def aocr_trip(
    starts: np.ndarray,
    maxima: np.ndarray,
    trailing: np.ndarray,
    block_duration: float,
    cfg: AocrConfig,
) -> Tuple[Optional[float], float]:
    """Trip instant and peak margin for precomputed block statistics."""
    pickup = cfg.alpha * trailing + cfg.beta * cfg.i_fault_min
    ratios = np.divide(maxima, pickup, out=np.full(maxima.shape, np.inf), where=pickup > 0)
    trip = integrate_trip(starts, ratios, block_duration, cfg)
    return trip, float(np.max(maxima - pickup))


def aocr_detect(
    x: WaveformSeries,
    fault_window: Window,
    cfg: AocrConfig,
    sample_rate: Optional[float] = None,
) -> DetectionOutcome:
    """Adaptive overcurrent relay over an observation window.

    The pickup of each block is ``alpha`` times the mean block maximum over the preceding
    ``avg_window`` seconds plus ``beta · i_fault_min``. ``statistic`` is the largest margin
    ``block max - pickup``; a positive margin drives the inverse-time timer.

    Raises:
        ValueError: If the series holds less than ``avg_window`` seconds before the window
    """
    _check_rate(x, sample_rate)
    starts, maxima, trailing, block_duration = trailing_block_mean(
        x, fault_window, cfg.block_len, cfg.avg_window
    )
    trip, margin = aocr_trip(starts, maxima, trailing, block_duration, cfg)
    return trip_outcome(trip, fault_window, margin, "aocr")

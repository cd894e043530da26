"""False-positive-rate calibration of the relays on no-fault runs.

Each run is first reduced to the statistics the calibrated parameter acts on (block
maxima, trailing means or the peak smooth-test statistic), so a grid costs one pass
over the waveforms. Workers may hand in those reductions directly.
"""

import json
import logging
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from cpow_innovation.baselines.overcurrent import (
    AocrConfig,
    OvercurrentConfig,
    Window,
    aocr_trip,
    integrate_trip,
    trailing_block_mean,
    window_block_maxima,
)
from cpow_innovation.errors import CalibrationInfeasibleError, ConfigError
from cpow_innovation.innovation.ar_model import ArInnovationModel, encode
from cpow_innovation.isfd.detector import IsfdConfig, window_statistics
from cpow_innovation.waveform.series import WaveformSeries

logger = logging.getLogger(__name__)

MIN_CALIBRATION_RUNS = 100

METHODS = ("conventional", "aocr", "isfd")

# calibrated parameter of each method
PARAMETERS = {"conventional": "pickup_current", "aocr": "alpha", "isfd": "epsilon"}

CalibratedConfig = Union[OvercurrentConfig, AocrConfig, IsfdConfig]


@dataclass(frozen=True)
class RunFeatures:
    """Reduction of one no-fault run for a calibration grid.

    Attributes:
        starts: Start times of the window blocks (relays)
        maxima: Block maxima inside the window (relays)
        block_duration: Block length in seconds (relays)
        trailing: Trailing mean block maxima (AOCR)
        peak_statistic: Largest smooth-test statistic over the looks (ISFD)
    """

    starts: Optional[np.ndarray] = None
    maxima: Optional[np.ndarray] = None
    block_duration: float = 0.0
    trailing: Optional[np.ndarray] = None
    peak_statistic: Optional[float] = None


@dataclass(frozen=True)
class CalibrationResult:
    """Chosen grid point and the false-positive rate of every point tried.

    Attributes:
        method: Relay family
        config: Calibrated settings
        achieved_fpr: Empirical FPR of ``config`` on the calibration runs
        grid_fprs: (grid value, FPR) pairs in ascending grid order
    """

    method: str
    config: CalibratedConfig
    achieved_fpr: float
    grid_fprs: List[Tuple[float, float]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "method": self.method,
            "config": self.config.to_dict(),
            "achieved_fpr": self.achieved_fpr,
            "grid": [[value, fpr] for value, fpr in self.grid_fprs],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def default_base(method: str, grid_start: float = 1.0) -> CalibratedConfig:
    if method == "conventional":
        return OvercurrentConfig(pickup_current=grid_start)
    if method == "aocr":
        return AocrConfig()
    return IsfdConfig()


def run_features(
    method: str,
    x: WaveformSeries,
    fault_window: Window,
    base: CalibratedConfig,
    model: Optional[ArInnovationModel] = None,
) -> RunFeatures:
    """Reduce a no-fault waveform to what calibrating ``method`` needs.

    Raises:
        ValueError: If ISFD features are requested without a model or the window starts
            inside the model warm-up
    """
    if method == "conventional":
        starts, maxima, duration = window_block_maxima(x, fault_window, base.block_len)
        return RunFeatures(starts, maxima, duration)
    if method == "aocr":
        starts, maxima, trailing, duration = trailing_block_mean(
            x, fault_window, base.block_len, base.avg_window
        )
        return RunFeatures(starts, maxima, duration, trailing)
    if model is None:
        raise ValueError("isfd calibration needs the relay's innovation model")
    v = encode(model, x)
    start = v.index_at(fault_window[0])
    if start < v.warmup:
        raise ValueError(f"Window start {fault_window[0]} s falls inside the model warm-up")
    return RunFeatures(peak_statistic=float(window_statistics(v.values[start:], base).max()))


def _trip_rates(
    method: str,
    features: Sequence[RunFeatures],
    grid: np.ndarray,
    window: Window,
    base: CalibratedConfig,
) -> np.ndarray:
    if method == "isfd":
        peaks = np.array([f.peak_statistic for f in features], dtype=float)
        thresholds = np.array([replace(base, epsilon=float(eps)).threshold for eps in grid])
        return (peaks[:, None] > thresholds[None, :]).mean(axis=0)

    trips = np.zeros(grid.size)
    for f in features:
        for j, value in enumerate(grid):
            if method == "conventional":
                trip = integrate_trip(f.starts, f.maxima / value, f.block_duration, base)
            else:
                config = replace(base, alpha=float(value))
                trip, _ = aocr_trip(f.starts, f.maxima, f.trailing, f.block_duration, config)
            trips[j] += trip is not None and trip < window[1]
    return trips / len(features)


def calibrate(
    method: str,
    no_fault_runs: Sequence[Union[WaveformSeries, RunFeatures]],
    target_fpr: float,
    grid: Sequence[float],
    fault_window: Window,
    base_config: Optional[CalibratedConfig] = None,
    model: Optional[ArInnovationModel] = None,
) -> CalibrationResult:
    """Pick the most sensitive grid point whose empirical FPR stays within target.

    ``conventional`` searches pickup currents and returns the smallest feasible one,
    ``aocr`` searches ``alpha`` (``beta`` comes from ``base_config``) and returns the
    smallest feasible one, ``isfd`` searches ``epsilon`` and returns the largest feasible one.

    Args:
        method: One of ``conventional``, ``aocr``, ``isfd``
        no_fault_runs: At least 100 no-fault waveforms, or their :func:`run_features`
        target_fpr: Allowed false-positive rate in (0, 1]
        grid: Candidate values of the calibrated parameter
        fault_window: Observation window evaluated on every run
        base_config: Settings for everything except the calibrated parameter
        model: Innovation model of the relay; required for ``isfd`` waveforms

    Returns:
        CalibrationResult with the chosen config

    Raises:
        CalibrationInfeasibleError: If no grid point meets the target
        ValueError: On an unknown method, too few runs or an empty grid
    """
    if method not in METHODS:
        raise ValueError(f"Method {method} not found. Available methods: {', '.join(METHODS)}")
    if len(no_fault_runs) < MIN_CALIBRATION_RUNS:
        raise ValueError(
            f"Calibration needs at least {MIN_CALIBRATION_RUNS} runs, got {len(no_fault_runs)}"
        )
    if not 0.0 < target_fpr <= 1.0:
        raise ValueError(f"target_fpr must lie in (0, 1], got {target_fpr}")
    values = np.unique(np.asarray(grid, dtype=float))
    if values.size == 0:
        raise ValueError("Calibration grid is empty")

    base = base_config or default_base(method, float(values[0]))
    expected = {"conventional": OvercurrentConfig, "aocr": AocrConfig, "isfd": IsfdConfig}[method]
    if not isinstance(base, expected):
        raise ConfigError(f"{method} calibration needs a {expected.__name__}, got {type(base).__name__}")

    features = [
        run if isinstance(run, RunFeatures) else run_features(method, run, fault_window, base, model)
        for run in no_fault_runs
    ]
    fprs = _trip_rates(method, features, values, fault_window, base)
    grid_fprs = [(float(v), float(f)) for v, f in zip(values, fprs)]
    for value, fpr in grid_fprs:
        logger.debug("%s grid point %g: FPR %.4f", method, value, fpr)

    # isfd prefers the largest epsilon, the relays the smallest setting
    order = range(values.size - 1, -1, -1) if method == "isfd" else range(values.size)
    feasible = [i for i in order if fprs[i] <= target_fpr]
    if not feasible:
        best = int(np.argmin(fprs))
        raise CalibrationInfeasibleError(target_fpr, float(fprs[best]), float(values[best]))
    chosen = feasible[0]
    parameter = PARAMETERS[method]
    config = replace(base, **{parameter: float(values[chosen])})
    logger.info(
        "Calibrated %s: %s=%g with FPR %.4f on %d runs",
        method,
        parameter,
        values[chosen],
        fprs[chosen],
        len(features),
    )
    return CalibrationResult(method, config, float(fprs[chosen]), grid_fprs)

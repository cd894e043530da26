"""Comparison relays: fixed-pickup and adaptive overcurrent, plus FPR calibration."""

from cpow_innovation.baselines.calibration import (
    METHODS,
    CalibrationResult,
    RunFeatures,
    calibrate,
    run_features,
)
from cpow_innovation.baselines.curves import CURVES, InverseTimeCurve, get_curve
from cpow_innovation.baselines.outcome import DetectionOutcome
from cpow_innovation.baselines.overcurrent import (
    AocrConfig,
    OvercurrentConfig,
    aocr_detect,
    conventional_detect,
    inverse_time_delay,
    rectified_block_max,
    trailing_block_mean,
    window_block_maxima,
)

__all__ = [
    "AocrConfig",
    "CURVES",
    "CalibrationResult",
    "DetectionOutcome",
    "InverseTimeCurve",
    "METHODS",
    "OvercurrentConfig",
    "RunFeatures",
    "aocr_detect",
    "calibrate",
    "conventional_detect",
    "get_curve",
    "inverse_time_delay",
    "rectified_block_max",
    "run_features",
    "trailing_block_mean",
    "window_block_maxima",
]

"""cpow-innovation - Innovation-based fault detection and compression of point-on-wave data."""

__version__ = "0.1.0"

from cpow_innovation.compression import compress_pipeline, decompress_pipeline
from cpow_innovation.errors import (
    CalibrationInfeasibleError,
    ConfigError,
    CpowError,
    DegenerateInputError,
    ExperimentError,
    ModelError,
    ParseError,
    TrainingDivergedError,
    TruncatedStreamError,
)
from cpow_innovation.innovation import (
    ArInnovationModel,
    InnovationSequence,
    decode,
    encode,
    estimate_ar_model,
    train_autoencoder,
)
from cpow_innovation.isfd import IsfdConfig, IsfdOutcome, isfd_detect
from cpow_innovation.waveform import FeederScenario, WaveformSeries, simulate_scenario

__all__ = [
    "ArInnovationModel",
    "CalibrationInfeasibleError",
    "ConfigError",
    "CpowError",
    "DegenerateInputError",
    "ExperimentError",
    "FeederScenario",
    "InnovationSequence",
    "IsfdConfig",
    "IsfdOutcome",
    "ModelError",
    "ParseError",
    "TrainingDivergedError",
    "TruncatedStreamError",
    "WaveformSeries",
    "compress_pipeline",
    "decompress_pipeline",
    "decode",
    "encode",
    "estimate_ar_model",
    "isfd_detect",
    "simulate_scenario",
    "train_autoencoder",
]

"""Typed experiment settings read from the TOML dialect.

Every table maps to a dataclass with ``from_dict`` / ``to_dict``; missing keys take the
defaults below and unknown keys raise :class:`~cpow_innovation.errors.ConfigError`.
"""

from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Union

import numpy as np

from cpow_innovation.baselines.calibration import METHODS
from cpow_innovation.baselines.overcurrent import (
    DEFAULT_BLOCK_LEN,
    DEFAULT_TIME_DIAL,
    AocrConfig,
    OvercurrentConfig,
)
from cpow_innovation.config.toml_io import check_keys, dump_toml, load_toml
from cpow_innovation.errors import ConfigError
from cpow_innovation.innovation.neural.training import NeuralHyper
from cpow_innovation.isfd.detector import IsfdConfig


def _grid(start: float, stop: float, step: float) -> Tuple[float, ...]:
    count = int(round((stop - start) / step)) + 1
    return tuple(float(v) for v in np.round(start + step * np.arange(count), 6))


def _table(cls, data: Optional[Mapping[str, Any]], name: str):
    data = dict(data or {})
    check_keys(data, [f.name for f in fields(cls)], name)
    for f in fields(cls):
        if f.name in data and isinstance(data[f.name], list):
            data[f.name] = tuple(data[f.name])
    try:
        return cls(**data)
    except TypeError as exc:
        raise ConfigError(f"Invalid [{name}] table: {exc}") from exc


@dataclass(frozen=True)
class ExperimentSettings:
    """The ``[experiment]`` table."""

    scenario: str = "F2"
    methods: Tuple[str, ...] = METHODS
    n_runs: int = 1000
    n_calibration_runs: int = 200
    target_fpr: float = 0.05
    master_seed: int = 0
    output_dir: str = "results"
    observation_window: float = 1.0
    workers: int = 1
    histogram_bins: int = 20
    max_abort_fraction: float = 0.01

    def __post_init__(self) -> None:
        unknown = sorted(set(self.methods) - set(METHODS))
        if unknown:
            available = ", ".join(METHODS)
            raise ConfigError(f"Unknown method(s) {', '.join(unknown)}. Available methods: {available}")
        if self.n_runs < 1:
            raise ConfigError(f"n_runs must be at least 1, got {self.n_runs}")
        if not 0.0 < self.target_fpr < 1.0:
            raise ConfigError(f"target_fpr must lie in (0, 1), got {self.target_fpr}")
        if self.master_seed < 0:
            raise ConfigError(f"master_seed must be non-negative, got {self.master_seed}")
        if self.observation_window <= 0:
            raise ConfigError(f"observation_window must be positive, got {self.observation_window}")
        if self.workers < 1 or self.histogram_bins < 1:
            raise ConfigError("workers and histogram_bins must be at least 1")


@dataclass(frozen=True)
class InnovationSettings:
    """The ``[innovation]`` table: per-relay analytic models."""

    order: int = 32
    training_duration: float = 2.0
    envelope_mode: bool = False
    notch: bool = True

    def __post_init__(self) -> None:
        if self.order < 1:
            raise ConfigError(f"order must be at least 1, got {self.order}")
        if self.training_duration <= 0:
            raise ConfigError(f"training_duration must be positive, got {self.training_duration}")


@dataclass(frozen=True)
class IsfdSettings:
    """The ``[isfd]`` table: detector fields plus the calibration grid."""

    K: int = 4
    epsilon: float = 0.05
    C: float = 42.5
    lambda_sep: float = 20.0
    bonferroni: bool = False
    ceiling: bool = False
    calibrate: bool = True
    epsilon_grid: Tuple[float, ...] = (0.001, 0.002, 0.005, 0.01, 0.015, 0.02, 0.03, 0.04, 0.05)

    def __post_init__(self) -> None:
        self.to_config()

    def to_config(self, epsilon: Optional[float] = None) -> IsfdConfig:
        return IsfdConfig(
            self.K,
            self.epsilon if epsilon is None else epsilon,
            self.C,
            self.lambda_sep,
            self.bonferroni,
            self.ceiling,
        )


@dataclass(frozen=True)
class ConventionalSettings:
    """The ``[conventional]`` table.

    ``pickup_factor`` and ``pickup_grid`` are multiples of the relay's nominal pre-fault
    envelope. ``block_len`` defaults to one fundamental cycle of the scenario.
    """

    pickup_factor: float = 1.5
    time_dial: float = DEFAULT_TIME_DIAL
    curve: Any = "moderately_inverse"
    block_len: Optional[int] = None
    calibrate: bool = True
    pickup_grid: Tuple[float, ...] = field(default_factory=lambda: _grid(1.0, 2.0, 0.01))

    def __post_init__(self) -> None:
        self.to_config(1.0, DEFAULT_BLOCK_LEN)

    def to_config(self, pickup_current: float, block_len: int) -> OvercurrentConfig:
        return OvercurrentConfig.from_dict(
            {
                "pickup_current": pickup_current,
                "time_dial": self.time_dial,
                "curve": self.curve,
                "block_len": self.block_len or block_len,
            }
        )


@dataclass(frozen=True)
class AocrSettings:
    """The ``[aocr]`` table.

    ``i_fault_min`` overrides the catalog's zone minimum per relay.
    """

    alpha: float = 1.0
    beta: float = 0.0
    avg_window: float = 10.0
    time_dial: float = DEFAULT_TIME_DIAL
    curve: Any = "moderately_inverse"
    block_len: Optional[int] = None
    calibrate: bool = True
    alpha_grid: Tuple[float, ...] = field(default_factory=lambda: _grid(1.0, 2.0, 0.005))
    i_fault_min: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.to_config(1.0, DEFAULT_BLOCK_LEN)

    def to_config(
        self, i_fault_min: float, block_len: int, alpha: Optional[float] = None
    ) -> AocrConfig:
        return AocrConfig.from_dict(
            {
                "alpha": self.alpha if alpha is None else alpha,
                "beta": self.beta,
                "avg_window": self.avg_window,
                "i_fault_min": i_fault_min,
                "time_dial": self.time_dial,
                "curve": self.curve,
                "block_len": self.block_len or block_len,
            }
        )


@dataclass(frozen=True)
class CompressionSettings:
    """The ``[compression]`` table."""

    relay: str = "R3"
    m: int = 3
    W: float = 2.0
    filter_taps: int = 255
    decimation: Optional[int] = None
    band_order: int = 2
    distortion_fraction: float = 0.01
    suppress_when_normal: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.distortion_fraction <= 0:
            raise ConfigError(f"distortion_fraction must be positive, got {self.distortion_fraction}")
        if self.band_order < 0:
            raise ConfigError(f"band_order must be non-negative, got {self.band_order}")


_TABLES = {
    "experiment": ExperimentSettings,
    "innovation": InnovationSettings,
    "isfd": IsfdSettings,
    "conventional": ConventionalSettings,
    "aocr": AocrSettings,
    "compression": CompressionSettings,
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Complete experiment configuration.

    Example:
        >>> config = ExperimentConfig.from_dict({"experiment": {"n_runs": 10}})
        >>> config.experiment.n_runs, config.isfd.C
        (10, 42.5)
    """

    experiment: ExperimentSettings = field(default_factory=ExperimentSettings)
    innovation: InnovationSettings = field(default_factory=InnovationSettings)
    isfd: IsfdSettings = field(default_factory=IsfdSettings)
    conventional: ConventionalSettings = field(default_factory=ConventionalSettings)
    aocr: AocrSettings = field(default_factory=AocrSettings)
    neural: NeuralHyper = field(default_factory=NeuralHyper)
    compression: CompressionSettings = field(default_factory=CompressionSettings)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ExperimentConfig":
        check_keys(data, list(_TABLES) + ["neural"], "config")
        tables = {name: _table(kind, data.get(name), name) for name, kind in _TABLES.items()}
        return cls(neural=NeuralHyper.from_dict(data.get("neural") or {}), **tables)

    def to_dict(self) -> Dict[str, Any]:
        data = {name: asdict(getattr(self, name)) for name in _TABLES}
        data["neural"] = self.neural.to_dict()
        data["aocr"]["i_fault_min"] = dict(self.aocr.i_fault_min)
        return data

    @classmethod
    def from_toml(cls, path: Union[str, Path]) -> "ExperimentConfig":
        return cls.from_dict(load_toml(path))

    def to_toml(self, path: Union[str, Path]) -> Path:
        return dump_toml(self.to_dict(), path)

    def with_overrides(
        self,
        seed: Optional[int] = None,
        runs: Optional[int] = None,
        out: Optional[str] = None,
    ) -> "ExperimentConfig":
        """Apply command-line overrides on top of the file values."""
        changes: Dict[str, Any] = {}
        if seed is not None:
            changes["master_seed"] = seed
        if runs is not None:
            changes["n_runs"] = runs
        if out is not None:
            changes["output_dir"] = str(out)
        if not changes:
            return self
        return replace(self, experiment=replace(self.experiment, **changes))

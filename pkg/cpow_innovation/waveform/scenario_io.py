"""Scenario files in the TOML dialect.

Layout::

    [scenario]
    name = "F2"
    duration = 11.5
    sample_rate = 50000.0
    fundamental_freq = 60.0
    seed = 0
    onset = 10.5          # default onset for fault tables that omit it

    [sdg]
    kind = "ar_gaussian"
    ar_coeffs = [0.98]
    noise_std = 3.98
    mean_power = 25.0

    [relays.R5]
    role = "blinded_primary"
    base_envelope = 40.0
    sdg_coupling = 2.0

    [relays.R5.fault]
    envelope_multiplier = 3.4
    harmonic_injection = { 3 = 16.2 }
"""

import logging
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

from cpow_innovation.config.toml_io import check_keys, dump_toml, load_toml
from cpow_innovation.errors import ConfigError
from cpow_innovation.ingest.csv_reader import read_waveform_csv
from cpow_innovation.waveform.feeder import FaultSpec, FeederScenario, RelaySpec
from cpow_innovation.waveform.sdg import SdgKind, SdgProcess

logger = logging.getLogger(__name__)

SCENARIO_KEYS = ("name", "duration", "sample_rate", "fundamental_freq", "seed", "onset")
SDG_KEYS = (
    "kind",
    "ar_coeffs",
    "noise_std",
    "mean_power",
    "block_len",
    "rate",
    "floor",
    "harmonic_onoff",
    "harmonic_dwell",
    "source_csv",
    "time_col",
    "value_col",
)
RELAY_KEYS = ("role", "base_envelope", "sdg_coupling", "noise_fraction", "fault")
FAULT_KEYS = ("onset", "envelope_multiplier", "transient_tau", "harmonic_injection", "arc_noise")


def _harmonics(table: Mapping[str, Any], where: str) -> Dict[int, float]:
    try:
        return {int(k): float(v) for k, v in table.items()}
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"Harmonic table in [{where}] must map integer indices to amplitudes") from exc


def _sdg_from_dict(table: Mapping[str, Any], base_dir: Optional[Path]) -> SdgProcess:
    check_keys(table, SDG_KEYS, "sdg")
    options = {k: v for k, v in table.items() if k not in ("source_csv", "time_col", "value_col")}
    if "harmonic_onoff" in options:
        options["harmonic_onoff"] = _harmonics(options["harmonic_onoff"], "sdg")
    if "ar_coeffs" in options:
        options["ar_coeffs"] = tuple(options["ar_coeffs"])
    if "source_csv" in table:
        source = Path(table["source_csv"])
        if base_dir is not None and not source.is_absolute():
            source = base_dir / source
        dataset = read_waveform_csv(
            source, table.get("time_col", "time_s"), table.get("value_col", "current_a")
        )
        options["bootstrap_source"] = dataset.series
        options.setdefault("kind", SdgKind.BOOTSTRAP.value)
    try:
        return SdgProcess(**options)
    except ValueError as exc:
        raise ConfigError(f"Invalid [sdg] table: {exc}") from exc


def _relay_from_dict(name: str, table: Mapping[str, Any], default_onset: Optional[float]) -> RelaySpec:
    check_keys(table, RELAY_KEYS, f"relays.{name}")
    options = {k: v for k, v in table.items() if k != "fault"}
    fault = None
    if "fault" in table:
        fault_table = dict(table["fault"])
        check_keys(fault_table, FAULT_KEYS, f"relays.{name}.fault")
        if "onset" not in fault_table:
            if default_onset is None:
                raise ConfigError(f"[relays.{name}.fault] needs an onset (or set [scenario] onset)")
            fault_table["onset"] = default_onset
        if "harmonic_injection" in fault_table:
            fault_table["harmonic_injection"] = _harmonics(
                fault_table["harmonic_injection"], f"relays.{name}.fault"
            )
        try:
            fault = FaultSpec(**fault_table)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"Invalid [relays.{name}.fault] table: {exc}") from exc
    try:
        return RelaySpec(name=name, fault=fault, **options)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"Invalid [relays.{name}] table: {exc}") from exc


def scenario_from_dict(data: Mapping[str, Any], base_dir: Optional[Path] = None) -> FeederScenario:
    """Build a scenario from a parsed TOML document.

    Raises:
        ConfigError: On unknown keys, missing tables or invalid values
    """
    check_keys(data, ("scenario", "sdg", "relays"), "top level")
    header = dict(data.get("scenario", {}))
    check_keys(header, SCENARIO_KEYS, "scenario")
    if "duration" not in header:
        raise ConfigError("[scenario] needs a duration")
    relays_table = data.get("relays", {})
    if not relays_table:
        raise ConfigError("Scenario defines no [relays.<name>] tables")

    default_onset = header.pop("onset", None)
    relays = tuple(
        _relay_from_dict(name, table, default_onset) for name, table in relays_table.items()
    )
    sdg = _sdg_from_dict(data["sdg"], base_dir) if "sdg" in data else None
    return FeederScenario(relays=relays, sdg=sdg, **header)


def scenario_to_dict(scenario: FeederScenario) -> Dict[str, Any]:
    """Inverse of :func:`scenario_from_dict` (bootstrap sources are not embedded)."""
    data: Dict[str, Any] = {
        "scenario": {
            "name": scenario.name,
            "duration": scenario.duration,
            "sample_rate": scenario.sample_rate,
            "fundamental_freq": scenario.fundamental_freq,
            "seed": scenario.seed,
        },
        "relays": {},
    }
    if scenario.sdg is not None:
        sdg = scenario.sdg
        if sdg.bootstrap_source is not None:
            logger.warning("Bootstrap source of the SDG process is not written; set source_csv by hand")
        data["sdg"] = {
            "kind": sdg.kind.value,
            "ar_coeffs": list(sdg.ar_coeffs),
            "noise_std": sdg.noise_std,
            "mean_power": sdg.mean_power,
            "block_len": sdg.block_len,
            "rate": sdg.rate,
            "floor": sdg.floor,
            "harmonic_onoff": {str(k): v for k, v in sdg.harmonic_onoff.items()},
            "harmonic_dwell": sdg.harmonic_dwell,
        }
    for relay in scenario.relays:
        table: Dict[str, Any] = {
            "role": relay.role.value,
            "base_envelope": relay.base_envelope,
            "sdg_coupling": relay.sdg_coupling,
            "noise_fraction": relay.noise_fraction,
        }
        if relay.fault is not None:
            table["fault"] = {
                "onset": relay.fault.onset,
                "envelope_multiplier": relay.fault.envelope_multiplier,
                "transient_tau": relay.fault.transient_tau,
                "harmonic_injection": {str(k): v for k, v in relay.fault.harmonic_injection.items()},
                "arc_noise": relay.fault.arc_noise,
            }
        data["relays"][relay.name] = table
    return data


def scenario_from_toml(path: Union[str, Path]) -> FeederScenario:
    """Load a scenario file; relative ``source_csv`` paths resolve against the file's directory."""
    path = Path(path)
    return scenario_from_dict(load_toml(path), base_dir=path.parent)


def scenario_to_toml(scenario: FeederScenario, path: Union[str, Path]) -> Path:
    return dump_toml(scenario_to_dict(scenario), path)

"""Preset scenarios and scenario files."""

from cpow_innovation.scenarios.catalog import (
    FEEDER_DEFAULTS,
    RELAYS,
    SCENARIOS,
    default_sdg_process,
    get_scenario,
    list_scenarios,
    zone_fault_minimum,
)
from cpow_innovation.waveform.scenario_io import (
    scenario_from_dict,
    scenario_from_toml,
    scenario_to_dict,
    scenario_to_toml,
)

__all__ = [
    "FEEDER_DEFAULTS",
    "RELAYS",
    "SCENARIOS",
    "default_sdg_process",
    "get_scenario",
    "list_scenarios",
    "scenario_from_dict",
    "scenario_from_toml",
    "scenario_to_dict",
    "scenario_to_toml",
    "zone_fault_minimum",
]

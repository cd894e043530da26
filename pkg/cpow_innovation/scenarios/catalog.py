"""Preset feeder scenarios.

Five relays R1-R5 sit along a radial feeder with SDG connected downstream of R4.
Each preset places one single-phase fault and assigns relay roles accordingly.
"""

from typing import Any, Dict, Mapping, Optional

import numpy as np

from cpow_innovation.waveform.feeder import (
    DEFAULT_ARC_FRACTION,
    DEFAULT_HARMONIC_FRACTION,
    DEFAULT_MULTIPLIERS,
    FaultSpec,
    FeederScenario,
    RelayRole,
    RelaySpec,
)
from cpow_innovation.waveform.sdg import SdgProcess

# Feeder-wide settings
FEEDER_DEFAULTS: Dict[str, Any] = {
    "duration": 11.5,  # 10 s of history for AOCR, 1 s observation after onset
    "onset": 10.5,
    "sample_rate": 50000.0,
    "fundamental_freq": 60.0,
    "observation_window": 1.0,
}

# SDG current seen at full coupling: AR(1) at 100 Hz, stationary std 20 A around 25 A
SDG_DEFAULTS: Dict[str, Any] = {
    "kind": "ar_gaussian",
    "ar_coeffs": (0.98,),
    "stationary_std": 20.0,
    "mean_power": 25.0,
    "rate": 100.0,
    "floor": 0.0,
}

# Relay placement; i_fault_min is the smallest fault current in the relay's zone
RELAYS: Dict[str, Dict[str, float]] = {
    "R1": {"base_envelope": 300.0, "sdg_coupling": 0.2, "i_fault_min": 700.0},
    "R2": {"base_envelope": 220.0, "sdg_coupling": 0.3, "i_fault_min": 500.0},
    "R3": {"base_envelope": 150.0, "sdg_coupling": 0.3, "i_fault_min": 350.0},
    "R4": {"base_envelope": 100.0, "sdg_coupling": 0.5, "i_fault_min": 250.0},
    "R5": {"base_envelope": 40.0, "sdg_coupling": 2.0, "i_fault_min": 150.0},
}

SCENARIOS: Dict[str, Dict[str, Any]] = {
    "F1": {
        "name": "F1 - fault below R3, SDG feeds through R4",
        "roles": {"R3": "primary", "R2": "backup", "R4": "sympathetic"},
    },
    "F2": {
        "name": "F2 - fault below R5, SDG blinds the primary relay",
        "roles": {"R5": "blinded_primary", "R4": "backup"},
    },
    "F3": {
        "name": "F3 - fault below R2, SDG feeds through R4",
        "roles": {"R2": "primary", "R1": "backup", "R4": "sympathetic"},
    },
}

SYMPATHETIC_TAU = 0.1


def default_sdg_process() -> SdgProcess:
    """The catalog's SDG trajectory law."""
    a = SDG_DEFAULTS["ar_coeffs"]
    noise_std = SDG_DEFAULTS["stationary_std"] * float(np.sqrt(1.0 - np.sum(np.square(a))))
    return SdgProcess(
        kind=SDG_DEFAULTS["kind"],
        ar_coeffs=a,
        noise_std=noise_std,
        mean_power=SDG_DEFAULTS["mean_power"],
        rate=SDG_DEFAULTS["rate"],
        floor=SDG_DEFAULTS["floor"],
    )


def _fault_for(
    role: RelayRole,
    relay: Mapping[str, float],
    onset: float,
    multipliers: Mapping[str, float],
) -> FaultSpec:
    pre_mean = relay["base_envelope"] + relay["sdg_coupling"] * SDG_DEFAULTS["mean_power"]
    if role is RelayRole.SYMPATHETIC:
        return FaultSpec(onset, multipliers["sympathetic"], transient_tau=SYMPATHETIC_TAU)

    realized = multipliers[role.value]
    nominal = realized
    if role is RelayRole.BLINDED_PRIMARY:
        # configured multiplier is the ratio reached with SDG present
        nominal = 1.0 + (realized - 1.0) * (1.0 + relay["sdg_coupling"])
    return FaultSpec(
        onset,
        nominal,
        harmonic_injection={3: DEFAULT_HARMONIC_FRACTION * realized * pre_mean},
        arc_noise=DEFAULT_ARC_FRACTION * (realized - 1.0) * pre_mean,
    )


def get_scenario(
    name: str,
    seed: int = 0,
    onset: Optional[float] = None,
    duration: Optional[float] = None,
    sample_rate: Optional[float] = None,
    multipliers: Optional[Mapping[str, float]] = None,
) -> FeederScenario:
    """Build a preset scenario.

    Args:
        name: Preset name (F1, F2, F3)
        seed: Simulation seed
        onset: Fault onset in seconds (default 10.5)
        duration: Simulated span in seconds (default 11.5)
        sample_rate: Waveform rate in Hz (default 50 kHz)
        multipliers: Overrides of the realized role multipliers

    Returns:
        Scenario with all five relays; relays without a role are unaffected

    Raises:
        ValueError: If the preset does not exist

    Example:
        >>> scenario = get_scenario("F2", seed=3)
        >>> scenario.relay("R5").role.value
        'blinded_primary'
    """
    if name not in SCENARIOS:
        available = ", ".join(SCENARIOS.keys())
        raise ValueError(f"Scenario {name} not found. Available scenarios: {available}")
    preset = SCENARIOS[name]
    onset = FEEDER_DEFAULTS["onset"] if onset is None else onset
    factors = dict(DEFAULT_MULTIPLIERS)
    factors.update(multipliers or {})

    relays = []
    for relay_name, relay in RELAYS.items():
        role = RelayRole(preset["roles"].get(relay_name, RelayRole.UNAFFECTED.value))
        fault = None if role is RelayRole.UNAFFECTED else _fault_for(role, relay, onset, factors)
        relays.append(
            RelaySpec(
                relay_name,
                role,
                base_envelope=relay["base_envelope"],
                sdg_coupling=relay["sdg_coupling"],
                fault=fault,
            )
        )
    return FeederScenario(
        relays=tuple(relays),
        duration=FEEDER_DEFAULTS["duration"] if duration is None else duration,
        sample_rate=FEEDER_DEFAULTS["sample_rate"] if sample_rate is None else sample_rate,
        fundamental_freq=FEEDER_DEFAULTS["fundamental_freq"],
        seed=seed,
        sdg=default_sdg_process(),
        name=name,
    )


def zone_fault_minimum(relay_name: str) -> float:
    """Minimum fault current in a relay's protection zone (AOCR input)."""
    if relay_name not in RELAYS:
        available = ", ".join(RELAYS.keys())
        raise ValueError(f"Relay {relay_name} not found. Available relays: {available}")
    return RELAYS[relay_name]["i_fault_min"]


def list_scenarios() -> Dict[str, str]:
    """Preset names with their descriptions."""
    return {key: preset["name"] for key, preset in SCENARIOS.items()}

"""Sequential fault detection on innovation streams."""

from cpow_innovation.isfd.detector import (
    IsfdConfig,
    IsfdOutcome,
    isfd_detect,
    isfd_state_flags,
    run_isfd_on_waveform,
    window_statistics,
)

__all__ = [
    "IsfdConfig",
    "IsfdOutcome",
    "isfd_detect",
    "isfd_state_flags",
    "run_isfd_on_waveform",
    "window_statistics",
]

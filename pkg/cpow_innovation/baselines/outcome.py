"""Trip decisions of the comparison relays."""

import json
from dataclasses import dataclass
from typing import Any, Dict, Optional

from cpow_innovation.nst.smooth_test import Hypothesis


@dataclass(frozen=True)
class DetectionOutcome:
    """Result of running a relay over one observation window.

    Attributes:
        decision: H1 when the relay trips inside the window
        trip_time: Absolute trip instant in seconds
        delay_seconds: Trip instant minus window start (fault onset)
        statistic: Decision statistic summary (peak M for overcurrent, peak margin for AOCR)
        method: Relay family
    """

    decision: Hypothesis
    trip_time: Optional[float] = None
    delay_seconds: Optional[float] = None
    statistic: float = 0.0
    method: str = ""

    @property
    def tripped(self) -> bool:
        return self.decision is Hypothesis.H1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "method": self.method,
            "decision": self.decision.value,
            "trip_time": self.trip_time,
            "delay_seconds": self.delay_seconds,
            "statistic": self.statistic,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

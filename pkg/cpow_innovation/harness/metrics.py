"""Trip-decision tallies and the experiment report."""

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd

CSV_COLUMNS = ["relay", "method", "tpr", "fpr", "mean_delay_s", "tp", "fp", "tn", "fn"]
DELAY_DECIMALS = 6


def _rate(hits: int, total: int) -> float:
    return hits / total if total else 0.0


@dataclass
class MethodMetrics:
    """Confusion counts of one method at one relay.

    A trip in the fault variant counts as a positive, a trip in the no-fault twin as a
    false positive. At relays whose fault role is sympathetic the "true" positives are
    the sympathetic trips.

    Attributes:
        relay: Relay name
        method: Detection method
        role: Relay role in the fault variant
        tp: Trips in the fault variant
        fn: Non-trips in the fault variant
        fp: Trips in the no-fault variant
        tn: Non-trips in the no-fault variant
        delays: Delay histogram over true positives (rounded seconds → count)
    """

    relay: str
    method: str
    role: str = "unaffected"
    tp: int = 0
    fn: int = 0
    fp: int = 0
    tn: int = 0
    delays: Dict[float, int] = field(default_factory=dict)

    def record(self, fault_trip: bool, fault_delay: Optional[float], nofault_trip: bool) -> None:
        if fault_trip:
            self.tp += 1
            key = round(float(fault_delay), DELAY_DECIMALS)
            self.delays[key] = self.delays.get(key, 0) + 1
        else:
            self.fn += 1
        if nofault_trip:
            self.fp += 1
        else:
            self.tn += 1

    @property
    def tpr(self) -> float:
        return _rate(self.tp, self.tp + self.fn)

    @property
    def fpr(self) -> float:
        return _rate(self.fp, self.fp + self.tn)

    @property
    def mean_delay(self) -> Optional[float]:
        """Mean delay over true positives; None without any."""
        count = sum(self.delays.values())
        if not count:
            return None
        return sum(delay * n for delay, n in self.delays.items()) / count

    @property
    def modal_delay(self) -> Optional[float]:
        if not self.delays:
            return None
        return Counter(self.delays).most_common(1)[0][0]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "relay": self.relay,
            "method": self.method,
            "role": self.role,
            "tpr": self.tpr,
            "fpr": self.fpr,
            "mean_delay_s": self.mean_delay,
            "counts": {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn},
            "delay_histogram": {f"{d:.{DELAY_DECIMALS}f}": n for d, n in sorted(self.delays.items())},
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "MethodMetrics":
        counts = data["counts"]
        return cls(
            data["relay"],
            data["method"],
            data.get("role", "unaffected"),
            tp=int(counts["tp"]),
            fn=int(counts["fn"]),
            fp=int(counts["fp"]),
            tn=int(counts["tn"]),
            delays={float(k): int(v) for k, v in data.get("delay_histogram", {}).items()},
        )


@dataclass
class MetricsReport:
    """Experiment outcome: per (relay, method) metrics plus calibration and aborts.

    Attributes:
        scenario: Scenario label
        n_runs: Completed paired runs
        master_seed: Seed the experiment was derived from
        entries: Metrics per (relay, method), in relay then method order
        calibration: Calibrated settings per relay and method
        aborted: (run index, message) of runs that failed
        artifacts: Plot data of the runs (not serialized)
    """

    scenario: str
    n_runs: int
    master_seed: int
    entries: List[MethodMetrics] = field(default_factory=list)
    calibration: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    aborted: List[Tuple[int, str]] = field(default_factory=list)
    artifacts: Optional[Any] = field(default=None, repr=False, compare=False)

    def get(self, relay: str, method: str) -> MethodMetrics:
        for entry in self.entries:
            if entry.relay == relay and entry.method == method:
                return entry
        available = ", ".join(f"{e.relay}/{e.method}" for e in self.entries)
        raise ValueError(f"Metrics for {relay}/{method} not found. Available metrics: {available}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "scenario": self.scenario,
            "n_runs": self.n_runs,
            "master_seed": self.master_seed,
            "metrics": [entry.to_dict() for entry in self.entries],
            "calibration": self.calibration,
            "aborted": [[index, message] for index, message in self.aborted],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "MetricsReport":
        return cls(
            data["scenario"],
            int(data["n_runs"]),
            int(data["master_seed"]),
            [MethodMetrics.from_dict(item) for item in data.get("metrics", [])],
            dict(data.get("calibration", {})),
            [(int(i), str(m)) for i, m in data.get("aborted", [])],
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "MetricsReport":
        return cls.from_dict(json.loads(text))

    def to_frame(self) -> pd.DataFrame:
        """One row per relay × method in the CSV column order."""
        rows = [
            {
                "relay": e.relay,
                "method": e.method,
                "tpr": e.tpr,
                "fpr": e.fpr,
                "mean_delay_s": e.mean_delay,
                "tp": e.tp,
                "fp": e.fp,
                "tn": e.tn,
                "fn": e.fn,
            }
            for e in self.entries
        ]
        return pd.DataFrame(rows, columns=CSV_COLUMNS)

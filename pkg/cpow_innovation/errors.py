"""Exception hierarchy for cpow-innovation.

Argument errors use the built-in ``ValueError``; everything a caller may want
to handle by category derives from :class:`CpowError`.
"""

from typing import Any, List, Optional, Sequence, Tuple


class CpowError(Exception):
    """Base class for all package errors."""


class ConfigError(CpowError, ValueError):
    """Invalid or inconsistent configuration (scenario, plan, experiment)."""


class ParseError(CpowError, ValueError):
    """Malformed input file.

    Attributes:
        row: 1-based data row (header excluded) where parsing failed, if known
        column: Column name involved, if known
    """

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[str] = None):
        location = []
        if row is not None:
            location.append(f"row {row}")
        if column is not None:
            location.append(f"column '{column}'")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)
        self.row = row
        self.column = column


class DegenerateInputError(CpowError):
    """Input carries no usable variation (e.g. constant series)."""


class ModelError(CpowError):
    """An innovation model violates its invariants."""


class TrainingDivergedError(CpowError):
    """Autoencoder training produced a non-finite loss."""

    def __init__(self, iteration: int, loss: float):
        super().__init__(f"Training diverged at iteration {iteration} (loss={loss})")
        self.iteration = iteration
        self.loss = loss


class TruncatedStreamError(CpowError):
    """Innovation source ran out before the detector reached a decision."""

    def __init__(self, samples_seen: int, needed: int, trace: Sequence[Tuple[int, float, float]]):
        super().__init__(
            f"Source exhausted after {samples_seen} samples; {needed} needed for a decision"
        )
        self.samples_seen = samples_seen
        self.needed = needed
        self.trace = list(trace)


class CalibrationInfeasibleError(CpowError):
    """No calibration grid point meets the target false-positive rate."""

    def __init__(self, target_fpr: float, best_fpr: float, best_point: Any):
        super().__init__(
            f"No grid point reaches FPR <= {target_fpr}; best achieved {best_fpr:.4f} at {best_point}"
        )
        self.target_fpr = target_fpr
        self.best_fpr = best_fpr
        self.best_point = best_point


class ExperimentError(CpowError):
    """Too many Monte-Carlo runs aborted."""

    def __init__(self, message: str, failures: List[Tuple[int, str]]):
        super().__init__(message)
        self.failures = failures

"""Monte-Carlo experiment runner and report emission."""

from cpow_innovation.harness.experiment import (
    RelayDetectors,
    RunArtifacts,
    aggregate,
    nominal_envelope,
    observation_window,
    resolve_scenario,
    run_experiment,
    train_models,
)
from cpow_innovation.harness.metrics import CSV_COLUMNS, MethodMetrics, MetricsReport
from cpow_innovation.harness.report import emit_plotdata, emit_report
from cpow_innovation.harness.seeding import derive_seed

__all__ = [
    "CSV_COLUMNS",
    "MethodMetrics",
    "MetricsReport",
    "RelayDetectors",
    "RunArtifacts",
    "aggregate",
    "derive_seed",
    "emit_plotdata",
    "emit_report",
    "nominal_envelope",
    "observation_window",
    "resolve_scenario",
    "run_experiment",
    "train_models",
]

"""Monte-Carlo protection experiment.

The experiment trains one analytic innovation model per relay on a no-fault run,
calibrates the enabled methods on fresh no-fault runs, then evaluates paired runs:
each run simulates a fault scenario and its no-fault twin from the same seed, and
every method decides at every relay over the same observation window.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from cpow_innovation.baselines.calibration import RunFeatures, calibrate, run_features
from cpow_innovation.baselines.overcurrent import (
    AocrConfig,
    OvercurrentConfig,
    aocr_detect,
    conventional_detect,
)
from cpow_innovation.config.settings import ExperimentConfig
from cpow_innovation.errors import ConfigError, CpowError, ExperimentError
from cpow_innovation.harness.metrics import MethodMetrics, MetricsReport
from cpow_innovation.harness.seeding import derive_seed
from cpow_innovation.innovation.ar_model import ArInnovationModel, encode, estimate_ar_model
from cpow_innovation.isfd.detector import IsfdConfig, isfd_detect
from cpow_innovation.nst.smooth_test import Hypothesis
from cpow_innovation.scenarios.catalog import RELAYS, SCENARIOS, get_scenario, zone_fault_minimum
from cpow_innovation.waveform.feeder import FeederScenario, simulate_scenario
from cpow_innovation.waveform.scenario_io import scenario_from_toml
from cpow_innovation.waveform.sdg import SdgKind
from cpow_innovation.waveform.series import WaveformSeries

logger = logging.getLogger(__name__)

Window = Tuple[float, float]
CONDITIONS = ("fault", "no_fault")


@dataclass(frozen=True)
class RelayDetectors:
    """Settings of every method at one relay."""

    model: Optional[ArInnovationModel] = None
    isfd: Optional[IsfdConfig] = None
    conventional: Optional[OvercurrentConfig] = None
    aocr: Optional[AocrConfig] = None


@dataclass
class RunArtifacts:
    """Plot data accumulated over runs.

    Attributes:
        bin_edges: Edges of the innovation histograms on [0, 1]
        histograms: relay → condition → innovation counts inside the window
        scatter: (relay, method, run, condition, statistic, threshold) rows
    """

    bin_edges: np.ndarray
    histograms: Dict[str, Dict[str, np.ndarray]] = field(default_factory=dict)
    scatter: List[Tuple[str, str, int, str, float, float]] = field(default_factory=list)


@dataclass(frozen=True)
class _RunJob:
    index: int
    seed: int
    scenario: FeederScenario
    window: Window
    detectors: Dict[str, RelayDetectors]
    methods: Tuple[str, ...]
    bin_edges: np.ndarray


@dataclass
class _RunRecord:
    index: int
    decisions: Dict[Tuple[str, str, str], Tuple[bool, Optional[float], float, float]] = field(
        default_factory=dict
    )
    histograms: Dict[Tuple[str, str], np.ndarray] = field(default_factory=dict)
    error: Optional[str] = None


def resolve_scenario(name_or_path: str, seed: int = 0) -> FeederScenario:
    """A preset name (F1, F2, F3) or a scenario TOML path.

    Raises:
        ConfigError: If it is neither
    """
    if name_or_path in SCENARIOS:
        return get_scenario(name_or_path, seed=seed)
    path = Path(name_or_path)
    if path.is_file():
        return scenario_from_toml(path).with_seed(seed)
    available = ", ".join(SCENARIOS)
    raise ConfigError(
        f"Scenario {name_or_path} not found. Available presets: {available}, or a TOML path"
    )


def observation_window(scenario: FeederScenario, length: float) -> Window:
    """From fault onset (or ``duration - length`` without faults) for ``length`` seconds."""
    start = scenario.onset
    if start is None:
        start = scenario.duration - length
    stop = min(start + length, scenario.duration)
    if start <= 0 or stop <= start:
        raise ConfigError(f"Observation window of {length} s does not fit the scenario")
    return float(start), float(stop)


def nominal_envelope(scenario: FeederScenario, relay_name: str) -> float:
    """Mean pre-fault fundamental envelope of a relay."""
    relay = scenario.relay(relay_name)
    sdg_mean = 0.0
    if scenario.sdg is not None:
        if scenario.sdg.kind is SdgKind.BOOTSTRAP and scenario.sdg.bootstrap_source is not None:
            sdg_mean = float(np.mean(scenario.sdg.bootstrap_source.samples))
        else:
            sdg_mean = scenario.sdg.mean_power
    return relay.base_envelope + relay.sdg_coupling * sdg_mean


def fault_minimum(config: ExperimentConfig, scenario: FeederScenario, relay_name: str) -> float:
    if relay_name in config.aocr.i_fault_min:
        return float(config.aocr.i_fault_min[relay_name])
    if relay_name in RELAYS:
        return zone_fault_minimum(relay_name)
    return 2.0 * nominal_envelope(scenario, relay_name)


def _cycle_samples(scenario: FeederScenario) -> int:
    return int(round(scenario.sample_rate / scenario.fundamental_freq))


def _isfd_segment(x: WaveformSeries, model: ArInnovationModel, window: Window) -> WaveformSeries:
    if model.envelope_mode:
        return x.window(x.t0, window[1])
    pre = (model.order + 1) / x.sample_rate
    return x.window(window[0] - pre, window[1])


def train_models(
    config: ExperimentConfig, scenario: FeederScenario, window: Window
) -> Dict[str, ArInnovationModel]:
    """Fit one analytic innovation model per relay on a dedicated no-fault run."""
    settings = config.innovation
    start = window[0] - settings.training_duration
    if start < 0:
        raise ConfigError(
            f"training_duration {settings.training_duration} s exceeds the pre-window span {window[0]} s"
        )
    seed = derive_seed(config.experiment.master_seed, "train")
    waveforms = simulate_scenario(scenario.without_faults().with_seed(seed))
    f0 = scenario.fundamental_freq if (settings.notch or settings.envelope_mode) else None
    models = {}
    for name, x in waveforms.items():
        models[name] = estimate_ar_model(
            x.window(start, window[0]),
            settings.order,
            envelope_mode=settings.envelope_mode,
            fundamental_freq=f0,
        )
    return models


def base_detectors(
    config: ExperimentConfig,
    scenario: FeederScenario,
    models: Dict[str, ArInnovationModel],
) -> Dict[str, RelayDetectors]:
    """Uncalibrated settings of every enabled method at every relay."""
    methods = config.experiment.methods
    block_len = _cycle_samples(scenario)
    detectors = {}
    for name in scenario.relay_names():
        nominal = nominal_envelope(scenario, name)
        detectors[name] = RelayDetectors(
            model=models.get(name),
            isfd=config.isfd.to_config() if "isfd" in methods else None,
            conventional=(
                config.conventional.to_config(config.conventional.pickup_factor * nominal, block_len)
                if "conventional" in methods
                else None
            ),
            aocr=(
                config.aocr.to_config(fault_minimum(config, scenario, name), block_len)
                if "aocr" in methods
                else None
            ),
        )
    return detectors


_CalibrationArgs = Tuple[int, FeederScenario, Window, Dict[str, RelayDetectors], Tuple[str, ...]]


def _calibration_job(args: _CalibrationArgs) -> Dict[str, Dict[str, RunFeatures]]:
    seed, scenario, window, detectors, methods = args
    waveforms = simulate_scenario(scenario.without_faults().with_seed(seed))
    features: Dict[str, Dict[str, RunFeatures]] = {}
    for name, x in waveforms.items():
        relay = detectors[name]
        features[name] = {}
        for method in methods:
            base = getattr(relay, method)
            segment = _isfd_segment(x, relay.model, window) if method == "isfd" else x
            features[name][method] = run_features(method, segment, window, base, relay.model)
    return features


def _map(function: Callable, jobs: Sequence[Any], workers: int, progress: bool, label: str) -> List[Any]:
    bar = dict(total=len(jobs), disable=not progress, desc=label)
    if workers <= 1:
        return [function(job) for job in tqdm(jobs, **bar)]
    with ProcessPoolExecutor(max_workers=workers) as executor:
        chunksize = max(1, len(jobs) // (4 * workers))
        return list(tqdm(executor.map(function, jobs, chunksize=chunksize), **bar))


def calibrate_detectors(
    config: ExperimentConfig,
    scenario: FeederScenario,
    window: Window,
    detectors: Dict[str, RelayDetectors],
    progress: bool = False,
) -> Tuple[Dict[str, RelayDetectors], Dict[str, Dict[str, Any]]]:
    """Calibrate every enabled method at every relay to the target FPR.

    Returns:
        Tuple of (calibrated detectors, calibration summary per relay and method)
    """
    experiment = config.experiment
    enabled = {
        "isfd": config.isfd.calibrate,
        "conventional": config.conventional.calibrate,
        "aocr": config.aocr.calibrate,
    }
    methods = tuple(m for m in experiment.methods if enabled[m])
    summary: Dict[str, Dict[str, Any]] = {name: {} for name in detectors}
    if not methods:
        return detectors, summary

    seeds = [
        derive_seed(experiment.master_seed, "calibrate", i)
        for i in range(experiment.n_calibration_runs)
    ]
    jobs = [(seed, scenario, window, detectors, methods) for seed in seeds]
    features = _map(_calibration_job, jobs, experiment.workers, progress, "calibration")

    calibrated = {}
    for name, relay in detectors.items():
        changes = dict(
            model=relay.model, isfd=relay.isfd, conventional=relay.conventional, aocr=relay.aocr
        )
        for method in methods:
            base = getattr(relay, method)
            if method == "conventional":
                grid = np.asarray(config.conventional.pickup_grid) * nominal_envelope(scenario, name)
            elif method == "aocr":
                grid = config.aocr.alpha_grid
            else:
                grid = config.isfd.epsilon_grid
            result = calibrate(
                method,
                [run[name][method] for run in features],
                experiment.target_fpr,
                grid,
                window,
                base_config=base,
            )
            changes[method] = result.config
            summary[name][method] = {
                "config": result.config.to_dict(),
                "achieved_fpr": result.achieved_fpr,
            }
        calibrated[name] = RelayDetectors(**changes)
    return calibrated, summary


def _evaluate(
    method: str, relay: RelayDetectors, x: WaveformSeries, window: Window
) -> Tuple[bool, Optional[float], float, float, Optional[np.ndarray]]:
    if method == "conventional":
        outcome = conventional_detect(x, window, relay.conventional)
        return outcome.tripped, outcome.delay_seconds, outcome.statistic, 1.0, None
    if method == "aocr":
        outcome = aocr_detect(x, window, relay.aocr)
        return outcome.tripped, outcome.delay_seconds, outcome.statistic, 0.0, None
    v = encode(relay.model, _isfd_segment(x, relay.model, window))
    start = v.index_at(window[0])
    if start < v.warmup:
        raise ValueError(f"Window start {window[0]} s falls inside the model warm-up")
    stream = v.values[start:]
    result = isfd_detect(stream, v.sample_rate, relay.isfd)
    peak = max(entry[1] for entry in result.statistic_trace)
    delay = result.delay_seconds
    return result.decision is Hypothesis.H1, delay, peak, relay.isfd.threshold, stream


def _run_job(job: _RunJob) -> _RunRecord:
    record = _RunRecord(job.index)
    try:
        scenario = job.scenario.with_seed(job.seed)
        variants = {
            "fault": simulate_scenario(scenario),
            "no_fault": simulate_scenario(scenario.without_faults()),
        }
        for condition in CONDITIONS:
            for name, x in variants[condition].items():
                relay = job.detectors[name]
                for method in job.methods:
                    outcome = _evaluate(method, relay, x, job.window)
                    tripped, delay, statistic, threshold, stream = outcome
                    record.decisions[(name, method, condition)] = (tripped, delay, statistic, threshold)
                    if stream is not None:
                        count = int(round((job.window[1] - job.window[0]) * relay.model.sample_rate))
                        if relay.model.envelope_mode:
                            count = stream.size
                        counts, _ = np.histogram(stream[:count], bins=job.bin_edges)
                        record.histograms[(name, condition)] = counts
    except (CpowError, ValueError) as exc:
        record.error = f"{type(exc).__name__}: {exc}"
    return record


def run_experiment(config: ExperimentConfig, progress: bool = False) -> MetricsReport:
    """Train, calibrate and evaluate every enabled method at every relay.

    Args:
        config: Experiment configuration
        progress: Show tqdm progress bars

    Returns:
        MetricsReport with run artifacts attached

    Raises:
        ExperimentError: If more than ``max_abort_fraction`` of the runs fail
        CalibrationInfeasibleError: If a method cannot meet the target FPR on its grid
    """
    experiment = config.experiment
    scenario = resolve_scenario(experiment.scenario)
    window = observation_window(scenario, experiment.observation_window)
    logger.info(
        "Experiment %s: %d runs, methods %s, window [%.4f, %.4f) s",
        scenario.name,
        experiment.n_runs,
        ", ".join(experiment.methods),
        *window,
    )

    models = train_models(config, scenario, window) if "isfd" in experiment.methods else {}
    detectors = base_detectors(config, scenario, models)
    detectors, calibration = calibrate_detectors(config, scenario, window, detectors, progress)

    edges = np.linspace(0.0, 1.0, experiment.histogram_bins + 1)
    jobs = [
        _RunJob(
            i,
            derive_seed(experiment.master_seed, "run", i),
            scenario,
            window,
            detectors,
            experiment.methods,
            edges,
        )
        for i in range(experiment.n_runs)
    ]
    records = _map(_run_job, jobs, experiment.workers, progress, "runs")
    report = aggregate(scenario, experiment.master_seed, experiment.methods, records, edges)
    report.calibration = calibration

    if len(report.aborted) > experiment.max_abort_fraction * experiment.n_runs:
        raise ExperimentError(
            f"{len(report.aborted)} of {experiment.n_runs} runs aborted; first: {report.aborted[0][1]}",
            report.aborted,
        )
    for index, message in report.aborted:
        logger.warning("Run %d aborted: %s", index, message)
    logger.info("Experiment %s finished: %d runs completed", scenario.name, report.n_runs)
    return report


def aggregate(
    scenario: FeederScenario,
    master_seed: int,
    methods: Iterable[str],
    records: Sequence[_RunRecord],
    bin_edges: np.ndarray,
) -> MetricsReport:
    """Fold per-run records, in run order, into metrics and plot data."""
    methods = tuple(methods)
    entries = {
        (relay.name, method): MethodMetrics(relay.name, method, relay.role.value)
        for relay in scenario.relays
        for method in methods
    }
    artifacts = RunArtifacts(np.asarray(bin_edges))
    aborted: List[Tuple[int, str]] = []
    completed = 0
    for record in sorted(records, key=lambda r: r.index):
        if record.error is not None:
            aborted.append((record.index, record.error))
            continue
        completed += 1
        for (relay, method), metrics in entries.items():
            fault = record.decisions[(relay, method, "fault")]
            clean = record.decisions[(relay, method, "no_fault")]
            metrics.record(fault[0], fault[1], clean[0])
            for condition, decision in (("fault", fault), ("no_fault", clean)):
                artifacts.scatter.append(
                    (relay, method, record.index, condition, decision[2], decision[3])
                )
        for (relay, condition), counts in record.histograms.items():
            per_relay = artifacts.histograms.setdefault(relay, {})
            empty = np.zeros(counts.size, dtype=np.int64)
            per_relay[condition] = per_relay.get(condition, empty) + counts

    report = MetricsReport(
        scenario.name, completed, master_seed, list(entries.values()), aborted=aborted
    )
    report.artifacts = artifacts
    return report

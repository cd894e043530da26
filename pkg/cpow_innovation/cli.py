"""Command-line interface: ``cpow <subcommand> [options]``.

Exit codes: 0 success, 2 configuration or usage error, 3 any other failure.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, TypeVar

import numpy as np

from cpow_innovation import __version__
from cpow_innovation.baselines.overcurrent import aocr_detect, conventional_detect
from cpow_innovation.compression.blob import read_blob, write_blob
from cpow_innovation.compression.pipeline import (
    compress_pipeline,
    compression_report,
    decompress_pipeline,
    fit_subband_models,
)
from cpow_innovation.compression.subband import SubbandPlan
from cpow_innovation.config.settings import ExperimentConfig
from cpow_innovation.config.toml_io import dump_toml
from cpow_innovation.errors import ConfigError, CpowError, ParseError
from cpow_innovation.harness.experiment import (
    base_detectors,
    calibrate_detectors,
    observation_window,
    resolve_scenario,
    run_experiment,
    train_models,
)
from cpow_innovation.harness.report import emit_plotdata, emit_report
from cpow_innovation.harness.seeding import derive_seed
from cpow_innovation.ingest.csv_reader import read_waveform_csv, write_waveform_csv
from cpow_innovation.innovation.ar_model import ArInnovationModel, estimate_ar_model
from cpow_innovation.innovation.neural.training import train_autoencoder
from cpow_innovation.isfd.detector import isfd_state_flags, run_isfd_on_waveform
from cpow_innovation.logging_config import configure_logging
from cpow_innovation.waveform.feeder import simulate_scenario
from cpow_innovation.waveform.series import WaveformSeries

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

T = TypeVar("T")


def _load_config(args: argparse.Namespace) -> ExperimentConfig:
    config = ExperimentConfig.from_toml(args.config) if args.config else ExperimentConfig()
    return config.with_overrides(seed=args.seed, runs=args.runs, out=args.out)


def _scenario(args: argparse.Namespace, config: ExperimentConfig, seed: int):
    return resolve_scenario(getattr(args, "scenario", None) or config.experiment.scenario, seed)


def _output_dir(config: ExperimentConfig) -> Path:
    path = Path(config.experiment.output_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _print_json(data: Dict) -> None:
    print(json.dumps(data, indent=2, sort_keys=True))


def cmd_simulate(args: argparse.Namespace) -> int:
    config = _load_config(args)
    scenario = _scenario(args, config, config.experiment.master_seed)
    if args.no_fault:
        scenario = scenario.without_faults()
    out = _output_dir(config)
    for name, series in simulate_scenario(scenario).items():
        write_waveform_csv(series, out / f"{name}.csv")
    logger.info("Simulated %s into %s", scenario.name, out)
    return EXIT_OK


def _relay(per_relay: Dict[str, T], relay: str) -> T:
    if relay not in per_relay:
        raise ConfigError(f"Unknown relay {relay}. Available relays: {', '.join(per_relay)}")
    return per_relay[relay]


def _state_flags(
    config: ExperimentConfig, train: WaveformSeries, x: WaveformSeries, f0: float
) -> List[bool]:
    settings = config.innovation
    span = min(settings.training_duration, train.duration)
    model = estimate_ar_model(
        train.window(train.t0 + train.duration - span),
        settings.order,
        envelope_mode=settings.envelope_mode,
        fundamental_freq=f0 if (settings.notch or settings.envelope_mode) else None,
    )
    flags = isfd_state_flags(model, x, config.isfd.to_config())
    logger.info("Local analytics flagged %d of %d blocks", sum(flags), len(flags))
    return flags


def _training_series(args: argparse.Namespace, config: ExperimentConfig) -> WaveformSeries:
    if args.input:
        return read_waveform_csv(args.input).series
    scenario = _scenario(args, config, 0)
    window = observation_window(scenario, config.experiment.observation_window)
    seed = derive_seed(config.experiment.master_seed, "train")
    x = _relay(simulate_scenario(scenario.without_faults().with_seed(seed)), args.relay)
    return x.window(window[0] - config.innovation.training_duration, window[0])


def cmd_train(args: argparse.Namespace) -> int:
    config = _load_config(args)
    out = Path(args.model) if args.model else _output_dir(config) / f"model_{args.relay}.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    if args.method == "neural":
        model = train_autoencoder(_training_series(args, config), config.neural, progress=args.progress)
        out.write_text(model.to_json(), encoding="utf-8")
    elif args.input:
        settings = config.innovation
        model = estimate_ar_model(
            _training_series(args, config),
            settings.order,
            envelope_mode=settings.envelope_mode,
            fundamental_freq=args.f0 if (settings.notch or settings.envelope_mode) else None,
        )
        out.write_text(model.to_json(), encoding="utf-8")
    else:
        scenario = _scenario(args, config, 0)
        window = observation_window(scenario, config.experiment.observation_window)
        model = _relay(train_models(config, scenario, window), args.relay)
        out.write_text(model.to_json(), encoding="utf-8")
    logger.info("Wrote %s model to %s", args.method, out)
    return EXIT_OK


def cmd_calibrate(args: argparse.Namespace) -> int:
    config = _load_config(args)
    scenario = _scenario(args, config, 0)
    window = observation_window(scenario, config.experiment.observation_window)
    methods = config.experiment.methods
    models = train_models(config, scenario, window) if "isfd" in methods else {}
    detectors = base_detectors(config, scenario, models)
    _, summary = calibrate_detectors(config, scenario, window, detectors, progress=args.progress)

    document: Dict[str, Dict] = {}
    for relay, per_method in summary.items():
        for method, result in per_method.items():
            document.setdefault(method, {})[relay] = result["config"]
    out = _output_dir(config) / "calibration.toml"
    dump_toml(document, out)
    _print_json(summary)
    return EXIT_OK


def cmd_detect(args: argparse.Namespace) -> int:
    config = _load_config(args)
    x = read_waveform_csv(args.input).series
    if args.method == "isfd":
        if not args.model:
            raise ConfigError("detect --method isfd needs --model")
        model = ArInnovationModel.from_json(Path(args.model).read_text(encoding="utf-8"))
        t_start = args.t_start if args.t_start is not None else x.t0 + model.warmup / x.sample_rate
        outcome = run_isfd_on_waveform(model, x, t_start, config.isfd.to_config())
        _print_json(outcome.to_dict())
        return EXIT_OK

    if args.t_start is None:
        raise ConfigError(f"detect --method {args.method} needs --t-start")
    window = (args.t_start, args.t_start + config.experiment.observation_window)
    block_len = int(round(x.sample_rate / args.f0))
    if args.method == "conventional":
        if args.pickup is None:
            raise ConfigError("detect --method conventional needs --pickup")
        outcome = conventional_detect(x, window, config.conventional.to_config(args.pickup, block_len))
    else:
        if args.i_fault_min is None:
            raise ConfigError("detect --method aocr needs --i-fault-min")
        outcome = aocr_detect(x, window, config.aocr.to_config(args.i_fault_min, block_len))
    _print_json(outcome.to_dict())
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    config = _load_config(args)
    report = run_experiment(config, progress=args.progress)
    out = _output_dir(config)
    emit_report(report, out)
    if report.artifacts is not None:
        emit_plotdata(report.artifacts, out)
    return EXIT_OK


def cmd_compress(args: argparse.Namespace) -> int:
    config = _load_config(args)
    settings = config.compression
    seed = config.experiment.master_seed
    if args.input:
        x = read_waveform_csv(args.input).series
        if not args.train:
            raise ConfigError("compress --input needs --train with anomaly-free data")
        train = read_waveform_csv(args.train).series
        f0 = args.f0
    else:
        scenario = _scenario(args, config, seed)
        x = _relay(simulate_scenario(scenario), settings.relay)
        clean = scenario.without_faults().with_seed(derive_seed(seed, "compress-train"))
        train = _relay(simulate_scenario(clean), settings.relay)
        f0 = scenario.fundamental_freq

    plan = SubbandPlan(
        f0=f0,
        m=settings.m,
        fs=x.sample_rate,
        W=settings.W,
        decimation=settings.decimation,
        filter_taps=settings.filter_taps,
    )
    models = fit_subband_models(train, plan, settings.band_order)
    D_target = args.distortion or settings.distortion_fraction * float(np.mean(np.square(x.samples)))
    flags = _state_flags(config, train, x, f0) if settings.suppress_when_normal else None
    blob = compress_pipeline(
        x, plan, D_target, models, flags, suppress_when_normal=settings.suppress_when_normal
    )
    out = Path(args.blob) if args.blob else _output_dir(config) / f"{settings.relay}.cpw"
    write_blob(blob, out)
    _print_json(compression_report(x, blob).to_dict())
    return EXIT_OK


def cmd_decompress(args: argparse.Namespace) -> int:
    blob = read_blob(args.blob)
    series = decompress_pipeline(blob)
    out = Path(args.output) if args.output else Path(args.blob).with_suffix(".csv")
    write_waveform_csv(series, out)
    logger.info("Wrote %d reconstructed samples to %s", len(series), out)
    return EXIT_OK


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="Experiment TOML file")
    parser.add_argument("--seed", type=int, help="Master seed (overrides the config)")
    parser.add_argument("--runs", type=int, help="Monte-Carlo runs (overrides the config)")
    parser.add_argument("--out", help="Output directory (overrides the config)")
    parser.add_argument("--log-level", default="INFO", help="Logging level (default INFO)")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    parser.add_argument("-q", "--quiet", action="store_true", help="Warnings and errors only")
    parser.add_argument("--progress", action="store_true", help="Show progress bars")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cpow", description="Innovation-based fault detection and compression of CPOW data"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, handler: Callable[[argparse.Namespace], int], help_text: str):
        command = sub.add_parser(name, help=help_text, description=help_text)
        _common(command)
        command.set_defaults(handler=handler)
        return command

    simulate = add("simulate", cmd_simulate, "Simulate relay waveforms of a scenario to CSV")
    simulate.add_argument("--scenario", help="Preset name or scenario TOML")
    simulate.add_argument("--no-fault", action="store_true", help="Simulate the no-fault twin")

    train = add("train", cmd_train, "Train an innovation model for one relay")
    train.add_argument("--scenario", help="Preset name or scenario TOML")
    train.add_argument("--relay", default="R3", help="Relay to train for (default R3)")
    train.add_argument("--method", choices=("ar", "neural"), default="ar")
    train.add_argument("--input", help="Training CSV instead of a simulated run")
    train.add_argument("--f0", type=float, default=60.0, help="Fundamental of CSV input in Hz")
    train.add_argument("--model", help="Model output path")

    calibrate = add("calibrate", cmd_calibrate, "Calibrate every method to the target FPR")
    calibrate.add_argument("--scenario", help="Preset name or scenario TOML")

    detect = add("detect", cmd_detect, "Run one detector on a waveform CSV")
    detect.add_argument("--input", required=True, help="Waveform CSV")
    detect.add_argument("--method", choices=("isfd", "conventional", "aocr"), default="isfd")
    detect.add_argument("--model", help="AR innovation model JSON (isfd)")
    detect.add_argument("--t-start", type=float, help="Test instant / window start in seconds")
    detect.add_argument("--pickup", type=float, help="Pickup current in A (conventional)")
    detect.add_argument("--i-fault-min", type=float, help="Zone minimum fault current in A (aocr)")
    detect.add_argument("--f0", type=float, default=60.0, help="Fundamental in Hz (block length)")

    add("evaluate", cmd_evaluate, "Run the Monte-Carlo experiment and write reports")

    compress = add("compress", cmd_compress, "Compress a waveform to a blob")
    compress.add_argument("--scenario", help="Preset name or scenario TOML")
    compress.add_argument("--input", help="Waveform CSV instead of a simulated run")
    compress.add_argument("--train", help="Anomaly-free CSV for the band models (with --input)")
    compress.add_argument("--f0", type=float, default=60.0, help="Fundamental of CSV input in Hz")
    compress.add_argument("--distortion", type=float, help="Target MSE in A^2")
    compress.add_argument("--blob", help="Blob output path")

    decompress = add("decompress", cmd_decompress, "Rebuild a waveform CSV from a blob")
    decompress.add_argument("--blob", required=True, help="Blob path")
    decompress.add_argument("--output", help="CSV output path")

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = "DEBUG" if args.verbose else "WARNING" if args.quiet else args.log_level
    try:
        configure_logging(level)
        return args.handler(args)
    except (ConfigError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CpowError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

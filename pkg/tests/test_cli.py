"""End-to-end tests of the ``cpow`` command line."""

import json

import pytest

from cpow_innovation.cli import EXIT_CONFIG, EXIT_OK, main
from cpow_innovation.compression.blob import read_blob
from cpow_innovation.ingest.csv_reader import read_waveform_csv
from cpow_innovation.isfd.detector import IsfdConfig


@pytest.fixture
def simulated(fast_scenario_path, tmp_path):
    """Fault run with seed 0 and a no-fault run with seed 7, one CSV per relay."""
    fault_dir = tmp_path / "fault"
    clean_dir = tmp_path / "clean"
    scenario = str(fast_scenario_path)
    assert main(["simulate", "--scenario", scenario, "--out", str(fault_dir), "-q"]) == EXIT_OK
    clean = ["simulate", "--scenario", scenario, "--no-fault", "--seed", "7"]
    assert main(clean + ["--out", str(clean_dir), "-q"]) == EXIT_OK
    return fault_dir, clean_dir


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "cpow" in capsys.readouterr().out


def test_unknown_flag():
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--frobnicate"])
    assert exc.value.code == 2


def test_missing_config(tmp_path, capsys):
    code = main(["simulate", "--config", str(tmp_path / "absent.toml"), "-q"])
    assert code == EXIT_CONFIG
    assert "not found" in capsys.readouterr().err


def test_simulate_writes_every_relay(simulated):
    fault_dir, clean_dir = simulated
    for directory in (fault_dir, clean_dir):
        assert sorted(p.name for p in directory.glob("*.csv")) == [f"R{i}.csv" for i in range(1, 6)]
    dataset = read_waveform_csv(fault_dir / "R3.csv")
    assert dataset.series.sample_rate == pytest.approx(6000.0, rel=1e-6)


def test_compress_and_decompress(simulated, tmp_path, capsys):
    fault_dir, clean_dir = simulated
    blob = tmp_path / "r3.cpw"
    capsys.readouterr()
    code = main(
        [
            "compress",
            "--input",
            str(fault_dir / "R3.csv"),
            "--train",
            str(clean_dir / "R3.csv"),
            "--blob",
            str(blob),
            "-q",
        ]
    )
    assert code == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["mse"] <= 1.15 * report["D_target"]
    assert report["compression_ratio"] > 1.0
    assert blob.exists()

    restored = tmp_path / "r3_restored.csv"
    assert main(["decompress", "--blob", str(blob), "--output", str(restored), "-q"]) == EXIT_OK
    original = read_waveform_csv(fault_dir / "R3.csv").series
    assert len(read_waveform_csv(restored).series) == len(original)


def test_compress_csv_needs_training_data(simulated):
    fault_dir, _ = simulated
    assert main(["compress", "--input", str(fault_dir / "R3.csv"), "-q"]) == EXIT_CONFIG


def test_decompress_rejects_garbage(tmp_path):
    path = tmp_path / "garbage.cpw"
    path.write_bytes(b"not a blob at all")
    assert main(["decompress", "--blob", str(path), "-q"]) == EXIT_CONFIG


def test_train_then_detect(fast_scenario_path, simulated, tmp_path, capsys):
    fault_dir, _ = simulated
    model = tmp_path / "model_R5.json"
    code = main(
        [
            "train",
            "--scenario",
            str(fast_scenario_path),
            "--relay",
            "R5",
            "--model",
            str(model),
            "-q",
        ]
    )
    assert code == EXIT_OK
    assert json.loads(model.read_text(encoding="utf-8"))["order"] > 0

    capsys.readouterr()
    code = main(
        [
            "detect",
            "--input",
            str(fault_dir / "R5.csv"),
            "--model",
            str(model),
            "--t-start",
            "10.5",
            "-q",
        ]
    )
    assert code == EXIT_OK
    outcome = json.loads(capsys.readouterr().out)
    assert outcome["decision"] in ("H0", "H1")
    assert outcome["samples_consumed"] in IsfdConfig().window_sizes()


def test_detect_conventional_needs_pickup(simulated):
    fault_dir, _ = simulated
    args = ["detect", "--input", str(fault_dir / "R4.csv"), "--method", "conventional"]
    code = main(args + ["--t-start", "10.5"])
    assert code == EXIT_CONFIG


def test_detect_conventional(simulated, capsys):
    fault_dir, _ = simulated
    capsys.readouterr()
    code = main(
        [
            "detect",
            "--input",
            str(fault_dir / "R4.csv"),
            "--method",
            "conventional",
            "--t-start",
            "10.5",
            "--pickup",
            "100000.0",
            "-q",
        ]
    )
    assert code == EXIT_OK
    outcome = json.loads(capsys.readouterr().out)
    assert outcome["decision"] == "H0"
    assert outcome["method"] == "conventional"


def test_compress_suppresses_only_when_analytics_say_normal(simulated, tmp_path, capsys):
    fault_dir, clean_dir = simulated
    config = tmp_path / "suppress.toml"
    config.write_text("[compression]\nsuppress_when_normal = [2, 3]\n", encoding="utf-8")
    blob_path = tmp_path / "r3.cpw"
    args = ["compress", "--config", str(config), "--input", str(fault_dir / "R3.csv")]
    args += ["--train", str(clean_dir / "R3.csv"), "--blob", str(blob_path), "-q"]
    assert main(args) == EXIT_OK
    header = read_blob(blob_path).header
    assert header["state_flags"]
    expected = [] if any(header["state_flags"]) else [2, 3]
    assert header["suppressed"] == expected


@pytest.mark.parametrize("subcommand", ["train", "compress"])
def test_unknown_relay(fast_scenario_path, tmp_path, subcommand, capsys):
    config = tmp_path / "relay.toml"
    config.write_text('[compression]\nrelay = "R9"\n', encoding="utf-8")
    args = [subcommand, "--scenario", str(fast_scenario_path), "--config", str(config), "-q"]
    if subcommand == "train":
        args += ["--relay", "R9", "--model", str(tmp_path / "m.json")]
    else:
        args += ["--blob", str(tmp_path / "r9.cpw")]
    assert main(args) == EXIT_CONFIG
    assert "Available relays" in capsys.readouterr().err

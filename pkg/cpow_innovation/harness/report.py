"""Machine-readable experiment outputs."""

import logging
from pathlib import Path
from typing import List, Union

import pandas as pd

from cpow_innovation.harness.experiment import RunArtifacts
from cpow_innovation.harness.metrics import MetricsReport

logger = logging.getLogger(__name__)

HIST_COLUMNS = ["condition", "bin_left", "bin_right", "count"]
SCATTER_COLUMNS = ["run", "condition", "statistic", "threshold"]


def _directory(path: Union[str, Path]) -> Path:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path


def emit_report(report: MetricsReport, directory: Union[str, Path]) -> List[Path]:
    """Write ``metrics.json`` and ``metrics.csv``.

    Raises:
        OSError: If the directory cannot be written
    """
    out = _directory(directory)
    json_path = out / "metrics.json"
    json_path.write_text(report.to_json() + "\n", encoding="utf-8")
    csv_path = out / "metrics.csv"
    report.to_frame().to_csv(csv_path, index=False, float_format="%.6g")
    logger.info("Wrote %s and %s", json_path, csv_path)
    return [json_path, csv_path]


def emit_plotdata(artifacts: RunArtifacts, directory: Union[str, Path]) -> List[Path]:
    """Write innovation histograms and decision-statistic scatter data.

    Files are ``innovation_hist_<relay>.csv`` and ``stats_scatter_<relay>_<method>.csv``.
    """
    out = _directory(directory)
    written = []
    edges = artifacts.bin_edges
    for relay, per_condition in sorted(artifacts.histograms.items()):
        rows = [
            {"condition": condition, "bin_left": edges[i], "bin_right": edges[i + 1], "count": int(n)}
            for condition, counts in sorted(per_condition.items())
            for i, n in enumerate(counts)
        ]
        path = out / f"innovation_hist_{relay}.csv"
        pd.DataFrame(rows, columns=HIST_COLUMNS).to_csv(path, index=False)
        written.append(path)

    scatter = pd.DataFrame(
        artifacts.scatter, columns=["relay", "method"] + SCATTER_COLUMNS
    )
    for (relay, method), group in scatter.groupby(["relay", "method"], sort=True):
        path = out / f"stats_scatter_{relay}_{method}.csv"
        group[SCATTER_COLUMNS].to_csv(path, index=False, float_format="%.8g")
        written.append(path)
    logger.info("Wrote %d plot-data files to %s", len(written), out)
    return written

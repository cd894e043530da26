"""CSV ingestion of measured waveform profiles."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from cpow_innovation.errors import ParseError
from cpow_innovation.waveform.series import WaveformSeries

logger = logging.getLogger(__name__)

# maximum relative deviation of any timestamp step from the median step
SPACING_TOLERANCE = 1e-6


@dataclass(frozen=True)
class Dataset:
    """A parsed measurement profile.

    Attributes:
        series: The uniformly sampled samples
        source_path: File the samples came from
        units: Physical unit of the value column
    """

    series: WaveformSeries
    source_path: str
    units: str = "A"

    def __len__(self) -> int:
        return len(self.series)


def _numeric_column(frame: pd.DataFrame, column: str) -> np.ndarray:
    values = pd.to_numeric(frame[column], errors="coerce").to_numpy(dtype=float)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        row = int(bad[0])
        raise ParseError(f"Non-numeric value {frame[column].iloc[row]!r}", row=row + 1, column=column)
    return values


def read_waveform_csv(
    path: Union[str, Path],
    time_col: str = "time_s",
    value_col: str = "current_a",
    units: str = "A",
) -> Dataset:
    """Read a two-column waveform profile.

    Args:
        path: CSV file with a header row
        time_col: Name of the timestamp column (seconds)
        value_col: Name of the value column
        units: Unit label stored with the dataset

    Returns:
        Dataset with ``sample_rate = 1 / median(Δt)``

    Raises:
        ParseError: On missing columns, non-numeric cells, too few rows or non-uniform spacing

    Example:
        >>> dataset = read_waveform_csv("profile.csv", time_col="t", value_col="i")
        >>> dataset.series.sample_rate
        50.0
    """
    path = Path(path)
    frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    for column in (time_col, value_col):
        if column not in frame.columns:
            available = ", ".join(frame.columns)
            raise ParseError(f"Column {column} not found. Available columns: {available}", column=column)
    if len(frame) < 2:
        raise ParseError(f"Need at least 2 data rows, found {len(frame)} in {path}")

    times = _numeric_column(frame, time_col)
    values = _numeric_column(frame, value_col)

    steps = np.diff(times)
    step = float(np.median(steps))
    if not step > 0:
        raise ParseError(f"Timestamps are not increasing (median step {step})", column=time_col)
    jitter = np.abs(steps - step) / step
    bad = np.flatnonzero(jitter >= SPACING_TOLERANCE)
    if bad.size:
        row = int(bad[0]) + 2
        raise ParseError(
            f"Non-uniform timestamp spacing: step {steps[bad[0]]} vs median {step}",
            row=row,
            column=time_col,
        )

    series = WaveformSeries(values, 1.0 / step, float(times[0]), {"source": str(path)})
    logger.info("Read %d samples at %.6g Hz from %s", len(series), series.sample_rate, path)
    return Dataset(series, str(path), units)


def write_waveform_csv(series: WaveformSeries, path: Union[str, Path]) -> Path:
    """Write a series as ``time_s,current_a`` CSV."""
    return series.to_csv(path)

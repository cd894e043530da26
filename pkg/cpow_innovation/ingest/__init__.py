"""Reading measured profiles and resampling them into trajectories."""

from cpow_innovation.ingest.bootstrap import block_bootstrap
from cpow_innovation.ingest.csv_reader import Dataset, read_waveform_csv, write_waveform_csv

__all__ = ["Dataset", "block_bootstrap", "read_waveform_csv", "write_waveform_csv"]

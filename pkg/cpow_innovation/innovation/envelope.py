"""Fundamental-envelope front end of the analytic extractor."""

import numpy as np

from cpow_innovation.multirate import decimate, design_stages, largest_factorable, total_delay_samples
from cpow_innovation.waveform.series import WaveformSeries

DEFAULT_ENVELOPE_BANDWIDTH = 20.0


def envelope_decimation(sample_rate: float, bandwidth: float) -> int:
    """Decimation bringing the fundamental subband down to about ``2·bandwidth``."""
    limit = int(np.floor(sample_rate / (2.0 * bandwidth)))
    if limit < 1:
        raise ValueError(f"Envelope bandwidth {bandwidth} Hz too wide for {sample_rate} Hz sampling")
    return largest_factorable(limit)


def fundamental_envelope(
    x: WaveformSeries,
    fundamental_freq: float,
    bandwidth: float = DEFAULT_ENVELOPE_BANDWIDTH,
    filter_taps: int = 255,
) -> WaveformSeries:
    """Demodulate the fundamental and return its amplitude ``2|z|`` at the decimated rate.

    Only fully settled output samples are returned; ``t0`` of the result is the
    delay-compensated time of its first sample.
    """
    fs = x.sample_rate
    decimation = envelope_decimation(fs, bandwidth)
    stages = design_stages(fs, decimation, bandwidth / 2.0, filter_taps)
    delay = total_delay_samples(stages, fs)

    t = np.arange(len(x)) / fs
    baseband = decimate(x.samples * np.exp(-2j * np.pi * fundamental_freq * (t + x.t0)), stages)
    first = -(-2 * delay // decimation)
    last = (len(x) - 1) // decimation
    if last < first:
        raise ValueError(
            f"Series of {len(x)} samples too short for the envelope filters "
            f"({2 * delay} samples to settle)"
        )
    amplitude = 2.0 * np.abs(baseband[first : last + 1])
    t0 = x.t0 + (first * decimation - delay) / fs
    return WaveformSeries(
        amplitude,
        fs / decimation,
        t0,
        {"decimation": decimation, "delay_samples": delay, "fundamental_freq": fundamental_freq},
    )

"""Moving-block bootstrap resampling."""

from typing import TYPE_CHECKING, Optional

import numpy as np

if TYPE_CHECKING:
    from cpow_innovation.waveform.series import WaveformSeries


def block_bootstrap(
    series: "WaveformSeries",
    block_len: int,
    n: int,
    seed: Optional[int] = None,
) -> np.ndarray:
    """Resample a series by concatenating randomly placed contiguous blocks.

    Args:
        series: Source series
        block_len: Samples per block
        n: Number of samples to return
        seed: Seed for the block start draws

    Returns:
        ``n`` samples made of ⌈n/block_len⌉ blocks, truncated to ``n``

    Raises:
        ValueError: If ``block_len`` exceeds the source length or arguments are not positive
    """
    source = series.samples
    if block_len < 1:
        raise ValueError(f"block_len must be positive, got {block_len}")
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if block_len > source.size:
        raise ValueError(f"block_len {block_len} exceeds source length {source.size}")

    rng = np.random.default_rng(seed)
    n_blocks = -(-n // block_len)
    starts = rng.integers(0, source.size - block_len + 1, size=n_blocks)
    index = (starts[:, None] + np.arange(block_len)[None, :]).reshape(-1)
    return source[index[:n]].copy()

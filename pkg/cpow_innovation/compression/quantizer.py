"""Uniform scalar quantization of Gaussian samples and index packing."""

import math
from dataclasses import dataclass
from typing import Any, Dict, Sequence, Tuple

import numpy as np

LOADING_FACTOR = 4.0
MAX_BITS = 24


def levels_for_rate(rate: float) -> int:
    """Number of levels ``2^ceil(rate / ln 2)`` for a rate in nats per sample."""
    if rate < 0:
        raise ValueError(f"rate must be non-negative, got {rate}")
    bits = int(math.ceil(rate / math.log(2.0) - 1e-12)) if rate > 0 else 0
    return 2 ** min(bits, MAX_BITS)


@dataclass(frozen=True)
class Codebook:
    """Uniform midrise codebook spanning ``center ± 4·scale``.

    Attributes:
        levels: Number of reconstruction points
        center: Mean of the quantized variable
        scale: Standard deviation the span is loaded for
    """

    levels: int
    center: float = 0.0
    scale: float = 1.0

    def __post_init__(self) -> None:
        if self.levels < 1 or self.levels & (self.levels - 1):
            raise ValueError(f"levels must be a power of two, got {self.levels}")
        if self.scale < 0:
            raise ValueError(f"scale must be non-negative, got {self.scale}")

    @classmethod
    def from_rate(cls, rate: float, center: float = 0.0, scale: float = 1.0) -> "Codebook":
        return cls(levels_for_rate(rate), center, scale)

    @property
    def bits(self) -> int:
        """Bits per index."""
        return self.levels.bit_length() - 1

    @property
    def low(self) -> float:
        return self.center - LOADING_FACTOR * self.scale

    @property
    def step(self) -> float:
        return 2.0 * LOADING_FACTOR * self.scale / self.levels

    @property
    def points(self) -> np.ndarray:
        return self.low + (np.arange(self.levels) + 0.5) * self.step

    def index(self, values: Any) -> np.ndarray:
        """Nearest reconstruction point; values outside the span map to the end cells."""
        values = np.asarray(values, dtype=float)
        if self.levels == 1 or self.step == 0:
            return np.zeros(values.shape, dtype=np.int64)
        cells = np.floor((values - self.low) / self.step)
        return np.clip(cells, 0, self.levels - 1).astype(np.int64)

    def value(self, indices: Any) -> np.ndarray:
        indices = np.asarray(indices, dtype=np.int64)
        if indices.size and (indices.min() < 0 or indices.max() >= self.levels):
            raise ValueError(f"Quantizer index outside [0, {self.levels})")
        return self.low + (indices + 0.5) * self.step

    def to_dict(self) -> Dict[str, Any]:
        return {"levels": self.levels, "center": self.center, "scale": self.scale}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Codebook":
        return cls(int(data["levels"]), float(data["center"]), float(data["scale"]))


def quantize_gaussian(z: Sequence[float], rate_per_sample: float) -> Tuple[np.ndarray, Codebook]:
    """Quantize samples with a uniform codebook loaded to ±4 sample standard deviations.

    At rate 0 the single reconstruction point is the sample mean.

    Example:
        >>> z = np.random.default_rng(0).standard_normal(1000)
        >>> indices, codebook = quantize_gaussian(z, np.log(8))
        >>> codebook.levels
        8
    """
    z = np.asarray(z, dtype=float)
    center = float(z.mean()) if z.size else 0.0
    scale = float(z.std()) if z.size else 0.0
    codebook = Codebook.from_rate(rate_per_sample, center, scale)
    return codebook.index(z), codebook


def dequantize(indices: Sequence[int], codebook: Codebook) -> np.ndarray:
    return codebook.value(indices)


def pack_indices(indices: Sequence[int], bits: int) -> bytes:
    """Pack indices MSB-first with ``bits`` bits each."""
    indices = np.asarray(indices, dtype=np.uint64)
    if bits == 0 or indices.size == 0:
        return b""
    shifts = np.arange(bits - 1, -1, -1, dtype=np.uint64)
    matrix = ((indices[:, None] >> shifts) & np.uint64(1)).astype(np.uint8)
    return np.packbits(matrix.reshape(-1)).tobytes()


def unpack_indices(data: bytes, bits: int, count: int) -> np.ndarray:
    """Inverse of :func:`pack_indices`."""
    if bits == 0 or count == 0:
        return np.zeros(count, dtype=np.int64)
    needed = -(-bits * count // 8)
    if len(data) < needed:
        raise ValueError(f"Payload holds {len(data)} bytes, {needed} needed")
    flat = np.unpackbits(np.frombuffer(data, dtype=np.uint8, count=needed))[: bits * count]
    weights = 1 << np.arange(bits - 1, -1, -1, dtype=np.int64)
    return flat.reshape(count, bits).astype(np.int64) @ weights

"""Subband coding with innovation-domain rate-distortion allocation."""

from cpow_innovation.compression.allocation import RateAllocation, allocate_distortion, rate_distortion
from cpow_innovation.compression.blob import CompressedBlob, read_blob, write_blob
from cpow_innovation.compression.pipeline import (
    CompressionReport,
    compress_pipeline,
    compression_report,
    decompress_pipeline,
    fit_subband_models,
    reconstruction_noise_gain,
)
from cpow_innovation.compression.quantizer import Codebook, dequantize, quantize_gaussian
from cpow_innovation.compression.subband import (
    SubbandPlan,
    SubbandSignal,
    settled_slice,
    subband_decompose,
    subband_reconstruct,
)

__all__ = [
    "Codebook",
    "CompressedBlob",
    "CompressionReport",
    "RateAllocation",
    "SubbandPlan",
    "SubbandSignal",
    "allocate_distortion",
    "compress_pipeline",
    "compression_report",
    "decompress_pipeline",
    "dequantize",
    "fit_subband_models",
    "quantize_gaussian",
    "rate_distortion",
    "read_blob",
    "reconstruction_noise_gain",
    "settled_slice",
    "subband_decompose",
    "subband_reconstruct",
    "write_blob",
]

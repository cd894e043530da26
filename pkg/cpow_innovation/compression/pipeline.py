"""End-to-end innovation-based compression.

Encoder: harmonic subbands → real and imaginary band sequences → AR innovations per band →
inverse water-filling over innovation variances → closed-loop predictive quantization →
blob. The decoder runs the same predictors on the reconstructed past, so the band
reconstruction error equals the quantization error of the innovations.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from cpow_innovation.compression.allocation import RateAllocation, allocate_distortion
from cpow_innovation.compression.blob import CompressedBlob
from cpow_innovation.compression.quantizer import Codebook, pack_indices, unpack_indices
from cpow_innovation.compression.subband import (
    SubbandPlan,
    SubbandSignal,
    settled_slice,
    subband_decompose,
    subband_reconstruct,
)
from cpow_innovation.errors import ConfigError, DegenerateInputError, ParseError
from cpow_innovation.innovation.ar_model import (
    ArInnovationModel,
    estimate_ar_model,
    prediction_residuals,
)
from cpow_innovation.waveform.series import WaveformSeries

logger = logging.getLogger(__name__)

BLOB_FORMAT = "cpow-compressed-waveform"
BLOB_VERSION = 1
DEFAULT_BAND_ORDER = 2
RAW_SAMPLE_BITS = 16
_STD_FLOOR = 1e-9
_PARTS = ("re", "im")


def band_name(harmonic: int, part: str) -> str:
    return f"k{harmonic}.{part}"


def reconstruction_noise_gain(plan: SubbandPlan) -> float:
    """Fraction of white band-rate noise power surviving the reconstruction filters."""
    gain = 1.0
    for stage in plan.stages():
        gain *= stage.factor * float(np.sum(np.square(stage.taps)))
    return gain


def _settled_band_range(plan: SubbandPlan, length: int) -> Tuple[int, int]:
    # band sample j sits at input index j·decimation - delay
    delay = plan.delay_samples
    first = -(-2 * delay // plan.decimation)
    last = (length - 1) // plan.decimation + 1
    return first, last


def _band_parts(band: SubbandSignal) -> Dict[str, np.ndarray]:
    return {"re": np.real(band.baseband).copy(), "im": np.imag(band.baseband).copy()}


def _band_series(
    values: np.ndarray, band: SubbandSignal, plan: SubbandPlan, offset: int
) -> WaveformSeries:
    t0 = band.metadata["t0"] + (offset * plan.decimation - band.metadata["delay_samples"]) / plan.fs
    return WaveformSeries(values, band.rate, t0)


def fit_subband_models(
    train: WaveformSeries,
    plan: SubbandPlan,
    order: int = DEFAULT_BAND_ORDER,
) -> Dict[str, ArInnovationModel]:
    """Fit one AR innovation model per real band on anomaly-free data.

    Only settled band samples enter the fit. A band without variation gets an
    order-0 model.

    Returns:
        Mapping band name (``k<harmonic>.re`` / ``k<harmonic>.im``) → model
    """
    first, last = _settled_band_range(plan, len(train))
    if last - first < max(10 * order, 2):
        raise ValueError(
            f"Training series gives {max(last - first, 0)} settled subband samples; "
            f"{max(10 * order, 2)} needed"
        )
    models = {}
    for band in subband_decompose(train, plan):
        for part, values in _band_parts(band).items():
            series = _band_series(values[first:last], band, plan, first)
            name = band_name(band.harmonic, part)
            try:
                models[name] = estimate_ar_model(series, order, envelope_mode=False)
            except DegenerateInputError:
                logger.debug("Band %s has no variation; using an order-0 model", name)
                models[name] = ArInnovationModel(0, (), _STD_FLOOR, float(np.mean(values[first:last])))
    return models


def _closed_loop(
    y: np.ndarray,
    model: ArInnovationModel,
    warmup: np.ndarray,
    codebook: Codebook,
) -> Tuple[np.ndarray, np.ndarray]:
    a = np.asarray(model.ar_coeffs)
    p = model.order
    recon = np.empty_like(y)
    recon[:p] = warmup
    indices = np.zeros(y.size - p, dtype=np.int64)
    for t in range(p, y.size):
        past = recon[t - p : t][::-1] - model.mean
        prediction = model.mean + float(a @ past)
        index = int(codebook.index(y[t] - prediction))
        indices[t - p] = index
        recon[t] = prediction + float(codebook.value(index))
    return indices, recon


def _closed_loop_decode(
    indices: np.ndarray, model: ArInnovationModel, warmup: np.ndarray, codebook: Codebook
) -> np.ndarray:
    a = np.asarray(model.ar_coeffs)
    p = model.order
    residuals = codebook.value(indices)
    recon = np.empty(p + indices.size)
    recon[:p] = warmup
    for t in range(p, recon.size):
        past = recon[t - p : t][::-1] - model.mean
        recon[t] = model.mean + float(a @ past) + residuals[t - p]
    return recon


def operational_rate(innovation_var: float, distortion: float, coeffs: Sequence[float]) -> float:
    """Rate in nats whose uniform quantizer meets ``distortion`` in the closed loop."""
    sigma_q = math.sqrt(innovation_var + distortion * float(np.sum(np.square(coeffs))))
    return max(0.0, math.log(8.0 * sigma_q / math.sqrt(12.0 * distortion)))


def compress_pipeline(
    x: WaveformSeries,
    plan: SubbandPlan,
    D_target: float,
    models: Mapping[str, ArInnovationModel],
    state_flags: Optional[Sequence[bool]] = None,
    suppress_when_normal: Sequence[int] = (),
) -> CompressedBlob:
    """Compress a waveform to a target mean squared error.

    Args:
        x: Waveform at ``plan.fs``
        plan: Subband layout
        D_target: Target waveform MSE in A²
        models: Per-band innovation models from :func:`fit_subband_models`
        state_flags: Per-block fault flags from local analytics (True = fault); None when
            no analytics ran
        suppress_when_normal: Harmonics (k ≥ 2) dropped when flags are present and all normal

    Returns:
        CompressedBlob

    Raises:
        ConfigError: If an active band has no model or a suppressed harmonic is the fundamental
        ValueError: If ``D_target`` is not positive
    """
    if D_target <= 0:
        raise ValueError(f"D_target must be positive, got {D_target}")
    if any(k < 2 or k > plan.m for k in suppress_when_normal):
        raise ConfigError(
            f"Only harmonics 2..{plan.m} can be suppressed, got {list(suppress_when_normal)}"
        )
    flags = [bool(f) for f in (state_flags or [])]
    all_normal = bool(flags) and not any(flags)
    suppressed = sorted(set(suppress_when_normal)) if all_normal else []

    bands = [b for b in subband_decompose(x, plan) if b.harmonic not in suppressed]
    first, last = _settled_band_range(plan, len(x))
    entries: List[Dict[str, Any]] = []
    sequences: List[np.ndarray] = []
    variances: List[float] = []
    for band in bands:
        for part, values in _band_parts(band).items():
            name = band_name(band.harmonic, part)
            if name not in models:
                raise ConfigError(f"No innovation model for active subband {name}")
            model = models[name]
            model.validate()
            residuals = prediction_residuals(model, values)[model.order :]
            settled = residuals[max(first - model.order, 0) : max(last - model.order, 0)]
            variance = float(np.var(settled if settled.size else residuals)) + _STD_FLOOR**2
            entries.append({"name": name, "harmonic": band.harmonic, "part": part})
            sequences.append(values)
            variances.append(variance)

    noise_gain = reconstruction_noise_gain(plan)
    allocation = allocate_distortion(variances, D_target / (2.0 * noise_gain))

    payloads = []
    total_bits = 0
    for entry, values, variance, distortion, rate in zip(
        entries, sequences, variances, allocation.distortions, allocation.rates
    ):
        model = models[entry["name"]]
        entry.update({"count": int(values.size), "mean": float(np.mean(values))})
        if rate <= 0:
            entry["coded"] = False
            payloads.append(b"")
            continue
        coded_rate = operational_rate(variance, distortion, model.ar_coeffs)
        sigma_q = math.sqrt(variance + distortion * float(np.sum(np.square(model.ar_coeffs))))
        codebook = Codebook.from_rate(coded_rate, 0.0, sigma_q)
        warmup = values[: model.order]
        indices, _ = _closed_loop(values, model, warmup, codebook)
        payload = pack_indices(indices, codebook.bits)
        total_bits += codebook.bits * indices.size
        entry.update(
            {
                "coded": True,
                "codebook": codebook.to_dict(),
                "warmup": [float(w) for w in warmup],
                "model": model.to_dict(),
            }
        )
        payloads.append(payload)

    header = {
        "format": BLOB_FORMAT,
        "version": BLOB_VERSION,
        "plan": plan.to_dict(),
        "length": len(x),
        "t0": x.t0,
        "D_target": D_target,
        "noise_gain": noise_gain,
        "allocation": allocation.to_dict(),
        "state_flags": flags,
        "suppressed": suppressed,
        "bands": entries,
        "payload_bits": total_bits,
    }
    logger.info(
        "Compressed %d samples into %d coded bands: RD rate %.3f bits per band sample, %d payload bits",
        len(x),
        sum(1 for e in entries if e["coded"]),
        allocation.total_bits,
        total_bits,
    )
    return CompressedBlob(header, payloads)


def decompress_pipeline(blob: CompressedBlob) -> WaveformSeries:
    """Rebuild the waveform from a blob.

    Raises:
        ParseError: If the header is not a compressed-waveform header or a payload is missing
    """
    header = blob.header
    if header.get("format") != BLOB_FORMAT:
        raise ParseError(f"Unsupported blob format {header.get('format')!r}")
    if int(header.get("version", 0)) > BLOB_VERSION:
        raise ParseError(f"Unsupported blob version {header['version']}")
    if len(blob.payloads) != len(header["bands"]):
        raise ParseError(f"Blob holds {len(blob.payloads)} payloads for {len(header['bands'])} bands")
    plan = SubbandPlan.from_dict(header["plan"])

    parts: Dict[int, Dict[str, np.ndarray]] = {}
    count = 0
    for entry, payload in zip(header["bands"], blob.payloads):
        count = int(entry["count"])
        if entry["coded"]:
            model = ArInnovationModel.from_dict(entry["model"])
            codebook = Codebook.from_dict(entry["codebook"])
            indices = unpack_indices(payload, codebook.bits, count - model.order)
            values = _closed_loop_decode(indices, model, np.asarray(entry["warmup"]), codebook)
        else:
            values = np.full(count, float(entry["mean"]))
        parts.setdefault(int(entry["harmonic"]), {})[entry["part"]] = values

    rate = plan.rate
    subbands = []
    for harmonic, pair in sorted(parts.items()):
        zeros = np.zeros(count)
        baseband = pair.get("re", zeros) + 1j * pair.get("im", zeros)
        subbands.append(SubbandSignal(baseband, harmonic * plan.f0, rate, harmonic))
    return subband_reconstruct(subbands, plan, int(header["length"]), float(header["t0"]))


@dataclass(frozen=True)
class CompressionReport:
    """Rate and distortion of one compressed waveform.

    Attributes:
        rd_rate_nats: Rate-distortion total rate per band sample vector (nats)
        rd_rate_bits: Same in bits
        payload_bits: Quantized bits actually transmitted
        payload_bytes: Packed payload size
        blob_bytes: Serialized blob size including the header
        compression_ratio: 16-bit raw size over blob size
        mse: Reconstruction MSE over the settled interior
        D_target: Requested MSE
    """

    rd_rate_nats: float
    rd_rate_bits: float
    payload_bits: int
    payload_bytes: int
    blob_bytes: int
    compression_ratio: float
    mse: float
    D_target: float

    def to_dict(self) -> Dict[str, Any]:
        return dict(self.__dict__)


def compression_report(x: WaveformSeries, blob: CompressedBlob) -> CompressionReport:
    """Decompress ``blob`` and measure it against the original waveform."""
    recon = decompress_pipeline(blob)
    plan = SubbandPlan.from_dict(blob.header["plan"])
    interior = settled_slice(plan, len(x))
    error = x.samples[interior] - recon.samples[interior]
    allocation = RateAllocation.from_dict(blob.header["allocation"])
    blob_bytes = len(blob.to_bytes())
    return CompressionReport(
        rd_rate_nats=allocation.total_rate,
        rd_rate_bits=allocation.total_bits,
        payload_bits=int(blob.header.get("payload_bits", 0)),
        payload_bytes=blob.payload_bytes,
        blob_bytes=blob_bytes,
        compression_ratio=RAW_SAMPLE_BITS * len(x) / (8.0 * blob_bytes),
        mse=float(np.mean(np.square(error))) if error.size else float("nan"),
        D_target=float(blob.header["D_target"]),
    )

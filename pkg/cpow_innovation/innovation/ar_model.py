"""Analytic innovation autoencoder for Gaussian autoregressive streams.

The encoder whitens with the one-step prediction error and squashes through the
normal CDF; the decoder runs the AR recursion driven by the normal quantile of the
innovations. Both are exact inverses of each other past the warm-up.
"""

import json
import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.signal import lfilter, lfiltic

from cpow_innovation.errors import ConfigError, ModelError
from cpow_innovation.innovation.envelope import DEFAULT_ENVELOPE_BANDWIDTH, fundamental_envelope
from cpow_innovation.innovation.normal import normal_cdf, normal_ppf
from cpow_innovation.innovation.sequence import InnovationMode, InnovationSequence
from cpow_innovation.linear_prediction import (
    autocovariance,
    error_filter,
    is_stable,
    levinson_durbin,
    notch_polynomial,
)
from cpow_innovation.waveform.series import WaveformSeries

logger = logging.getLogger(__name__)

MODEL_FORMAT = "cpow-ar-innovation"
MODEL_VERSION = 1
CLIP_EPS = 1e-12
DEFAULT_NOTCH_RADIUS = 1.0 - 1e-4
NOTCH_MULTIPLICITY = 2


@dataclass(frozen=True)
class ArInnovationModel:
    """Causal AR whitening model ``e_t = (x_t - μ) - Σ a_i (x_{t-i} - μ)``.

    Attributes:
        order: Number of predictor weights p
        ar_coeffs: Predictor weights a_1..a_p
        innovation_std: Prediction-error standard deviation σ
        mean: Process mean μ
        envelope_mode: Whether the model runs on the demodulated fundamental envelope
        fundamental_freq: Grid frequency of the envelope front end or of the annihilated carrier
        sample_rate: Raw sampling rate the model was fitted at (checked on encode)
        envelope_bandwidth: Bandwidth of the envelope front end in Hz
        filter_taps: Tap limit of the envelope front-end filters
    """

    order: int
    ar_coeffs: Tuple[float, ...]
    innovation_std: float
    mean: float = 0.0
    envelope_mode: bool = False
    fundamental_freq: Optional[float] = None
    sample_rate: Optional[float] = None
    envelope_bandwidth: float = DEFAULT_ENVELOPE_BANDWIDTH
    filter_taps: int = 255

    def __post_init__(self) -> None:
        object.__setattr__(self, "ar_coeffs", tuple(float(a) for a in self.ar_coeffs))
        object.__setattr__(self, "order", int(self.order))

    @property
    def warmup(self) -> int:
        return self.order

    def validate(self) -> None:
        """Check the model invariants.

        Raises:
            ModelError: If σ is not positive, a parameter is not finite or the AR law is unstable
        """
        if len(self.ar_coeffs) != self.order:
            raise ModelError(f"Model declares order {self.order} but has {len(self.ar_coeffs)} weights")
        if not np.isfinite(self.innovation_std) or self.innovation_std <= 0:
            raise ModelError(f"innovation_std must be positive, got {self.innovation_std}")
        if not np.isfinite(self.mean) or not np.all(np.isfinite(self.ar_coeffs)):
            raise ModelError("Model parameters must be finite")
        if not is_stable(self.ar_coeffs):
            raise ModelError("AR predictor is not stable (a pole lies on or outside the unit circle)")
        if self.envelope_mode and self.fundamental_freq is None:
            raise ModelError("Envelope-mode model needs a fundamental_freq")

    def front_end(self, x: WaveformSeries) -> WaveformSeries:
        """Map a raw waveform into the domain the AR law describes."""
        if self.sample_rate is not None and not np.isclose(x.sample_rate, self.sample_rate):
            raise ValueError(
                f"Model fitted at {self.sample_rate} Hz cannot encode a {x.sample_rate} Hz series"
            )
        if self.envelope_mode:
            return fundamental_envelope(
                x, self.fundamental_freq, self.envelope_bandwidth, self.filter_taps
            )
        return x

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "order": self.order,
            "ar_coeffs": list(self.ar_coeffs),
            "innovation_std": self.innovation_std,
            "mean": self.mean,
            "envelope_mode": self.envelope_mode,
        }
        if self.fundamental_freq is not None:
            data["fundamental_freq"] = self.fundamental_freq
        if self.sample_rate is not None:
            data["sample_rate"] = self.sample_rate
        if self.envelope_mode:
            data["envelope_bandwidth"] = self.envelope_bandwidth
            data["filter_taps"] = self.filter_taps
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ArInnovationModel":
        if data.get("format", MODEL_FORMAT) != MODEL_FORMAT:
            raise ConfigError(f"Not an AR innovation model document: {data.get('format')}")
        if int(data.get("version", MODEL_VERSION)) > MODEL_VERSION:
            raise ConfigError(f"Unsupported model version {data['version']}")
        fields = {k: v for k, v in data.items() if k not in ("format", "version")}
        try:
            return cls(**fields)
        except TypeError as exc:
            raise ConfigError(f"Invalid model document: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ArInnovationModel":
        return cls.from_dict(json.loads(text))


def _fit_plain(y: np.ndarray, order: int) -> Tuple[np.ndarray, float, float]:
    mean = float(np.mean(y))
    coeffs, _, err = levinson_durbin(autocovariance(y, order), order)
    return coeffs, float(np.sqrt(err)), mean


def estimate_ar_model(
    train: WaveformSeries,
    order: int,
    envelope_mode: bool = True,
    fundamental_freq: Optional[float] = None,
    envelope_bandwidth: float = DEFAULT_ENVELOPE_BANDWIDTH,
    filter_taps: int = 255,
    notch_radius: float = DEFAULT_NOTCH_RADIUS,
) -> ArInnovationModel:
    """Fit an AR innovation model by Levinson-Durbin.

    With ``envelope_mode`` the AR law is fitted to the fundamental envelope. Without it,
    a given ``fundamental_freq`` is annihilated by a fixed double notch whose polynomial is
    folded into the predictor, and the remaining AR(p) factor is fitted to the
    notch-filtered signal.

    Args:
        train: Anomaly-free training series
        order: AR order p of the fitted factor
        envelope_mode: Whiten the demodulated fundamental envelope
        fundamental_freq: Grid frequency in Hz (required for envelope mode)
        envelope_bandwidth: Envelope front-end bandwidth in Hz
        filter_taps: Envelope front-end tap limit
        notch_radius: Zero radius of the carrier notch

    Returns:
        Fitted model

    Raises:
        ConfigError: If envelope mode is requested without a fundamental frequency
        DegenerateInputError: If the training data have no variation
        ValueError: If the training series is shorter than ``10·order`` samples

    Example:
        >>> model = estimate_ar_model(series, order=2, envelope_mode=False)
        >>> model.order
        2
    """
    if order < 0:
        raise ValueError(f"order must be non-negative, got {order}")
    if envelope_mode and fundamental_freq is None:
        raise ConfigError("Envelope-mode estimation needs the fundamental frequency")

    domain = (
        fundamental_envelope(train, fundamental_freq, envelope_bandwidth, filter_taps)
        if envelope_mode
        else train
    )
    y = domain.samples
    if y.size < max(10 * order, 2):
        raise ValueError(f"Need at least {max(10 * order, 2)} training samples, got {y.size}")

    if envelope_mode or fundamental_freq is None:
        coeffs, sigma, mean = _fit_plain(y, order)
        full = coeffs
    else:
        notch = notch_polynomial(fundamental_freq, train.sample_rate, notch_radius, NOTCH_MULTIPLICITY)
        mean = float(np.mean(y))
        filtered = lfilter(notch, [1.0], y - mean)[notch.size - 1 :]
        coeffs, _, err = levinson_durbin(autocovariance(filtered, order), order)
        sigma = float(np.sqrt(err))
        full = -np.convolve(notch, error_filter(coeffs))[1:]

    model = ArInnovationModel(
        order=len(full),
        ar_coeffs=tuple(full),
        innovation_std=sigma,
        mean=mean,
        envelope_mode=envelope_mode,
        fundamental_freq=fundamental_freq,
        sample_rate=train.sample_rate,
        envelope_bandwidth=envelope_bandwidth,
        filter_taps=filter_taps,
    )
    logger.info(
        "Fitted AR(%d) innovation model: sigma=%.4g, mean=%.4g, warm-up %d samples%s",
        model.order,
        sigma,
        mean,
        model.warmup,
        " (envelope)" if envelope_mode else "",
    )
    return model


def prediction_residuals(model: ArInnovationModel, samples: np.ndarray) -> np.ndarray:
    """Causal one-step prediction errors; entries before the warm-up use a zero past."""
    return lfilter(error_filter(model.ar_coeffs), [1.0], np.asarray(samples, dtype=float) - model.mean)


def _encode(model: ArInnovationModel, x: WaveformSeries) -> Tuple[np.ndarray, WaveformSeries]:
    model.validate()
    domain = model.front_end(x)
    if len(domain) <= model.order:
        raise ValueError(f"Series of {len(domain)} samples too short for an AR({model.order}) model")
    return prediction_residuals(model, domain.samples) / model.innovation_std, domain


def encode_gaussian(model: ArInnovationModel, x: WaveformSeries) -> InnovationSequence:
    """Standardized residuals ``e_t / σ`` (Gaussian-mode innovations)."""
    z, domain = _encode(model, x)
    return InnovationSequence(z, InnovationMode.GAUSSIAN, model.warmup, domain.sample_rate, domain.t0)


def encode(model: ArInnovationModel, x: WaveformSeries) -> InnovationSequence:
    """Uniform-mode innovations ``v_t = Φ(e_t / σ)``.

    Strictly causal: ``v_t`` depends on ``x_{t-p..t}`` only. The first ``order``
    values are warm-up.
    """
    z, domain = _encode(model, x)
    return InnovationSequence(
        normal_cdf(z), InnovationMode.UNIFORM, model.warmup, domain.sample_rate, domain.t0
    )


def decode(
    model: ArInnovationModel,
    v: InnovationSequence,
    warmup: Sequence[float],
) -> WaveformSeries:
    """Invert :func:`encode`.

    Args:
        model: Model used for encoding
        v: Uniform-mode innovations (warm-up positions are ignored)
        warmup: The first ``order`` samples of the series

    Returns:
        Reconstructed series in the model's domain; ``metadata["clipped"]`` counts
        innovations clamped away from 0 and 1
    """
    model.validate()
    if v.mode is not InnovationMode.UNIFORM:
        raise ValueError("decode expects uniform-mode innovations")
    head = np.asarray(warmup, dtype=float).reshape(-1)
    p = model.order
    if head.size != p:
        raise ValueError(f"Need {p} warm-up samples, got {head.size}")
    if len(v) < p:
        raise ValueError(f"Innovation sequence shorter than the warm-up ({len(v)} < {p})")

    tail = v.values[p:]
    clipped = int(np.count_nonzero((tail < CLIP_EPS) | (tail > 1.0 - CLIP_EPS)))
    if clipped:
        logger.warning(
            "Clamped %d innovations to [%g, 1-%g] while decoding", clipped, CLIP_EPS, CLIP_EPS
        )
    drive = model.innovation_std * normal_ppf(np.clip(tail, CLIP_EPS, 1.0 - CLIP_EPS))

    centered = head - model.mean
    denominator = error_filter(model.ar_coeffs)
    if p:
        state = lfiltic([1.0], denominator, centered[::-1])
        body = lfilter([1.0], denominator, drive, zi=state)[0]
    else:
        body = drive
    samples = model.mean + np.concatenate((centered, body))
    return WaveformSeries(samples, v.sample_rate, v.t0, {"clipped": clipped})

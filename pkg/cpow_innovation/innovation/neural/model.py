"""Learned innovation autoencoder: causal conv encoder/decoder pair plus block critic."""

import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence

import numpy as np

from cpow_innovation.errors import ConfigError, ModelError
from cpow_innovation.innovation.neural.layers import BlockCritic, CausalConvNet
from cpow_innovation.innovation.sequence import InnovationMode, InnovationSequence
from cpow_innovation.waveform.series import WaveformSeries

MODEL_FORMAT = "cpow-neural-innovation"
MODEL_VERSION = 1


@dataclass
class NeuralInnovationModel:
    """Trained (or freshly initialized) neural innovation autoencoder.

    Attributes:
        encoder: Causal stack mapping samples to innovations in (0, 1)
        decoder: Causal stack mapping innovations back to samples
        critic: Block critic used during training
        input_mean: Training mean subtracted before encoding
        input_scale: Training standard deviation dividing the input
        loss_trace: Per-epoch generator loss recorded by training
        reconstruction_trace: Per-epoch reconstruction MSE recorded by training
        validation_trace: Per-epoch generator loss on the held-out segment
    """

    encoder: CausalConvNet
    decoder: CausalConvNet
    critic: BlockCritic
    input_mean: float = 0.0
    input_scale: float = 1.0
    loss_trace: List[float] = field(default_factory=list)
    reconstruction_trace: List[float] = field(default_factory=list)
    validation_trace: List[float] = field(default_factory=list)

    @property
    def block(self) -> int:
        return self.critic.block

    @property
    def context_length(self) -> int:
        """Receptive field of the encoder."""
        return self.encoder.receptive_field

    def validate(self) -> None:
        params = self.encoder.parameters() + self.decoder.parameters() + self.critic.parameters()
        if not all(np.all(np.isfinite(p)) for p in params):
            raise ModelError("Neural innovation model has non-finite parameters")
        if not np.isfinite(self.input_scale) or self.input_scale <= 0:
            raise ModelError(f"input_scale must be positive, got {self.input_scale}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "encoder": self.encoder.to_dict(),
            "decoder": self.decoder.to_dict(),
            "critic": self.critic.to_dict(),
            "input_mean": self.input_mean,
            "input_scale": self.input_scale,
            "loss_trace": list(self.loss_trace),
            "reconstruction_trace": list(self.reconstruction_trace),
            "validation_trace": list(self.validation_trace),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "NeuralInnovationModel":
        if data.get("format") != MODEL_FORMAT:
            raise ConfigError(f"Not a neural innovation model document: {data.get('format')}")
        return cls(
            CausalConvNet.from_dict(data["encoder"]),
            CausalConvNet.from_dict(data["decoder"]),
            BlockCritic.from_dict(data["critic"]),
            float(data["input_mean"]),
            float(data["input_scale"]),
            list(data.get("loss_trace", [])),
            list(data.get("reconstruction_trace", [])),
            list(data.get("validation_trace", [])),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "NeuralInnovationModel":
        return cls.from_dict(json.loads(text))


def neural_encode(model: NeuralInnovationModel, x: WaveformSeries) -> InnovationSequence:
    """Causal forward pass of the encoder; the first ``context_length - 1`` values are warm-up."""
    model.validate()
    normalized = (x.samples - model.input_mean) / model.input_scale
    v = model.encoder(normalized)
    warmup = min(model.context_length - 1, v.size)
    return InnovationSequence(v, InnovationMode.UNIFORM, warmup, x.sample_rate, x.t0)


def neural_decode(
    model: NeuralInnovationModel,
    v: InnovationSequence,
    context: Sequence[float],
) -> WaveformSeries:
    """Causal forward pass of the decoder.

    Args:
        model: Trained model
        v: Innovations to decode
        context: Innovations immediately preceding ``v``; at least ``receptive field - 1`` values

    Returns:
        Reconstruction of the samples aligned with ``v``

    Raises:
        ValueError: If the context is shorter than the decoder needs
    """
    model.validate()
    context = np.asarray(context, dtype=float).reshape(-1)
    needed = model.decoder.receptive_field - 1
    if context.size < needed:
        raise ValueError(f"Decoder needs {needed} context innovations, got {context.size}")
    full = np.concatenate((context, v.values))
    out = model.decoder(full)[context.size :]
    return WaveformSeries(model.input_mean + model.input_scale * out, v.sample_rate, v.t0)

"""Innovation representations: analytic AR extractor and neural autoencoder."""

from cpow_innovation.innovation.ar_model import (
    ArInnovationModel,
    decode,
    encode,
    encode_gaussian,
    estimate_ar_model,
    prediction_residuals,
)
from cpow_innovation.innovation.envelope import fundamental_envelope
from cpow_innovation.innovation.neural import (
    NeuralHyper,
    NeuralInnovationModel,
    neural_decode,
    neural_encode,
    train_autoencoder,
)
from cpow_innovation.innovation.normal import normal_cdf, normal_ppf
from cpow_innovation.innovation.sequence import InnovationMode, InnovationSequence

__all__ = [
    "ArInnovationModel",
    "InnovationMode",
    "InnovationSequence",
    "NeuralHyper",
    "NeuralInnovationModel",
    "decode",
    "encode",
    "encode_gaussian",
    "estimate_ar_model",
    "fundamental_envelope",
    "neural_decode",
    "neural_encode",
    "normal_cdf",
    "normal_ppf",
    "prediction_residuals",
    "train_autoencoder",
]

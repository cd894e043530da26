"""Neural innovation autoencoder at toy scale."""

from cpow_innovation.innovation.neural.layers import BlockCritic, CausalConvNet
from cpow_innovation.innovation.neural.model import NeuralInnovationModel, neural_decode, neural_encode
from cpow_innovation.innovation.neural.optim import Adam
from cpow_innovation.innovation.neural.training import (
    NeuralHyper,
    best_so_far,
    generator_loss_and_grads,
    holdout_split,
    initialize_model,
    latent_ks,
    reconstruction_mse,
    train_autoencoder,
    validation_loss,
)

__all__ = [
    "Adam",
    "BlockCritic",
    "CausalConvNet",
    "NeuralHyper",
    "NeuralInnovationModel",
    "best_so_far",
    "generator_loss_and_grads",
    "holdout_split",
    "initialize_model",
    "latent_ks",
    "neural_decode",
    "neural_encode",
    "reconstruction_mse",
    "train_autoencoder",
    "validation_loss",
]

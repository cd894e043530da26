"""Adversarial training of the neural innovation autoencoder.

The critic ascends ``E[D(V-block)] - E[D(U-block)]`` (U IID uniform) under weight
clipping; encoder and decoder descend ``E[D(V-block)] + λ_scale · MSE``.
"""

import copy
import logging
from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, List, Mapping, Tuple

import numpy as np
from scipy.stats import kstest
from tqdm import tqdm

from cpow_innovation.config.toml_io import check_keys
from cpow_innovation.errors import ConfigError, TrainingDivergedError
from cpow_innovation.innovation.neural.layers import BlockCritic, CausalConvNet
from cpow_innovation.innovation.neural.model import NeuralInnovationModel
from cpow_innovation.innovation.neural.optim import Adam
from cpow_innovation.waveform.series import WaveformSeries

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NeuralHyper:
    """Training hyper-parameters.

    Attributes:
        layers: Convolution layers per network (L)
        kernel: Kernel width (w)
        hidden: Hidden channels (h)
        block: Critic block length (B)
        lambda_scale: Weight of the reconstruction term
        lr: Adam step size
        epochs: Training epochs
        seed: Random seed
        steps_per_epoch: Generator updates per epoch
        critic_steps: Critic updates per generator update
        critic_hidden: Hidden units of the critic
        clip: Critic weight clipping bound
        segment: Training segment length in samples
        log_every: Epoch interval of INFO progress lines
    """

    layers: int = 3
    kernel: int = 4
    hidden: int = 8
    block: int = 32
    lambda_scale: float = 1.0
    lr: float = 1e-3
    epochs: int = 200
    seed: int = 0
    steps_per_epoch: int = 5
    critic_steps: int = 5
    critic_hidden: int = 32
    clip: float = 0.01
    segment: int = 512
    log_every: int = 50

    def __post_init__(self) -> None:
        if min(self.layers, self.kernel, self.hidden, self.block, self.epochs, self.segment) < 1:
            raise ConfigError("Neural hyper-parameters must be positive integers")
        if self.lambda_scale < 0 or self.lr <= 0 or self.clip <= 0:
            raise ConfigError("lambda_scale must be non-negative; lr and clip positive")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "NeuralHyper":
        check_keys(data, [f.name for f in fields(cls)], "neural")
        return cls(**data)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def initialize_model(hyper: NeuralHyper, rng: np.random.Generator) -> NeuralInnovationModel:
    """Fresh model with small random weights (latent concentrated near 0.5)."""
    encoder = CausalConvNet.initialize(
        hyper.layers, hyper.kernel, hyper.hidden, "sigmoid", rng, gain=0.5
    )
    decoder = CausalConvNet.initialize(hyper.layers, hyper.kernel, hyper.hidden, "linear", rng, gain=0.5)
    critic = BlockCritic.initialize(hyper.block, hyper.critic_hidden, hyper.clip, rng)
    return NeuralInnovationModel(encoder, decoder, critic)


def _blocks(v: np.ndarray, start: int, block: int) -> Tuple[np.ndarray, int]:
    count = (v.size - start) // block
    return v[start : start + count * block].reshape(count, block), count


def generator_loss_and_grads(
    model: NeuralInnovationModel,
    x: np.ndarray,
    lambda_scale: float,
) -> Tuple[float, float, List[np.ndarray], List[np.ndarray], np.ndarray]:
    """Generator objective on one normalized segment.

    Returns:
        Tuple of (total loss, reconstruction MSE, encoder grads, decoder grads, latent values)
    """
    settle = model.encoder.receptive_field - 1
    v, enc_cache = model.encoder.forward(x)
    x_hat, dec_cache = model.decoder.forward(v)

    blocks, count = _blocks(v, settle, model.block)
    if count < 1:
        raise ValueError(f"Segment of {x.size} samples holds no settled block of {model.block}")
    critic_score, d_blocks, _ = model.critic.mean_score_grads(blocks)

    start = settle + model.decoder.receptive_field - 1
    residual = x_hat[start:] - x[start:]
    mse = float(np.mean(residual**2))
    total = critic_score + lambda_scale * mse

    d_x_hat = np.zeros_like(x_hat)
    d_x_hat[start:] = lambda_scale * 2.0 * residual / residual.size
    d_v, dec_grads = model.decoder.backward(dec_cache, d_x_hat)
    d_v[settle : settle + count * model.block] += d_blocks.reshape(-1)
    _, enc_grads = model.encoder.backward(enc_cache, d_v)
    return total, mse, enc_grads, dec_grads, v


def latent_ks(model: NeuralInnovationModel, x: np.ndarray) -> float:
    """KS distance of settled latent values to U[0, 1] on a normalized signal."""
    v = model.encoder(x)[model.encoder.receptive_field - 1 :]
    return float(kstest(v, "uniform").statistic)


def reconstruction_mse(model: NeuralInnovationModel, x: np.ndarray) -> float:
    """Settled reconstruction MSE on a normalized signal."""
    start = model.encoder.receptive_field + model.decoder.receptive_field - 2
    x_hat = model.decoder(model.encoder(x))
    return float(np.mean((x_hat[start:] - x[start:]) ** 2))


def holdout_split(x: np.ndarray, segment: int) -> Tuple[np.ndarray, np.ndarray]:
    """Training part and the trailing validation segment of a normalized signal.

    Short signals that cannot spare a segment train on everything and validate on the tail.
    """
    if x.size >= 2 * segment:
        return x[:-segment], x[-segment:]
    return x, x[-segment:]


def validation_loss(model: NeuralInnovationModel, x: np.ndarray, lambda_scale: float) -> float:
    """Generator objective on a fixed normalized segment with the current critic."""
    return generator_loss_and_grads(model, x, lambda_scale)[0]


def train_autoencoder(
    train: WaveformSeries,
    hyper: NeuralHyper = NeuralHyper(),
    progress: bool = False,
) -> NeuralInnovationModel:
    """Train a neural innovation autoencoder on anomaly-free data.

    Args:
        train: Training series (at least ``10 · block`` samples)
        hyper: Hyper-parameters
        progress: Show a progress bar over epochs

    Returns:
        The model at its lowest validation loss, with per-epoch loss traces

    Raises:
        TrainingDivergedError: If a loss becomes non-finite
    """
    samples = train.samples
    if samples.size < 10 * hyper.block:
        raise ValueError(f"Need at least {10 * hyper.block} training samples, got {samples.size}")
    rng = np.random.default_rng(hyper.seed)
    model = initialize_model(hyper, rng)
    model.input_mean = float(samples.mean())
    model.input_scale = float(samples.std()) or 1.0
    x = (samples - model.input_mean) / model.input_scale

    segment = min(hyper.segment, x.size)
    settle = model.encoder.receptive_field - 1
    if segment - settle < hyper.block:
        raise ConfigError(
            f"Segment {segment} too short for block {hyper.block} after {settle} warm-up samples"
        )
    x, held_out = holdout_split(x, segment)

    gen_opt = Adam(model.encoder.parameters() + model.decoder.parameters(), lr=hyper.lr)
    critic_opt = Adam(model.critic.parameters(), lr=hyper.lr)
    iteration = 0
    best_loss, best_epoch, best_state = np.inf, 0, None

    epochs = range(hyper.epochs)
    if progress:
        epochs = tqdm(epochs, desc="Training autoencoder", unit="epoch")
    for epoch in epochs:
        epoch_loss, epoch_mse = [], []
        for _ in range(hyper.steps_per_epoch):
            iteration += 1
            start = int(rng.integers(0, x.size - segment + 1))
            window = x[start : start + segment]

            v = model.encoder(window)
            fake, count = _blocks(v, settle, hyper.block)
            for _ in range(hyper.critic_steps):
                real = rng.random((count, hyper.block))
                fake_score, _, fake_grads = model.critic.mean_score_grads(fake)
                real_score, _, real_grads = model.critic.mean_score_grads(real)
                gap = fake_score - real_score
                if not np.isfinite(gap):
                    raise TrainingDivergedError(iteration, gap)
                critic_opt.step([f - r for f, r in zip(fake_grads, real_grads)], maximize=True)
                model.critic.clip(hyper.clip)

            loss, mse, enc_grads, dec_grads, _ = generator_loss_and_grads(
                model, window, hyper.lambda_scale
            )
            if not np.isfinite(loss):
                raise TrainingDivergedError(iteration, loss)
            gen_opt.step(enc_grads + dec_grads)
            epoch_loss.append(loss)
            epoch_mse.append(mse)

        model.loss_trace.append(float(np.mean(epoch_loss)))
        model.reconstruction_trace.append(float(np.mean(epoch_mse)))
        checked = validation_loss(model, held_out, hyper.lambda_scale)
        if not np.isfinite(checked):
            raise TrainingDivergedError(iteration, checked)
        model.validation_trace.append(checked)
        if checked < best_loss:
            best_loss, best_epoch = checked, epoch + 1
            best_state = copy.deepcopy((model.encoder, model.decoder, model.critic))
        logger.debug(
            "Epoch %d: loss=%.6g mse=%.6g",
            epoch + 1,
            model.loss_trace[-1],
            model.reconstruction_trace[-1],
        )
        if hyper.log_every and (epoch + 1) % hyper.log_every == 0:
            logger.info(
                "Epoch %d/%d: loss=%.6g mse=%.6g",
                epoch + 1,
                hyper.epochs,
                model.loss_trace[-1],
                epoch_mse[-1],
            )
    model.encoder, model.decoder, model.critic = best_state
    logger.info("Kept epoch %d with validation loss %.6g", best_epoch, best_loss)
    return model


def best_so_far(trace: List[float]) -> List[float]:
    """Running minimum of a loss trace."""
    return np.minimum.accumulate(np.asarray(trace, dtype=float)).tolist() if trace else []

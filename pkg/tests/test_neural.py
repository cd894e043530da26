"""Tests for the neural innovation autoencoder."""

import numpy as np
import pytest

from cpow_innovation.errors import ConfigError, ModelError
from cpow_innovation.innovation.neural import (
    Adam,
    CausalConvNet,
    NeuralHyper,
    NeuralInnovationModel,
    best_so_far,
    generator_loss_and_grads,
    holdout_split,
    initialize_model,
    latent_ks,
    neural_decode,
    neural_encode,
    reconstruction_mse,
    train_autoencoder,
    validation_loss,
)
from cpow_innovation.innovation.sequence import InnovationSequence
from cpow_innovation.waveform.series import WaveformSeries

SMALL = NeuralHyper(layers=3, kernel=3, hidden=4, block=8, critic_hidden=6, epochs=3, segment=64)


@pytest.fixture
def small_model(rng):
    model = initialize_model(SMALL, rng)
    # a stronger critic so the adversarial term shows up in the gradients
    model.critic.w1[:] = rng.uniform(-0.5, 0.5, model.critic.w1.shape)
    model.critic.w2[:] = rng.uniform(-0.5, 0.5, model.critic.w2.shape)
    return model


def _numeric_grads(model, params, x, lambda_scale, h=1e-6):
    grads = []
    for p in params:
        g = np.zeros_like(p)
        for idx in np.ndindex(p.shape):
            saved = p[idx]
            p[idx] = saved + h
            up = generator_loss_and_grads(model, x, lambda_scale)[0]
            p[idx] = saved - h
            down = generator_loss_and_grads(model, x, lambda_scale)[0]
            p[idx] = saved
            g[idx] = (up - down) / (2 * h)
        grads.append(g)
    return grads


class TestGradients:
    def test_generator_grads_match_finite_differences(self, small_model, rng):
        x = rng.standard_normal(64)
        _, _, enc_grads, dec_grads, _ = generator_loss_and_grads(small_model, x, 1.0)
        numeric_enc = _numeric_grads(small_model, small_model.encoder.parameters(), x, 1.0)
        numeric_dec = _numeric_grads(small_model, small_model.decoder.parameters(), x, 1.0)
        for analytic, numeric in zip(enc_grads + dec_grads, numeric_enc + numeric_dec):
            np.testing.assert_allclose(analytic, numeric, rtol=1e-4, atol=1e-8)

    def test_zero_reconstruction_weight_freezes_decoder(self, small_model, rng):
        _, _, _, dec_grads, _ = generator_loss_and_grads(small_model, rng.standard_normal(64), 0.0)
        assert all(np.all(g == 0.0) for g in dec_grads)

    def test_critic_block_grads(self, small_model, rng):
        blocks = rng.random((5, SMALL.block))
        _, d_blocks, _ = small_model.critic.mean_score_grads(blocks)
        h = 1e-6
        bumped = blocks.copy()
        bumped[2, 3] += h
        lowered = blocks.copy()
        lowered[2, 3] -= h
        numeric = (
            small_model.critic.mean_score_grads(bumped)[0]
            - small_model.critic.mean_score_grads(lowered)[0]
        ) / (2 * h)
        assert d_blocks[2, 3] == pytest.approx(numeric, rel=1e-5, abs=1e-10)

    def test_segment_without_settled_block(self, small_model):
        with pytest.raises(ValueError, match="settled block"):
            generator_loss_and_grads(small_model, np.zeros(10), 1.0)


class TestCausalConvNet:
    def test_causality(self, small_model, rng):
        x = rng.standard_normal(100)
        base = small_model.encoder(x)
        x[60] += 1.0
        changed = small_model.encoder(x)
        np.testing.assert_array_equal(base[:60], changed[:60])
        assert not np.allclose(base[60:67], changed[60:67])

    def test_shift_equivariance(self, small_model, rng):
        x = rng.standard_normal(100)
        shifted = np.concatenate(([rng.standard_normal()], x[:-1]))
        field = small_model.encoder.receptive_field
        np.testing.assert_allclose(
            small_model.encoder(shifted)[field:], small_model.encoder(x)[field - 1 : -1], atol=1e-12
        )

    def test_zero_weights_give_constant_output(self):
        net = CausalConvNet(
            [np.zeros((2, 1, 3)), np.zeros((1, 2, 3))], [np.ones(2), np.array([0.4])], "sigmoid"
        )
        out = net(np.linspace(-5, 5, 20))
        np.testing.assert_allclose(out, 1.0 / (1.0 + np.exp(-0.4)))
        assert net.receptive_field == 5

    def test_invalid_shape(self, rng):
        with pytest.raises(ValueError):
            CausalConvNet.initialize(0, 3, 4, "linear", rng)


class TestAdam:
    def test_minimizes_quadratic(self):
        p = np.array([10.0, -4.0])
        opt = Adam([p], lr=0.05)
        for _ in range(2000):
            opt.step([2.0 * (p - 3.0)])
        np.testing.assert_allclose(p, 3.0, atol=1e-2)

    def test_maximize_flips_direction(self):
        p = np.array([0.0])
        Adam([p], lr=0.1).step([np.array([1.0])], maximize=True)
        assert p[0] == pytest.approx(0.1)

    def test_rejects_bad_learning_rate(self):
        with pytest.raises(ValueError):
            Adam([np.zeros(1)], lr=0.0)


class TestModel:
    def test_encode_is_uniform_mode_with_warmup(self, small_model, rng):
        series = WaveformSeries(rng.standard_normal(200), sample_rate=100.0)
        v = neural_encode(small_model, series)
        assert v.warmup == small_model.context_length - 1
        assert np.all((v.values > 0.0) & (v.values < 1.0))

    def test_decode_needs_context(self, small_model):
        v = InnovationSequence(np.full(20, 0.5))
        with pytest.raises(ValueError, match="context"):
            neural_decode(small_model, v, [0.5])
        out = neural_decode(small_model, v, np.full(small_model.decoder.receptive_field - 1, 0.5))
        assert len(out) == 20

    def test_json_round_trip(self, small_model):
        restored = NeuralInnovationModel.from_json(small_model.to_json())
        for a, b in zip(restored.encoder.parameters(), small_model.encoder.parameters()):
            np.testing.assert_array_equal(a, b)
        np.testing.assert_array_equal(restored.critic.w1, small_model.critic.w1)

    def test_wrong_document(self):
        with pytest.raises(ConfigError):
            NeuralInnovationModel.from_dict({"format": "cpow-ar-innovation"})

    def test_non_finite_parameters(self, small_model, rng):
        small_model.decoder.biases[0][0] = np.nan
        with pytest.raises(ModelError):
            neural_encode(small_model, WaveformSeries(rng.standard_normal(50), 1.0))


class TestHyper:
    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="depth"):
            NeuralHyper.from_dict({"depth": 3})

    def test_invalid_values(self):
        with pytest.raises(ConfigError):
            NeuralHyper(lr=0.0)
        with pytest.raises(ConfigError):
            NeuralHyper(block=0)

    def test_dict_round_trip(self):
        assert NeuralHyper.from_dict(SMALL.to_dict()) == SMALL


class TestTraining:
    def test_short_run_is_deterministic(self, ar2_series):
        first = train_autoencoder(ar2_series, SMALL)
        again = train_autoencoder(ar2_series, SMALL)
        assert len(first.loss_trace) == SMALL.epochs
        assert first.loss_trace == again.loss_trace
        assert first.input_scale == pytest.approx(np.std(ar2_series.samples))

    def test_returns_the_best_validation_checkpoint(self, ar2_series):
        hyper = NeuralHyper(
            layers=3, kernel=3, hidden=4, block=8, critic_hidden=6, epochs=6, segment=64, lr=0.05
        )
        trained = train_autoencoder(ar2_series, hyper)
        assert len(trained.validation_trace) == hyper.epochs
        x = (ar2_series.samples - trained.input_mean) / trained.input_scale
        _, held_out = holdout_split(x, hyper.segment)
        restored = validation_loss(trained, held_out, hyper.lambda_scale)
        assert restored == pytest.approx(min(trained.validation_trace), rel=1e-12)

    def test_holdout_split(self):
        x = np.arange(10.0)
        train, held_out = holdout_split(x, 4)
        np.testing.assert_array_equal(train, np.arange(6.0))
        np.testing.assert_array_equal(held_out, np.arange(6.0, 10.0))
        train, held_out = holdout_split(x, 6)
        assert train.size == 10 and held_out.size == 6

    def test_too_little_data(self):
        with pytest.raises(ValueError, match="at least"):
            train_autoencoder(WaveformSeries(np.arange(50.0), 1.0), SMALL)

    def test_best_so_far(self):
        assert best_so_far([3.0, 1.0, 2.0, 0.5]) == [3.0, 1.0, 1.0, 0.5]
        assert best_so_far([]) == []

    @pytest.mark.slow
    def test_training_improves_reconstruction(self, ar2_series):
        x = (ar2_series.samples - ar2_series.samples.mean()) / ar2_series.samples.std()
        initial = initialize_model(NeuralHyper(), np.random.default_rng(0))
        trained = train_autoencoder(ar2_series, NeuralHyper(epochs=200))
        assert reconstruction_mse(trained, x) < reconstruction_mse(initial, x)
        assert latent_ks(trained, x) < 1.0
        best = best_so_far(trained.reconstruction_trace)
        assert best[-1] < best[0]

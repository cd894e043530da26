"""Causal convolution stacks and a block critic with hand-written backward passes.

Arrays are channel-major: a signal of C channels and T steps has shape (C, T).
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np


def causal_conv(x: np.ndarray, weight: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """``y[:, t] = b + Σ_k W[:, :, k] @ x[:, t-k]`` with zeros before the start."""
    taps = weight.shape[2]
    steps = x.shape[1]
    padded = np.pad(x, ((0, 0), (taps - 1, 0)))
    y = np.repeat(bias[:, None], steps, axis=1).astype(float)
    for k in range(taps):
        start = taps - 1 - k
        y += weight[:, :, k] @ padded[:, start : start + steps]
    return y


def causal_conv_backward(
    x: np.ndarray, weight: np.ndarray, dy: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gradients (dx, dW, db) of :func:`causal_conv`."""
    taps = weight.shape[2]
    steps = x.shape[1]
    padded = np.pad(x, ((0, 0), (taps - 1, 0)))
    d_padded = np.zeros_like(padded)
    d_weight = np.empty_like(weight)
    for k in range(taps):
        start = taps - 1 - k
        window = slice(start, start + steps)
        d_weight[:, :, k] = dy @ padded[:, window].T
        d_padded[:, window] += weight[:, :, k].T @ dy
    return d_padded[:, taps - 1 :], d_weight, dy.sum(axis=1)


def _sigmoid(a: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * a))


@dataclass
class CausalConvNet:
    """Stack of causal convolutions, tanh between layers.

    Attributes:
        weights: Per-layer kernels of shape (out, in, kernel)
        biases: Per-layer biases of shape (out,)
        output: ``sigmoid`` squashes the last layer into (0, 1), ``linear`` leaves it
    """

    weights: List[np.ndarray]
    biases: List[np.ndarray]
    output: str = "linear"

    @classmethod
    def initialize(
        cls,
        layers: int,
        kernel: int,
        hidden: int,
        output: str,
        rng: np.random.Generator,
        gain: float = 1.0,
    ) -> "CausalConvNet":
        if layers < 1 or kernel < 1 or hidden < 1:
            raise ValueError(f"Invalid network shape: layers={layers}, kernel={kernel}, hidden={hidden}")
        widths = [1] + [hidden] * (layers - 1) + [1]
        weights, biases = [], []
        for fan_in, fan_out in zip(widths[:-1], widths[1:]):
            scale = gain / np.sqrt(fan_in * kernel)
            weights.append(scale * rng.standard_normal((fan_out, fan_in, kernel)))
            biases.append(np.zeros(fan_out))
        return cls(weights, biases, output)

    @property
    def receptive_field(self) -> int:
        return sum(w.shape[2] - 1 for w in self.weights) + 1

    def parameters(self) -> List[np.ndarray]:
        return [p for pair in zip(self.weights, self.biases) for p in pair]

    def forward(self, x: np.ndarray) -> Tuple[np.ndarray, List[Tuple[np.ndarray, np.ndarray]]]:
        """Run a 1-D signal through the stack; returns (output, cache)."""
        h = np.asarray(x, dtype=float)[None, :]
        cache = []
        last = len(self.weights) - 1
        for i, (weight, bias) in enumerate(zip(self.weights, self.biases)):
            a = causal_conv(h, weight, bias)
            cache.append((h, a))
            if i < last:
                h = np.tanh(a)
            elif self.output == "sigmoid":
                h = _sigmoid(a)
            else:
                h = a
        return h[0], cache

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.forward(x)[0]

    def backward(
        self, cache: List[Tuple[np.ndarray, np.ndarray]], d_out: np.ndarray
    ) -> Tuple[np.ndarray, List[np.ndarray]]:
        """Backpropagate ``d_out`` (gradient w.r.t. the output); returns (d_input, parameter grads)."""
        grads: List[Optional[np.ndarray]] = [None] * (2 * len(self.weights))
        _, a_last = cache[-1]
        dh = np.asarray(d_out, dtype=float)[None, :]
        if self.output == "sigmoid":
            s = _sigmoid(a_last)
            da = dh * s * (1.0 - s)
        else:
            da = dh
        for i in range(len(self.weights) - 1, -1, -1):
            h_in, _ = cache[i]
            dh, grads[2 * i], grads[2 * i + 1] = causal_conv_backward(h_in, self.weights[i], da)
            if i > 0:
                _, a_prev = cache[i - 1]
                da = dh * (1.0 - np.tanh(a_prev) ** 2)
        return dh[0], grads

    def to_dict(self) -> dict:
        return {
            "output": self.output,
            "layers": [
                {"shape": list(w.shape), "weights": w.ravel().tolist(), "bias": b.tolist()}
                for w, b in zip(self.weights, self.biases)
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CausalConvNet":
        weights = [
            np.asarray(layer["weights"], dtype=float).reshape(layer["shape"])
            for layer in data["layers"]
        ]
        biases = [np.asarray(layer["bias"], dtype=float) for layer in data["layers"]]
        return cls(weights, biases, data.get("output", "linear"))


@dataclass
class BlockCritic:
    """One-hidden-layer critic scoring innovation blocks of length B."""

    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: float = 0.0

    @classmethod
    def initialize(cls, block: int, hidden: int, clip: float, rng: np.random.Generator) -> "BlockCritic":
        return cls(
            rng.uniform(-clip, clip, (hidden, block)),
            np.zeros(hidden),
            rng.uniform(-clip, clip, hidden),
            0.0,
        )

    @property
    def block(self) -> int:
        return self.w1.shape[1]

    def parameters(self) -> List[np.ndarray]:
        return [self.w1, self.b1, self.w2]

    def forward(self, blocks: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        hidden = np.tanh(blocks @ self.w1.T + self.b1)
        return hidden @ self.w2 + self.b2, hidden

    def mean_score_grads(
        self, blocks: np.ndarray
    ) -> Tuple[float, np.ndarray, List[np.ndarray]]:
        """Mean score, its gradient w.r.t. the blocks and w.r.t. (w1, b1, w2)."""
        scores, hidden = self.forward(blocks)
        d_score = np.full(scores.shape, 1.0 / scores.size)
        d_pre = (d_score[:, None] * self.w2[None, :]) * (1.0 - hidden**2)
        d_blocks = d_pre @ self.w1
        grads = [d_pre.T @ blocks, d_pre.sum(axis=0), hidden.T @ d_score]
        return float(scores.mean()), d_blocks, grads

    def clip(self, limit: float) -> None:
        for p in self.parameters():
            np.clip(p, -limit, limit, out=p)

    def to_dict(self) -> dict:
        return {
            "shape": list(self.w1.shape),
            "w1": self.w1.ravel().tolist(),
            "b1": self.b1.tolist(),
            "w2": self.w2.tolist(),
            "b2": self.b2,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BlockCritic":
        return cls(
            np.asarray(data["w1"], dtype=float).reshape(data["shape"]),
            np.asarray(data["b1"], dtype=float),
            np.asarray(data["w2"], dtype=float),
            float(data.get("b2", 0.0)),
        )

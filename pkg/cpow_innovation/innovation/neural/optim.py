"""Adam updates on lists of numpy parameters."""

from typing import List, Sequence

import numpy as np


class Adam:
    """Adam optimizer updating arrays in place.

    Args:
        params: Arrays to update
        lr: Step size
        betas: Decay rates of the first and second moment estimates
        eps: Denominator floor
    """

    def __init__(
        self,
        params: Sequence[np.ndarray],
        lr: float = 1e-3,
        betas=(0.9, 0.999),
        eps: float = 1e-8,
    ):
        if lr <= 0:
            raise ValueError(f"Learning rate must be positive, got {lr}")
        self.params: List[np.ndarray] = list(params)
        self.lr = lr
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.m = [np.zeros_like(p) for p in self.params]
        self.v = [np.zeros_like(p) for p in self.params]
        self.t = 0

    def step(self, grads: Sequence[np.ndarray], maximize: bool = False) -> None:
        self.t += 1
        sign = -1.0 if maximize else 1.0
        c1 = 1.0 - self.beta1**self.t
        c2 = 1.0 - self.beta2**self.t
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            g = sign * g
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)

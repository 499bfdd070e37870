"""First-order optimizers over flat parameter vectors."""

from __future__ import annotations

import numpy as np


class Adam:
    """Adam with bias-corrected moment estimates."""

    def __init__(self, n_params: int, beta1: float = 0.9, beta2: float = 0.999,
                 eps: float = 1e-8):
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = np.zeros(n_params)
        self.v = np.zeros(n_params)
        self.t = 0

    def step(self, params: np.ndarray, grads: np.ndarray, lr: float) -> None:
        if params.shape != grads.shape or params.shape != self.m.shape:
            raise ValueError("parameter/gradient/buffer shapes disagree")
        self.t += 1
        self.m = self.beta1 * self.m + (1.0 - self.beta1) * grads
        self.v = self.beta2 * self.v + (1.0 - self.beta2) * grads * grads
        m_hat = self.m / (1.0 - self.beta1 ** self.t)
        v_hat = self.v / (1.0 - self.beta2 ** self.t)
        params -= lr * m_hat / (np.sqrt(v_hat) + self.eps)


class RmsProp:
    """RMSProp with a decaying squared-gradient accumulator."""

    def __init__(self, n_params: int, decay: float = 0.99, eps: float = 1e-5):
        self.decay = decay
        self.eps = eps
        self.acc = np.zeros(n_params)

    def step(self, params: np.ndarray, grads: np.ndarray, lr: float) -> None:
        if params.shape != grads.shape or params.shape != self.acc.shape:
            raise ValueError("parameter/gradient/buffer shapes disagree")
        self.acc = self.decay * self.acc + (1.0 - self.decay) * grads * grads
        params -= lr * grads / (np.sqrt(self.acc) + self.eps)

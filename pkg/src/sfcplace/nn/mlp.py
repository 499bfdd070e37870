"""Dense policy/value network with exact reverse-mode gradients.

A shared trunk of two tanh layers feeds a categorical policy head and a
scalar value head. Parameters live in one flat float64 array so
optimizers and checkpoints treat the network as a single vector.
"""

from __future__ import annotations

import struct
from typing import Optional

import numpy as np

from ..rng import STREAM_NET_INIT, RngStream
from . import backend

CHECKPOINT_MAGIC = b"SFCN"
CHECKPOINT_VERSION = 1


def _orthogonal(rows: int, cols: int, gain: float, rng: RngStream) -> np.ndarray:
    a = rng.normal((max(rows, cols), min(rows, cols)))
    q, r = np.linalg.qr(a)
    q = q * np.sign(np.diag(r))
    if rows < cols:
        q = q.T
    return gain * q[:rows, :cols]


class Mlp:
    """Fixed-topology network: n_inputs -> hidden -> hidden -> (actions, value)."""

    def __init__(
        self,
        n_inputs: int,
        n_actions: int,
        hidden: tuple[int, int] = (64, 64),
        seed: int = 0,
        kernels=None,
    ):
        self.n_inputs = n_inputs
        self.n_actions = n_actions
        self.hidden = tuple(hidden)
        self.kernels = kernels if kernels is not None else backend.kernels
        h1, h2 = self.hidden
        self._shapes = [
            (h1, n_inputs),  # w1
            (h1,),  # b1
            (h2, h1),  # w2
            (h2,),  # b2
            (n_actions, h2),  # wp
            (n_actions,),  # bp
            (h2,),  # wv
            (1,),  # bv
        ]
        total = sum(int(np.prod(s)) for s in self._shapes)
        self.params = np.zeros(total, dtype=np.float64)
        self._views = []
        offset = 0
        for shape in self._shapes:
            size = int(np.prod(shape))
            self._views.append(self.params[offset : offset + size].reshape(shape))
            offset += size
        (self.w1, self.b1, self.w2, self.b2,
         self.wp, self.bp, self.wv, self.bv) = self._views
        self._init_params(seed)

    def _init_params(self, seed: int) -> None:
        # Orthogonal hidden layers; a small-gain policy head keeps the
        # starting policy near uniform, which stabilises early entropy.
        rng = RngStream(seed, STREAM_NET_INIT)
        self.w1[:] = _orthogonal(*self._shapes[0], gain=np.sqrt(2.0), rng=rng)
        self.w2[:] = _orthogonal(*self._shapes[2], gain=np.sqrt(2.0), rng=rng)
        self.wp[:] = _orthogonal(*self._shapes[4], gain=0.01, rng=rng)
        self.wv[:] = _orthogonal(1, self.hidden[1], gain=1.0, rng=rng)[0]
        self.b1[:] = 0.0
        self.b2[:] = 0.0
        self.bp[:] = 0.0
        self.bv[:] = 0.0

    @property
    def n_params(self) -> int:
        return self.params.size

    # -- forward/backward --------------------------------------------------

    def forward(self, x: np.ndarray):
        """Batch forward pass.

        x: [B, n_inputs]. Returns (logits [B, A], values [B], cache); the
        cache feeds backward().
        """
        x = np.ascontiguousarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.n_inputs:
            raise ValueError(
                f"expected input [B, {self.n_inputs}], got {x.shape}"
            )
        logits, values, h1, h2 = self.kernels.forward(
            self.w1, self.b1, self.w2, self.b2,
            self.wp, self.bp, self.wv, self.bv, x,
        )
        return logits, values, (x, h1, h2)

    def policy_value(self, obs: np.ndarray):
        """Single-observation convenience: (logits [A], value)."""
        logits, values, _ = self.forward(obs.reshape(1, -1))
        return logits[0], float(values[0])

    def backward(self, cache, dlogits: np.ndarray, dvalues: np.ndarray) -> np.ndarray:
        """Parameter gradients for given head gradients, as one flat vector."""
        if cache is None:
            raise RuntimeError("backward() needs the cache from a forward() call")
        x, h1, h2 = cache
        dlogits = np.ascontiguousarray(dlogits, dtype=np.float64)
        dvalues = np.ascontiguousarray(dvalues, dtype=np.float64)
        grads = self.kernels.backward(
            self.w1, self.w2, self.wp, self.wv, x, h1, h2, dlogits, dvalues
        )
        return np.concatenate([g.ravel() for g in grads])

    # -- persistence ---------------------------------------------------------

    def save(self, path) -> None:
        header = struct.pack(
            "<4sIIIIIQ",
            CHECKPOINT_MAGIC,
            CHECKPOINT_VERSION,
            self.n_inputs,
            self.hidden[0],
            self.hidden[1],
            self.n_actions,
            self.params.size,
        )
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(self.params.astype("<f8").tobytes())

    @classmethod
    def load(cls, path, kernels=None) -> "Mlp":
        with open(path, "rb") as fh:
            header = fh.read(struct.calcsize("<4sIIIIIQ"))
            magic, version, n_in, h1, h2, n_act, count = struct.unpack(
                "<4sIIIIIQ", header
            )
            if magic != CHECKPOINT_MAGIC:
                raise ValueError(f"{path}: not a checkpoint file")
            if version != CHECKPOINT_VERSION:
                raise ValueError(f"{path}: unsupported checkpoint version {version}")
            raw = fh.read(count * 8)
        net = cls(n_in, n_act, hidden=(h1, h2), kernels=kernels)
        params = np.frombuffer(raw, dtype="<f8")
        if params.size != net.params.size:
            raise ValueError(f"{path}: parameter count mismatch")
        net.params[:] = params
        return net


# -- categorical distribution ----------------------------------------------


def log_softmax(logits: np.ndarray) -> np.ndarray:
    """Shift-invariant log-softmax over the last axis."""
    shifted = logits - logits.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def softmax(logits: np.ndarray) -> np.ndarray:
    return np.exp(log_softmax(logits))


class CategoricalDistribution:
    """Discrete action distribution over softmax(logits)."""

    def __init__(self, logits: np.ndarray):
        self.logits = np.asarray(logits, dtype=np.float64)
        self.log_probs = log_softmax(self.logits)
        self.probs = np.exp(self.log_probs)

    def sample(self, rng: RngStream) -> int:
        return rng.categorical(self.probs)

    def log_prob(self, action: int) -> float:
        return float(self.log_probs[action])

    def entropy(self) -> float:
        return float(-(self.probs * self.log_probs).sum())

    def argmax(self) -> int:
        return int(np.argmax(self.probs))


def batch_log_probs_entropy(logits: np.ndarray, actions: np.ndarray):
    """Per-sample log-prob of the taken action and entropy, vectorised."""
    logp = log_softmax(logits)
    probs = np.exp(logp)
    taken = logp[np.arange(len(actions)), actions]
    entropy = -(probs * logp).sum(axis=1)
    return taken, entropy

"""Pure-numpy implementation of the dense-network kernels.

Same contract as the compiled extension; selected automatically when the
extension is unavailable (or forced via SFCPLACE_BACKEND=python).
"""

import numpy as np

NAME = "python"


def forward(w1, b1, w2, b2, wp, bp, wv, bv, x):
    """Two tanh layers feeding a logits head and a scalar value head.

    x: [B, n_in]. Returns (logits [B, A], values [B], h1 [B, H1], h2 [B, H2]).
    """
    h1 = np.tanh(x @ w1.T + b1)
    h2 = np.tanh(h1 @ w2.T + b2)
    logits = h2 @ wp.T + bp
    values = h2 @ wv + bv[0]
    return logits, values, h1, h2


def backward(w1, w2, wp, wv, x, h1, h2, dlogits, dvalues):
    """Reverse-mode pass from head gradients to parameter gradients.

    dlogits: [B, A] gradient of the loss wrt logits; dvalues: [B] wrt values.
    Returns (gw1, gb1, gw2, gb2, gwp, gbp, gwv, gbv) matching parameter shapes.
    """
    gwp = dlogits.T @ h2
    gbp = dlogits.sum(axis=0)
    gwv = h2.T @ dvalues
    gbv = np.array([dvalues.sum()])
    dh2 = dlogits @ wp + dvalues[:, None] * wv[None, :]
    dz2 = dh2 * (1.0 - h2 * h2)
    gw2 = dz2.T @ h1
    gb2 = dz2.sum(axis=0)
    dh1 = dz2 @ w2
    dz1 = dh1 * (1.0 - h1 * h1)
    gw1 = dz1.T @ x
    gb1 = dz1.sum(axis=0)
    return gw1, gb1, gw2, gb2, gwp, gbp, gwv, gbv

from .backend import BACKEND_NAME, available_backends, kernels
from .mlp import (
    CategoricalDistribution,
    Mlp,
    batch_log_probs_entropy,
    log_softmax,
    softmax,
)
from .optim import Adam, RmsProp

__all__ = [
    "Adam",
    "BACKEND_NAME",
    "CategoricalDistribution",
    "Mlp",
    "RmsProp",
    "available_backends",
    "batch_log_probs_entropy",
    "kernels",
    "log_softmax",
    "softmax",
]

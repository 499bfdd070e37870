"""Availability- and energy-aware service function chain placement.

A discrete-event simulator of failure-prone servers hosting VNF chains,
an RBD availability engine, from-scratch A2C/PPO agents over a compiled
or pure-numpy network backend, and reproducible experiment tooling.
"""

from . import agents, core, env, experiments, nn, rbd, sim
from .rng import RngStream

__version__ = "0.1.0"

__all__ = [
    "RngStream",
    "agents",
    "core",
    "env",
    "experiments",
    "nn",
    "rbd",
    "sim",
]

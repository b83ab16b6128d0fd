"""Classical momentum updates."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .params import Parameters


@dataclass
class MomentumState:
    """Velocity buffers plus the two optimizer hyperparameters."""

    velocity: dict[str, np.ndarray]
    learning_rate: float = 0.01
    momentum: float = 0.95


def init_optimizer(
    params: Parameters, learning_rate: float = 0.01, momentum: float = 0.95
) -> MomentumState:
    if not learning_rate > 0:
        raise ValueError(f"learning_rate must be positive, got {learning_rate}")
    if not 0.0 <= momentum < 1.0:
        raise ValueError(f"momentum must lie in [0, 1), got {momentum}")
    return MomentumState(params.zeros_like(), float(learning_rate), float(momentum))


def momentum_step(params: Parameters, grads: dict, state: MomentumState):
    """One in-place update: v <- rho v + g, theta <- theta - eta v.

    Masked entries are re-projected to zero afterwards. Returns the same
    (params, state) objects for convenience.
    """
    for key, value in params.values.items():
        v = state.velocity[key]
        v *= state.momentum
        v += grads[key]
        value -= state.learning_rate * v
    params.project()
    return params, state

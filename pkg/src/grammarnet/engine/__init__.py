"""From-scratch neural engine: configs, parameters, passes, optimizer."""

from .config import ARCHITECTURES, NetworkConfig
from .network import EPSILON, backward, check_features, forward, loss_bce, sigmoid
from .optim import MomentumState, init_optimizer, momentum_step
from .params import FORMAT_TAG, Parameters, init_network, load_params, save_params

__all__ = [
    "ARCHITECTURES",
    "EPSILON",
    "FORMAT_TAG",
    "MomentumState",
    "NetworkConfig",
    "Parameters",
    "backward",
    "check_features",
    "forward",
    "init_network",
    "init_optimizer",
    "load_params",
    "loss_bce",
    "momentum_step",
    "save_params",
    "sigmoid",
]

"""
Neural building blocks
"""

from .mlp import MlpParams, Gradients, xavier_init, build_mlp, forward, backward, leaky_relu
from .optimizer import OptimizerState, AdamOptimizer, optimizer_step
from .gaussian import (
    ACTION_LOW,
    ACTION_HIGH,
    GaussianHead,
    SquashedSample,
    sample_squashed_gaussian,
    deterministic_action,
    head_gradient,
)
from .checkpoint import save_checkpoint, load_checkpoint, network_to_dict, network_from_dict

__all__ = [
    "MlpParams",
    "Gradients",
    "xavier_init",
    "build_mlp",
    "forward",
    "backward",
    "leaky_relu",
    "OptimizerState",
    "AdamOptimizer",
    "optimizer_step",
    "ACTION_LOW",
    "ACTION_HIGH",
    "GaussianHead",
    "SquashedSample",
    "sample_squashed_gaussian",
    "deterministic_action",
    "head_gradient",
    "save_checkpoint",
    "load_checkpoint",
    "network_to_dict",
    "network_from_dict",
]

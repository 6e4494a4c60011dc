"""
Adaptive-moment optimizer for MlpParams
"""

from dataclasses import dataclass
from typing import List

import numpy as np

from .mlp import Gradients, MlpParams


@dataclass
class OptimizerState:
    first_moments: List[np.ndarray]
    second_moments: List[np.ndarray]
    lr: float = 3e-4
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step: int = 0

    @classmethod
    def for_network(cls, net: MlpParams, lr: float = 3e-4, beta1: float = 0.9, beta2: float = 0.999, epsilon: float = 1e-8) -> "OptimizerState":
        return cls(
            first_moments=[np.zeros_like(p) for p in net.parameters()],
            second_moments=[np.zeros_like(p) for p in net.parameters()],
            lr=lr,
            beta1=beta1,
            beta2=beta2,
            epsilon=epsilon,
        )

    def copy(self) -> "OptimizerState":
        return OptimizerState(
            first_moments=[m.copy() for m in self.first_moments],
            second_moments=[v.copy() for v in self.second_moments],
            lr=self.lr,
            beta1=self.beta1,
            beta2=self.beta2,
            epsilon=self.epsilon,
            step=self.step,
        )


def optimizer_step(net: MlpParams, grads: Gradients, state: OptimizerState) -> MlpParams:
    """In-place bias-corrected adaptive-moment descent step; returns the updated network"""
    params = net.parameters()
    grad_list = grads.parameters()
    if len(params) != len(grad_list) or any(p.shape != g.shape for p, g in zip(params, grad_list)):
        raise ValueError(f"Gradient shapes do not match {net!r}")

    state.step += 1
    correction1 = 1.0 - state.beta1 ** state.step
    correction2 = 1.0 - state.beta2 ** state.step
    for p, g, m, v in zip(params, grad_list, state.first_moments, state.second_moments):
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * g * g
        p -= state.lr * (m / correction1) / (np.sqrt(v / correction2) + state.epsilon)
    return net


class AdamOptimizer:
    """Optimizer bound to one network"""

    def __init__(self, net: MlpParams, lr: float = 3e-4):
        self.net = net
        self.state = OptimizerState.for_network(net, lr=lr)

    def step(self, grads: Gradients) -> MlpParams:
        return optimizer_step(self.net, grads, self.state)

    def __repr__(self):
        return f"<AdamOptimizer {self.net.role} lr={self.state.lr} step={self.state.step}>"

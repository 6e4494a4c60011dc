"""
Skill Discriminator
Classifier q(z|s) over quantized observations; its log-probability is the skill reward
"""

from typing import Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from core.neural import Gradients, MlpParams, OptimizerState, backward, build_mlp, forward, optimizer_step


def skill_reward(q_z_given_s: float, p_z: float, floor: float = 1e-6) -> float:
    """log q(z|s) - log p(z), with q floored to bound the penalty"""
    if p_z <= 0:
        raise ValueError(f"Skill prior probability must be positive, got {p_z}")
    return float(np.log(max(q_z_given_s, floor)) - np.log(p_z))


def log_softmax(logits: np.ndarray) -> np.ndarray:
    logits = np.atleast_2d(logits)
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def softmax(logits: np.ndarray) -> np.ndarray:
    return np.exp(log_softmax(logits))


def cross_entropy(logits: np.ndarray, skills: Sequence[int]) -> Tuple[float, np.ndarray]:
    """Mean softmax cross-entropy and its gradient with respect to the logits"""
    log_p = log_softmax(logits)
    idx = np.asarray(skills, dtype=np.int64)
    n = log_p.shape[0]
    loss = float(-log_p[np.arange(n), idx].mean())
    grad = np.exp(log_p)
    grad[np.arange(n), idx] -= 1.0
    return loss, grad / n


def discriminator_loss(net: MlpParams, states: np.ndarray, skills: Sequence[int]) -> Tuple[float, Gradients]:
    states = np.atleast_2d(states)
    if states.shape[0] == 0:
        raise ValueError("Discriminator batch must not be empty")
    loss, d_logits = cross_entropy(forward(net, states), skills)
    return loss, backward(net, states, d_logits)


def discriminator_update(
    states: np.ndarray,
    skills: Sequence[int],
    net: MlpParams,
    opt: OptimizerState,
) -> float:
    """One descent step on the cross-entropy; returns the loss before the step"""
    loss, grads = discriminator_loss(net, states, skills)
    optimizer_step(net, grads, opt)
    return loss


def discriminator_accuracy(net: MlpParams, states: np.ndarray, skills: Sequence[int]) -> float:
    """Top-1 accuracy; argmax ties resolve to the lowest skill index"""
    states = np.atleast_2d(states)
    if states.shape[0] == 0:
        return 0.0
    predicted = np.argmax(forward(net, states), axis=1)
    return float(np.mean(predicted == np.asarray(skills)))


class SkillDiscriminator:
    """Discriminator network plus its optimizer state"""

    def __init__(
        self,
        n_skills: int,
        rng: np.random.Generator,
        obs_dim: int = 14,
        hidden_sizes: Sequence[int] = (64, 64),
        lr: float = 3e-4,
        reward_floor: float = 1e-6,
        net: Optional[MlpParams] = None,
    ):
        self.n_skills = n_skills
        self.reward_floor = reward_floor
        self.net = net or build_mlp(obs_dim, n_skills, rng, hidden_sizes, role="discriminator")
        self.opt = OptimizerState.for_network(self.net, lr=lr)

    def probabilities(self, states: np.ndarray) -> np.ndarray:
        return softmax(forward(self.net, np.atleast_2d(states)))

    def reward(self, s_next: np.ndarray, z: int) -> float:
        q = float(self.probabilities(s_next)[0, z])
        return skill_reward(q, 1.0 / self.n_skills, self.reward_floor)

    def rewards(self, states: np.ndarray, skills: Sequence[int]) -> np.ndarray:
        probs = self.probabilities(states)
        q = np.maximum(probs[np.arange(len(probs)), np.asarray(skills)], self.reward_floor)
        return np.log(q) - np.log(1.0 / self.n_skills)

    def update(self, states: np.ndarray, skills: Sequence[int]) -> float:
        loss = discriminator_update(states, skills, self.net, self.opt)
        logger.debug(f"Discriminator loss {loss:.4f} (step {self.opt.step})")
        return loss

    def accuracy(self, states: np.ndarray, skills: Sequence[int]) -> float:
        return discriminator_accuracy(self.net, states, skills)

    def __repr__(self):
        return f"<SkillDiscriminator skills={self.n_skills} updates={self.opt.step}>"

"""
Squashed Gaussian policy head
The policy network emits [mean, log_std] per action dimension; actions are tanh-squashed into a box.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

LOG_2PI = float(np.log(2.0 * np.pi))
LOG_2 = float(np.log(2.0))

# continuous ego control box: [a_act, l_p] in [-1, 2/3] x [0, 1]
ACTION_LOW = (-1.0, 0.0)
ACTION_HIGH = (2.0 / 3.0, 1.0)


@dataclass(frozen=True)
class GaussianHead:
    action_low: Sequence[float] = ACTION_LOW
    action_high: Sequence[float] = ACTION_HIGH
    log_std_min: float = -20.0
    log_std_max: float = 2.0

    @property
    def action_dim(self) -> int:
        return len(self.action_low)

    @property
    def scale(self) -> np.ndarray:
        return (np.asarray(self.action_high) - np.asarray(self.action_low)) / 2.0

    @property
    def bias(self) -> np.ndarray:
        return (np.asarray(self.action_high) + np.asarray(self.action_low)) / 2.0

    def split(self, head_out: np.ndarray):
        """(mean, clamped log_std, mask of log_std entries inside the clamp range)"""
        head_out = np.atleast_2d(np.asarray(head_out, dtype=np.float64))
        if head_out.shape[1] != 2 * self.action_dim:
            raise ValueError(
                f"Policy output width must be {2 * self.action_dim}, got {head_out.shape[1]}"
            )
        mean = head_out[:, : self.action_dim]
        raw = head_out[:, self.action_dim:]
        log_std = np.clip(raw, self.log_std_min, self.log_std_max)
        inside = (raw >= self.log_std_min) & (raw <= self.log_std_max)
        return mean, log_std, inside.astype(np.float64)


@dataclass
class SquashedSample:
    """One batch of reparameterized draws; everything needed for pathwise gradients"""
    action: np.ndarray
    log_prob: np.ndarray
    pre_tanh: np.ndarray
    squashed: np.ndarray
    noise: np.ndarray
    std: np.ndarray
    log_std_mask: np.ndarray
    head: GaussianHead


def _log_one_minus_tanh_sq(u: np.ndarray) -> np.ndarray:
    # log(1 - tanh(u)^2) without cancellation for large |u|
    return 2.0 * (LOG_2 - u - np.logaddexp(0.0, -2.0 * u))


def sample_squashed_gaussian(
    head_out: np.ndarray,
    rng: np.random.Generator,
    head: Optional[GaussianHead] = None,
    noise: Optional[np.ndarray] = None,
) -> SquashedSample:
    """
    a = scale * tanh(mean + std * eps) + bias with the log-density of a under the squashed
    distribution, including the tanh and scale Jacobian corrections.
    """
    head = head or GaussianHead()
    mean, log_std, mask = head.split(head_out)
    std = np.exp(log_std)
    eps = rng.standard_normal(mean.shape) if noise is None else np.broadcast_to(noise, mean.shape).astype(np.float64)
    u = mean + std * eps
    y = np.tanh(u)
    action = head.scale * y + head.bias

    log_prob = (
        -0.5 * eps ** 2
        - log_std
        - 0.5 * LOG_2PI
        - np.log(head.scale)
        - _log_one_minus_tanh_sq(u)
    ).sum(axis=1)

    return SquashedSample(
        action=action,
        log_prob=log_prob,
        pre_tanh=u,
        squashed=y,
        noise=eps,
        std=std,
        log_std_mask=mask,
        head=head,
    )


def deterministic_action(head_out: np.ndarray, head: Optional[GaussianHead] = None) -> np.ndarray:
    """Squashed mean, used for greedy skill execution"""
    head = head or GaussianHead()
    mean, _, _ = head.split(head_out)
    return head.scale * np.tanh(mean) + head.bias


def head_gradient(
    sample: SquashedSample,
    log_prob_coeff: np.ndarray,
    action_grad: np.ndarray,
) -> np.ndarray:
    """
    Gradient with respect to the raw policy output of
        sum_b  log_prob_coeff[b] * log_prob[b] + action_grad[b] . action[b]
    through the reparameterized draw (noise held fixed).
    """
    y = sample.squashed
    sigma_eps = sample.std * sample.noise
    coeff = np.asarray(log_prob_coeff, dtype=np.float64).reshape(-1, 1)
    jac = sample.head.scale * (1.0 - y ** 2)
    g = np.asarray(action_grad, dtype=np.float64)

    d_mean = coeff * 2.0 * y + g * jac
    d_log_std = (coeff * (-1.0 + 2.0 * y * sigma_eps) + g * jac * sigma_eps) * sample.log_std_mask
    return np.concatenate([d_mean, d_log_std], axis=1)

"""
Skill-Conditioned Soft Actor-Critic
Policy, value, target value and twin Q networks trained on the discriminator reward.
All gradients are computed against the pre-update networks, then every network steps once.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.models import SkillConfig, SkillReplaySample
from core.neural import (
    GaussianHead,
    Gradients,
    MlpParams,
    OptimizerState,
    backward,
    build_mlp,
    forward,
    head_gradient,
    optimizer_step,
    sample_squashed_gaussian,
)

ACTION_DIM = 2
OBS_DIM = 14


def skill_vector(index: int, n_skills: int) -> np.ndarray:
    """One-hot skill encoding"""
    if not 0 <= index < n_skills:
        raise ValueError(f"Skill index {index} outside 0..{n_skills - 1}")
    z = np.zeros(n_skills)
    z[index] = 1.0
    return z


def one_hot(indices: Sequence[int], n_skills: int) -> np.ndarray:
    idx = np.asarray(indices, dtype=np.int64)
    out = np.zeros((idx.shape[0], n_skills))
    out[np.arange(idx.shape[0]), idx] = 1.0
    return out


def sac_q_target(r_z, done, v_target_next, gamma: float):
    """r_z if done else r_z + gamma * V_target(s'); works elementwise on arrays"""
    if not 0.0 <= gamma < 1.0:
        raise ValueError(f"gamma must lie in [0, 1), got {gamma}")
    r_z = np.asarray(r_z, dtype=np.float64)
    not_done = 1.0 - np.asarray(done, dtype=np.float64)
    target = r_z + gamma * not_done * np.asarray(v_target_next, dtype=np.float64)
    return float(target) if target.ndim == 0 else target


@dataclass
class SacBatch:
    s: np.ndarray       # (B, obs)
    z: np.ndarray       # (B,) skill indices
    action: np.ndarray  # (B, 2) raw (a_act, l_p)
    r_z: np.ndarray
    s_next: np.ndarray
    done: np.ndarray

    @classmethod
    def from_samples(cls, samples: List[SkillReplaySample]) -> "SacBatch":
        if not samples:
            raise ValueError("SAC batch must not be empty")
        return cls(
            s=np.stack([t.s for t in samples]),
            z=np.asarray([t.z for t in samples], dtype=np.int64),
            action=np.stack([np.asarray(t.action, dtype=np.float64) for t in samples]),
            r_z=np.asarray([t.r_z for t in samples], dtype=np.float64),
            s_next=np.stack([t.s_next for t in samples]),
            done=np.asarray([t.done for t in samples], dtype=np.float64),
        )

    def __len__(self):
        return self.s.shape[0]


@dataclass
class SacEnsemble:
    policy: MlpParams
    value: MlpParams
    value_target: MlpParams
    q1: MlpParams
    q2: MlpParams
    n_skills: int
    head: GaussianHead = field(default_factory=GaussianHead)
    optimizers: Dict[str, OptimizerState] = field(default_factory=dict)

    def networks(self) -> Dict[str, MlpParams]:
        return {
            "policy": self.policy,
            "value": self.value,
            "value_target": self.value_target,
            "q1": self.q1,
            "q2": self.q2,
        }

    def copy(self) -> "SacEnsemble":
        return SacEnsemble(
            policy=self.policy.copy(),
            value=self.value.copy(),
            value_target=self.value_target.copy(),
            q1=self.q1.copy(),
            q2=self.q2.copy(),
            n_skills=self.n_skills,
            head=self.head,
            optimizers={k: v.copy() for k, v in self.optimizers.items()},
        )

    def __repr__(self):
        return f"<SacEnsemble skills={self.n_skills} policy={self.policy!r}>"


def build_sac_ensemble(
    n_skills: int,
    rng: np.random.Generator,
    config: Optional[SkillConfig] = None,
    obs_dim: int = OBS_DIM,
) -> SacEnsemble:
    config = config or SkillConfig()
    hidden = config.hidden_sizes
    conditioned = obs_dim + n_skills
    policy = build_mlp(conditioned, 2 * ACTION_DIM, rng, hidden, role="policy")
    value = build_mlp(conditioned, 1, rng, hidden, role="value")
    value_target = value.copy()
    value_target.role = "value_target"
    q1 = build_mlp(conditioned + ACTION_DIM, 1, rng, hidden, role="q1")
    q2 = build_mlp(conditioned + ACTION_DIM, 1, rng, hidden, role="q2")
    ensemble = SacEnsemble(
        policy=policy,
        value=value,
        value_target=value_target,
        q1=q1,
        q2=q2,
        n_skills=n_skills,
        head=GaussianHead(log_std_min=config.log_std_min, log_std_max=config.log_std_max),
    )
    for name in ("policy", "value", "q1", "q2"):
        ensemble.optimizers[name] = OptimizerState.for_network(getattr(ensemble, name), lr=config.lr)
    return ensemble


def sac_gradients(
    ensemble: SacEnsemble,
    batch: SacBatch,
    alpha: float,
    gamma: float,
    rng: Optional[np.random.Generator] = None,
    noise: Optional[np.ndarray] = None,
) -> Tuple[Dict[str, float], Dict[str, Gradients]]:
    n = len(batch)
    zoh = one_hot(batch.z, ensemble.n_skills)
    sz = np.concatenate([batch.s, zoh], axis=1)
    sz_next = np.concatenate([batch.s_next, zoh], axis=1)

    # twin critics toward r_z + gamma * V_target(s')
    v_next = forward(ensemble.value_target, sz_next)[:, 0]
    y = sac_q_target(batch.r_z, batch.done, v_next, gamma)
    x_q = np.concatenate([sz, batch.action], axis=1)
    losses: Dict[str, float] = {}
    grads: Dict[str, Gradients] = {}
    for name in ("q1", "q2"):
        net = getattr(ensemble, name)
        residual = forward(net, x_q)[:, 0] - y
        losses[name] = float(np.mean(residual ** 2))
        grads[name] = backward(net, x_q, (2.0 * residual / n)[:, None])

    # fresh reparameterized actions for the value and policy objectives
    if noise is None:
        if rng is None:
            raise ValueError("Either rng or noise is required to sample policy actions")
        noise = rng.standard_normal((n, ACTION_DIM))
    sample = sample_squashed_gaussian(forward(ensemble.policy, sz), rng, ensemble.head, noise)
    x_pi = np.concatenate([sz, sample.action], axis=1)
    q1_pi = forward(ensemble.q1, x_pi)[:, 0]
    q2_pi = forward(ensemble.q2, x_pi)[:, 0]
    use_q1 = q1_pi <= q2_pi
    min_q = np.where(use_q1, q1_pi, q2_pi)

    v_residual = forward(ensemble.value, sz)[:, 0] - (min_q - alpha * sample.log_prob)
    losses["value"] = float(np.mean(v_residual ** 2))
    grads["value"] = backward(ensemble.value, sz, (2.0 * v_residual / n)[:, None])

    losses["policy"] = float(np.mean(alpha * sample.log_prob - min_q))
    dq1 = backward(ensemble.q1, x_pi, use_q1.astype(np.float64)[:, None]).input_grad
    dq2 = backward(ensemble.q2, x_pi, (~use_q1).astype(np.float64)[:, None]).input_grad
    d_min_q_da = (dq1 + dq2)[:, -ACTION_DIM:]
    d_head = head_gradient(sample, np.full(n, alpha / n), -d_min_q_da / n)
    grads["policy"] = backward(ensemble.policy, sz, d_head)
    losses["log_prob"] = float(np.mean(sample.log_prob))
    return losses, grads


def sac_losses(
    ensemble: SacEnsemble,
    batch: SacBatch,
    alpha: float,
    gamma: float,
    noise: np.ndarray,
) -> Dict[str, float]:
    """Evaluate every SAC objective without touching the networks"""
    losses, _ = sac_gradients(ensemble, batch, alpha, gamma, noise=noise)
    return losses


def sac_update(
    batch: SacBatch,
    ensemble: SacEnsemble,
    config: SkillConfig,
    rng: np.random.Generator,
    noise: Optional[np.ndarray] = None,
) -> Dict[str, float]:
    """
    One step for each of Q1, Q2, value and policy, then Polyak smoothing of the
    target value network with coefficient tau. Returns the pre-update losses.
    """
    losses, grads = sac_gradients(ensemble, batch, config.alpha, config.gamma, rng, noise)
    for name, g in grads.items():
        optimizer_step(getattr(ensemble, name), g, ensemble.optimizers[name])
    ensemble.value_target.soft_update(ensemble.value, config.tau)
    return losses

"""
Double-DQN Learner
Primary/target Q networks, FIFO replay, epsilon schedule and the shared episode loop
used by both the macro-action agent and the skill selector.
"""

from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger
from tqdm import tqdm

from core.models import DqnConfig, EpisodeMetrics, EvaluationPoint, ExperienceHigh, ExperienceLow
from core.neural import (
    Gradients,
    MlpParams,
    OptimizerState,
    backward,
    build_mlp,
    forward,
    load_checkpoint,
    optimizer_step,
    save_checkpoint,
)
from agents.replay import ReplayBuffer

Experience = Union[ExperienceLow, ExperienceHigh]
EvalHook = Callable[[int, int], EvaluationPoint]

TARGET_RULES = ("double", "alg1_max")


def epsilon_greedy(q_values: Sequence[float], epsilon: float, rng: np.random.Generator) -> int:
    """Uniform index with probability epsilon, otherwise argmax (ties go to the lowest index)"""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
    q = np.asarray(q_values, dtype=np.float64)
    if rng.random() < epsilon:
        return int(rng.integers(0, q.shape[0]))
    return int(np.argmax(q))


def decay_epsilon(epsilon: float, beta: float, epsilon_min: float) -> float:
    return max(epsilon * beta, epsilon_min)


def compute_td_targets(
    rewards: np.ndarray,
    dones: np.ndarray,
    next_q_target: np.ndarray,
    next_q_primary: np.ndarray,
    gamma: float,
    rule: str = "double",
) -> np.ndarray:
    """
    done -> r
    alg1_max -> r + gamma * max_a Q_target(s', a)
    double   -> r + gamma * Q_target(s', argmax_a Q_primary(s', a))
    """
    if rule not in TARGET_RULES:
        raise ValueError(f"Unknown target rule {rule!r}, expected one of {TARGET_RULES}")
    next_q_target = np.atleast_2d(next_q_target)
    if rule == "alg1_max":
        bootstrap = next_q_target.max(axis=1)
    else:
        chosen = np.argmax(np.atleast_2d(next_q_primary), axis=1)
        bootstrap = next_q_target[np.arange(next_q_target.shape[0]), chosen]
    not_done = 1.0 - np.asarray(dones, dtype=np.float64)
    return np.asarray(rewards, dtype=np.float64) + gamma * not_done * bootstrap


def dqn_target(
    r: float,
    done: bool,
    s_next: np.ndarray,
    primary: MlpParams,
    target: MlpParams,
    gamma: float,
    rule: str = "double",
) -> float:
    if done:
        return float(r)
    return float(
        compute_td_targets(
            np.array([r]), np.array([0.0]), forward(target, s_next), forward(primary, s_next), gamma, rule
        )[0]
    )


@dataclass
class DqnBatch:
    s: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    s_next: np.ndarray
    dones: np.ndarray

    @classmethod
    def from_experiences(cls, samples: List[Experience]) -> "DqnBatch":
        if not samples:
            raise ValueError("DQN batch must not be empty")
        high = isinstance(samples[0], ExperienceHigh)
        return cls(
            s=np.stack([t.s for t in samples]),
            actions=np.asarray([t.z if high else t.a for t in samples], dtype=np.int64),
            rewards=np.asarray([t.r_avg if high else t.r for t in samples], dtype=np.float64),
            s_next=np.stack([t.s_next for t in samples]),
            dones=np.asarray([t.done for t in samples], dtype=np.float64),
        )

    def __len__(self):
        return self.s.shape[0]


def td_loss(
    primary: MlpParams,
    target: MlpParams,
    batch: DqnBatch,
    gamma: float,
    rule: str = "double",
) -> Tuple[float, Gradients]:
    """Mean squared TD error on the taken actions and its gradient for the primary network"""
    targets = compute_td_targets(
        batch.rewards, batch.dones, forward(target, batch.s_next), forward(primary, batch.s_next), gamma, rule
    )
    q = forward(primary, batch.s)
    rows = np.arange(len(batch))
    residual = q[rows, batch.actions] - targets
    upstream = np.zeros_like(q)
    upstream[rows, batch.actions] = 2.0 * residual / len(batch)
    return float(np.mean(residual ** 2)), backward(primary, batch.s, upstream)


class DqnLearner:
    """
    Primary and target networks with replay and epsilon state
    The target network is hard-synchronized every n_update primary updates.
    """

    def __init__(
        self,
        n_actions: int,
        config: Optional[DqnConfig] = None,
        rng: Optional[np.random.Generator] = None,
        obs_dim: int = 14,
        role: str = "low_dqn",
    ):
        self.config = config or DqnConfig()
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self.n_actions = n_actions
        self.role = role
        self.primary = build_mlp(obs_dim, n_actions, self.rng, self.config.hidden_sizes, role=role)
        self.target = self.primary.copy()
        self.opt = OptimizerState.for_network(self.primary, lr=self.config.lr)
        self.buffer: ReplayBuffer[Experience] = ReplayBuffer(self.config.buffer_size)
        self.epsilon = self.config.epsilon
        self.updates = 0

    def q_values(self, s: np.ndarray) -> np.ndarray:
        return forward(self.primary, s)

    def act(self, s: np.ndarray, greedy: bool = False) -> int:
        return epsilon_greedy(self.q_values(s), 0.0 if greedy else self.epsilon, self.rng)

    def store(self, experience: Experience):
        self.buffer.add(experience)

    @property
    def ready(self) -> bool:
        return len(self.buffer) >= self.config.update_gate

    def td_update(self, batch: Optional[DqnBatch] = None) -> float:
        """One gradient step on a sampled (or given) batch; returns the pre-update loss"""
        if batch is None:
            batch = DqnBatch.from_experiences(self.buffer.sample(self.config.batch_size, self.rng))
        loss, grads = td_loss(self.primary, self.target, batch, self.config.gamma, self.config.target_rule)
        optimizer_step(self.primary, grads, self.opt)
        self.updates += 1
        if self.updates % self.config.n_update == 0:
            self.target.load_from(self.primary)
            logger.debug(f"{self.role}: target network synchronized at update {self.updates}")
        return loss

    def decay_epsilon(self) -> float:
        self.epsilon = decay_epsilon(self.epsilon, self.config.beta, self.config.epsilon_min)
        return self.epsilon

    def save(self, path: str, metadata: Optional[Dict[str, Any]] = None):
        meta = {"kind": self.role, "n_actions": self.n_actions, "updates": self.updates}
        meta.update(metadata or {})
        return save_checkpoint(path, {self.role: self.primary}, metadata=meta)

    def load_weights(self, path: str) -> Dict[str, Any]:
        networks, metadata = load_checkpoint(path)
        if self.role not in networks:
            raise ValueError(f"{path} holds no {self.role} network (found {sorted(networks)})")
        net = networks[self.role]
        if net.layer_sizes != self.primary.layer_sizes:
            raise ValueError(
                f"{path}: {self.role} layer sizes {net.layer_sizes} do not match {self.primary.layer_sizes}"
            )
        self.primary = net
        self.target = net.copy()
        self.opt = OptimizerState.for_network(self.primary, lr=self.config.lr)
        return metadata

    def __repr__(self):
        return f"<DqnLearner {self.role} eps={self.epsilon:.3f} updates={self.updates} buffer={self.buffer!r}>"


class DqnTrainer:
    """
    Episode loop shared by the low- and high-level agents
    Subclasses implement run_episode; evaluation fires every eval_every environment steps.
    """

    def __init__(
        self,
        learner: DqnLearner,
        eval_every: Optional[int] = None,
        eval_hook: Optional[EvalHook] = None,
    ):
        self.learner = learner
        self.eval_every = eval_every
        self.eval_hook = eval_hook
        self.env_steps = 0
        self.episode = 0
        self.metrics: List[EpisodeMetrics] = []
        self.evaluations: List[EvaluationPoint] = []

    def _tick(self):
        """Advance the training clock by one environment step"""
        self.env_steps += 1
        if self.eval_hook is not None and self.eval_every and self.env_steps % self.eval_every == 0:
            point = self.eval_hook(self.env_steps, self.episode)
            self.evaluations.append(point)
            logger.info(
                f"{self.learner.role} eval @ {self.env_steps} steps: success rate {point.success_rate:.3f}"
            )

    def run_episode(self) -> EpisodeMetrics:
        raise NotImplementedError

    def train(self, episodes: Optional[int] = None, progress: bool = False) -> List[EpisodeMetrics]:
        episodes = self.learner.config.episodes if episodes is None else episodes
        logger.info(f"Training {self.learner.role} for {episodes} episodes")
        for _ in tqdm(range(episodes), desc=self.learner.role, disable=not progress):
            row = self.run_episode()
            self.learner.decay_epsilon()
            self.metrics.append(row)
            self.episode += 1
            if self.episode % 100 == 0:
                recent = self.metrics[-100:]
                logger.info(
                    f"{self.learner.role} episode {self.episode}: mean return "
                    f"{np.mean([m.episode_return for m in recent]):.2f}, eps {self.learner.epsilon:.3f}"
                )
        return self.metrics

    def metrics_rows(self) -> List[Dict[str, Any]]:
        return [m.to_dict() for m in self.metrics]

    def evaluation_rows(self) -> List[Dict[str, Any]]:
        return [p.to_dict() for p in self.evaluations]

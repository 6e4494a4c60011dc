"""
Skill Discovery Trainer
Rolls out the skill-conditioned policy with z drawn once per episode, rewards it only with
the discriminator, and updates discriminator + SAC once per environment step.
"""

from typing import Any, Dict, List, Optional

import numpy as np
from loguru import logger
from tqdm import tqdm

from core.environment import MergeEnvironment
from core.models import ControlInput, EpisodeMetrics, SkillConfig, SkillReplaySample
from core.neural import forward, sample_squashed_gaussian
from agents.replay import ReplayBuffer
from .discriminator import SkillDiscriminator
from .library import SkillLibrary
from .sac import SacBatch, build_sac_ensemble, sac_update, skill_vector


def sample_skill_prior(rng: np.random.Generator, n_skills: int = 16) -> int:
    """Uniform p(z)"""
    return int(rng.integers(0, n_skills))


class SkillTrainer:
    """Owns the SAC ensemble, discriminator and replay buffer for one skill-discovery run"""

    def __init__(
        self,
        config: Optional[SkillConfig] = None,
        env: Optional[MergeEnvironment] = None,
        rng: Optional[np.random.Generator] = None,
        fingerprint: str = "",
    ):
        self.config = config or SkillConfig()
        self.env = env or MergeEnvironment()
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self.fingerprint = fingerprint
        self.n_skills = self.config.n_skills

        self.ensemble = build_sac_ensemble(self.n_skills, self.rng, self.config)
        self.discriminator = SkillDiscriminator(
            self.n_skills,
            self.rng,
            hidden_sizes=self.config.hidden_sizes,
            lr=self.config.lr,
            reward_floor=self.config.reward_floor,
        )
        self.buffer: ReplayBuffer[SkillReplaySample] = ReplayBuffer(self.config.buffer_size)
        self.metrics: List[EpisodeMetrics] = []
        self.env_steps = 0
        self.updates = 0

    def library(self) -> SkillLibrary:
        return SkillLibrary(
            policy=self.ensemble.policy,
            n_skills=self.n_skills,
            fingerprint=self.fingerprint,
            a_max=self.env.config.a_max,
            head=self.ensemble.head,
        )

    def run_episode(self, episode: int) -> EpisodeMetrics:
        z = sample_skill_prior(self.rng, self.n_skills)
        z_vec = skill_vector(z, self.n_skills)
        self.env.reset()
        s = self.env.observe().encoding

        rewards: List[float] = []
        losses: Dict[str, List[float]] = {"disc": [], "disc_acc": [], "q1": [], "q2": [], "value": [], "policy": []}
        while not self.env.done:
            head_out = forward(self.ensemble.policy, np.concatenate([s, z_vec]))
            action = sample_squashed_gaussian(head_out, self.rng, self.ensemble.head).action[0]
            self.env.step(
                ControlInput(a=float(action[0]) * self.env.config.a_max, l_p=float(action[1])),
                skill=z,
            )
            self.env_steps += 1
            s_next = self.env.observe().encoding
            r_z = self.discriminator.reward(s_next, z)
            rewards.append(r_z)
            self.buffer.add(SkillReplaySample(s=s, z=z, action=action, r_z=r_z, s_next=s_next, done=self.env.done))

            if len(self.buffer) >= self.config.update_gate:
                self._update(losses)
            s = s_next

        extra: Dict[str, Any] = {
            "skill": z,
            "mean_r_z": float(np.mean(rewards)),
            "disc_accuracy": _mean_or_none(losses["disc_acc"]),
        }
        for name in ("q1", "q2", "value", "policy"):
            extra[f"{name}_loss"] = _mean_or_none(losses[name])
        return EpisodeMetrics(
            episode=episode,
            episode_return=float(np.sum(rewards)),
            steps=len(rewards),
            outcome=self.env.state.terminal.value,
            loss_mean=_mean_or_none(losses["disc"]),
            env_steps=self.env_steps,
            extra=extra,
        )

    def _update(self, losses: Dict[str, List[float]]):
        samples = self.buffer.sample(self.config.batch_size, self.rng)
        batch = SacBatch.from_samples(samples)
        losses["disc_acc"].append(self.discriminator.accuracy(batch.s_next, batch.z))
        losses["disc"].append(self.discriminator.update(batch.s_next, batch.z))
        for name, value in sac_update(batch, self.ensemble, self.config, self.rng).items():
            if name in losses:
                losses[name].append(value)
        self.updates += 1

    def train(self, episodes: Optional[int] = None, progress: bool = False) -> SkillLibrary:
        episodes = self.config.episodes if episodes is None else episodes
        logger.info(f"Training {self.n_skills} skills for {episodes} episodes")
        start = len(self.metrics)
        for episode in tqdm(range(start, start + episodes), desc="skills", disable=not progress):
            row = self.run_episode(episode)
            self.metrics.append(row)
            if (episode + 1) % 100 == 0:
                recent = self.metrics[-100:]
                logger.info(
                    f"Episode {episode + 1}: mean r_z {np.mean([m.extra['mean_r_z'] for m in recent]):.3f}, "
                    f"buffer {len(self.buffer)}, updates {self.updates}"
                )
        logger.info(f"Skill training finished after {self.env_steps} environment steps")
        return self.library()

    def metrics_rows(self) -> List[Dict[str, Any]]:
        rows = []
        for m in self.metrics:
            row = m.to_dict()
            row.pop("epsilon")
            row["disc_loss"] = row.pop("loss_mean")
            rows.append(row)
        return rows

    def __repr__(self):
        return f"<SkillTrainer skills={self.n_skills} episodes={len(self.metrics)} buffer={self.buffer!r}>"


def _mean_or_none(values: List[float]) -> Optional[float]:
    return float(np.mean(values)) if values else None


def train_skills(
    config: SkillConfig,
    env: MergeEnvironment,
    rng: np.random.Generator,
    fingerprint: str = "",
) -> SkillLibrary:
    return SkillTrainer(config, env, rng, fingerprint).train()

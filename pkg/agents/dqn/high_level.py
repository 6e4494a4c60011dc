"""
High-Level Agent
Skill selector: picks a skill, lets it drive for up to n_step frames, and learns from the
mean driver reward of the frames the skill actually ran.
"""

from typing import List, Optional, Tuple

import numpy as np
from loguru import logger

from agents.skills import SkillLibrary
from core.environment import MergeEnvironment
from core.models import DqnConfig, EpisodeMetrics, ExperienceHigh
from core.reward import DriverRewardModel
from .learner import DqnLearner, DqnTrainer, EvalHook


class HighLevelTrainer(DqnTrainer):

    def __init__(
        self,
        skills: SkillLibrary,
        config: Optional[DqnConfig] = None,
        env: Optional[MergeEnvironment] = None,
        reward: Optional[DriverRewardModel] = None,
        rng: Optional[np.random.Generator] = None,
        eval_every: Optional[int] = None,
        eval_hook: Optional[EvalHook] = None,
        fingerprint: Optional[str] = None,
        deterministic_skills: bool = False,
    ):
        if fingerprint is not None:
            skills.check_fingerprint(fingerprint)
        rng = rng if rng is not None else np.random.default_rng(0)
        super().__init__(DqnLearner(skills.n_skills, config, rng, role="high_dqn"), eval_every, eval_hook)
        self.skills = skills
        self.env = env or MergeEnvironment()
        self.reward = reward or DriverRewardModel()
        self.rng = rng
        self.deterministic_skills = deterministic_skills
        self.high_level_steps: List[int] = []

    def run_episode(self) -> EpisodeMetrics:
        learner = self.learner
        n_step = learner.config.n_step
        epsilon = learner.epsilon
        self.env.reset()
        s = self.env.observe().encoding
        total, steps, losses, decisions = 0.0, 0, [], 0

        while not self.env.done:
            z = learner.act(s)
            r_sum, i = 0.0, 0
            s_cur = s
            while i < n_step and not self.env.done:
                control = self.skills.act(s_cur, z, self.rng, self.deterministic_skills)
                state = self.env.step(control, skill=z)
                r = self.reward.score(state, self.env.raw_observation(), act=None)
                r_sum += r
                i += 1
                s_cur = self.env.observe().encoding
                self._tick()
            learner.store(ExperienceHigh(s=s, z=z, r_avg=r_sum / i, s_next=s_cur, done=self.env.done, steps=i))
            decisions += 1
            if learner.ready:
                losses.append(learner.td_update())
            total += r_sum
            steps += i
            s = s_cur

        self.high_level_steps.append(decisions)
        return EpisodeMetrics(
            episode=self.episode,
            episode_return=total,
            steps=steps,
            outcome=self.env.state.terminal.value,
            epsilon=epsilon,
            loss_mean=float(np.mean(losses)) if losses else None,
            env_steps=self.env_steps,
            extra={"decisions": decisions},
        )

    def save(self, path: str):
        return self.learner.save(
            path,
            metadata={"n_skills": self.skills.n_skills, "fingerprint": self.skills.fingerprint, "n_step": self.learner.config.n_step},
        )


def train_high_level(
    config: DqnConfig,
    env: MergeEnvironment,
    reward: DriverRewardModel,
    skills: SkillLibrary,
    rng: np.random.Generator,
    eval_every: Optional[int] = None,
    eval_hook: Optional[EvalHook] = None,
    fingerprint: Optional[str] = None,
) -> Tuple[DqnLearner, List[EpisodeMetrics]]:
    trainer = HighLevelTrainer(skills, config, env, reward, rng, eval_every, eval_hook, fingerprint)
    logger.info(f"Skill selector over {skills.n_skills} skills, n_step={config.n_step}")
    metrics = trainer.train()
    return trainer.learner, metrics

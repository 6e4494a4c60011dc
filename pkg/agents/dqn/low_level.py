"""
Low-Level Agent
DQN over the six macro-actions, rewarded by the driver reward every frame
"""

from typing import List, Optional, Tuple

import numpy as np

from core.environment import MergeEnvironment
from core.models import DqnConfig, EpisodeMetrics, ExperienceLow, MACRO_ACTIONS, MacroAction
from core.reward import DriverRewardModel
from .learner import DqnLearner, DqnTrainer, EvalHook
from .macro_actions import realize_macro_action


class LowLevelTrainer(DqnTrainer):

    def __init__(
        self,
        config: Optional[DqnConfig] = None,
        env: Optional[MergeEnvironment] = None,
        reward: Optional[DriverRewardModel] = None,
        rng: Optional[np.random.Generator] = None,
        eval_every: Optional[int] = None,
        eval_hook: Optional[EvalHook] = None,
    ):
        rng = rng if rng is not None else np.random.default_rng(0)
        super().__init__(DqnLearner(len(MACRO_ACTIONS), config, rng, role="low_dqn"), eval_every, eval_hook)
        self.env = env or MergeEnvironment()
        self.reward = reward or DriverRewardModel()
        self.rng = rng

    def run_episode(self) -> EpisodeMetrics:
        learner = self.learner
        epsilon = learner.epsilon
        self.env.reset()
        s = self.env.observe().encoding
        total, steps, losses = 0.0, 0, []

        while not self.env.done:
            label = MacroAction.from_index(learner.act(s))
            state = self.env.step(realize_macro_action(label, self.rng), action=label.value)
            r = self.reward.score(state, self.env.raw_observation(), act=label)
            s_next = self.env.observe().encoding
            learner.store(ExperienceLow(s=s, a=label.index, r=r, s_next=s_next, done=self.env.done))
            if learner.ready:
                losses.append(learner.td_update())
            total += r
            steps += 1
            s = s_next
            self._tick()

        return EpisodeMetrics(
            episode=self.episode,
            episode_return=total,
            steps=steps,
            outcome=self.env.state.terminal.value,
            epsilon=epsilon,
            loss_mean=float(np.mean(losses)) if losses else None,
            env_steps=self.env_steps,
        )


def train_low_level(
    config: DqnConfig,
    env: MergeEnvironment,
    reward: DriverRewardModel,
    rng: np.random.Generator,
    eval_every: Optional[int] = None,
    eval_hook: Optional[EvalHook] = None,
) -> Tuple[DqnLearner, List[EpisodeMetrics]]:
    trainer = LowLevelTrainer(config, env, reward, rng, eval_every, eval_hook)
    metrics = trainer.train()
    return trainer.learner, metrics

"""
Policy Evaluator
Success rate of a frozen policy over independent episodes, each seeded from its own child stream
"""

from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional

import numpy as np
from loguru import logger

from core.environment import MergeEnvironment
from core.models import EnvConfig, EvaluationPoint, ObservationConfig, Outcome, RoadGeometry, TrajectoryFrame
from .policies import MergePolicy


@dataclass
class EvaluationResult:
    episodes: int
    successes: int
    outcomes: Dict[str, int] = field(default_factory=dict)

    @property
    def success_rate(self) -> float:
        return self.successes / self.episodes if self.episodes else 0.0

    def to_point(self, env_steps: int, episode: int) -> EvaluationPoint:
        return EvaluationPoint(
            env_steps=env_steps,
            episode=episode,
            success_rate=self.success_rate,
            episodes=self.episodes,
            outcomes=dict(self.outcomes),
        )

    def get_summary(self) -> Dict[str, object]:
        return {
            "episodes": self.episodes,
            "successes": self.successes,
            "success_rate": self.success_rate,
            **{f"n_{k}": v for k, v in sorted(self.outcomes.items())},
        }


def episode_streams(base_seed: int, episode: int):
    """Independent (environment, policy) generators for one evaluation episode"""
    env_seq, policy_seq = np.random.SeedSequence([base_seed, episode]).spawn(2)
    return np.random.default_rng(env_seq), np.random.default_rng(policy_seq)


def run_episode(
    policy: MergePolicy,
    env: MergeEnvironment,
    env_rng: np.random.Generator,
    policy_rng: np.random.Generator,
) -> Outcome:
    env.reset(env_rng)
    policy.reset(policy_rng)
    while not env.done:
        decision = policy.act(env)
        env.step(decision.control, skill=decision.skill, action=decision.action)
    return env.state.terminal


class Evaluator:
    """
    Owns a private environment so evaluation never touches a training environment's state
    """

    def __init__(
        self,
        env_config: Optional[EnvConfig] = None,
        geometry: Optional[RoadGeometry] = None,
        observation_config: Optional[ObservationConfig] = None,
        rng: Optional[np.random.Generator] = None,
    ):
        self.env = MergeEnvironment(env_config, geometry, observation_config)
        self.rng = rng if rng is not None else np.random.default_rng(np.random.SeedSequence(0))

    def run(
        self,
        policy: MergePolicy,
        episodes: int,
        listener: Optional[Callable[[TrajectoryFrame], None]] = None,
    ) -> EvaluationResult:
        if episodes < 1:
            raise ValueError(f"episodes must be >= 1, got {episodes}")
        base_seed = int(self.rng.integers(0, 2**32))
        if listener is not None:
            self.env.add_frame_listener(listener)
        outcomes: Counter = Counter()
        try:
            for i in range(episodes):
                env_rng, policy_rng = episode_streams(base_seed, i)
                outcomes[run_episode(policy, self.env, env_rng, policy_rng).value] += 1
        finally:
            if listener is not None:
                self.env.remove_frame_listener(listener)

        result = EvaluationResult(
            episodes=episodes,
            successes=outcomes[Outcome.FINISHED.value],
            outcomes=dict(outcomes),
        )
        logger.debug(f"Evaluated {policy.name}: {result.get_summary()}")
        return result

    def hook(self, policy_factory: Callable[[], MergePolicy], episodes: int):
        """Training-time callback: (env_steps, episode) -> EvaluationPoint"""
        def _evaluate(env_steps: int, episode: int) -> EvaluationPoint:
            return self.run(policy_factory(), episodes).to_point(env_steps, episode)

        return _evaluate


def evaluate(
    policy: MergePolicy,
    env_config: Optional[EnvConfig] = None,
    episodes: int = 500,
    rng: Optional[np.random.Generator] = None,
    geometry: Optional[RoadGeometry] = None,
    observation_config: Optional[ObservationConfig] = None,
) -> float:
    """Fraction of episodes that end with the ego vehicle reaching the end of the highway"""
    return Evaluator(env_config, geometry, observation_config, rng).run(policy, episodes).success_rate

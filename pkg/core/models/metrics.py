from dataclasses import dataclass, field
from typing import Dict, Any, Optional


@dataclass
class MetricsRecord:
    """One scalar sample of a metric series"""
    index: int
    name: str
    value: float


@dataclass
class EpisodeMetrics:
    """Per-episode training row"""
    episode: int
    episode_return: float
    steps: int
    outcome: str
    epsilon: Optional[float] = None
    loss_mean: Optional[float] = None
    env_steps: int = 0
    extra: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        row = {
            "episode": self.episode,
            "return": self.episode_return,
            "steps": self.steps,
            "env_steps": self.env_steps,
            "epsilon": self.epsilon,
            "outcome": self.outcome,
            "loss_mean": self.loss_mean,
        }
        row.update(self.extra)
        return row

    def __repr__(self):
        return f"<EpisodeMetrics #{self.episode} return={self.episode_return:.2f} {self.outcome}>"


@dataclass
class EvaluationPoint:
    """Success rate measured at a training-step checkpoint"""
    env_steps: int
    episode: int
    success_rate: float
    episodes: int
    outcomes: Dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        row = {
            "env_steps": self.env_steps,
            "episode": self.episode,
            "success_rate": self.success_rate,
            "episodes": self.episodes,
        }
        for name, count in sorted(self.outcomes.items()):
            row[f"n_{name}"] = count
        return row

"""
Discrete decision makers: macro-action DQN and the skill-selecting DQN
"""

from .macro_actions import (
    EXP_RATE,
    macro_acceleration,
    realize_macro_action,
    sample_truncated_laplace,
)
from .learner import (
    DqnBatch,
    DqnLearner,
    DqnTrainer,
    compute_td_targets,
    decay_epsilon,
    dqn_target,
    epsilon_greedy,
    td_loss,
)
from .low_level import LowLevelTrainer, train_low_level
from .high_level import HighLevelTrainer, train_high_level

__all__ = [
    "EXP_RATE",
    "macro_acceleration",
    "realize_macro_action",
    "sample_truncated_laplace",
    "DqnBatch",
    "DqnLearner",
    "DqnTrainer",
    "compute_td_targets",
    "decay_epsilon",
    "dqn_target",
    "epsilon_greedy",
    "td_loss",
    "LowLevelTrainer",
    "train_low_level",
    "HighLevelTrainer",
    "train_high_level",
]

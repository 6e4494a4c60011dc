"""
Evaluation of frozen policies
"""

from .policies import (
    MergePolicy,
    PolicyDecision,
    ConstantMacroPolicy,
    ScriptedMergePolicy,
    GreedyLowLevelPolicy,
    GreedyHrlPolicy,
)
from .evaluator import EvaluationResult, Evaluator, episode_streams, evaluate, run_episode

__all__ = [
    "MergePolicy",
    "PolicyDecision",
    "ConstantMacroPolicy",
    "ScriptedMergePolicy",
    "GreedyLowLevelPolicy",
    "GreedyHrlPolicy",
    "EvaluationResult",
    "Evaluator",
    "episode_streams",
    "evaluate",
    "run_episode",
]

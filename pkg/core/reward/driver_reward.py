"""
Driver Reward
Weighted sum of collision, headway, velocity, effort, not-merging and stopping features
"""

from dataclasses import dataclass
from typing import Dict, Optional

from core.models import (
    HeadwayConstants,
    Lane,
    MacroAction,
    Outcome,
    RewardConfig,
    RewardWeights,
)

_MODERATE = (MacroAction.ACCELERATE, MacroAction.DECELERATE)
_HARD = (MacroAction.HARD_ACCELERATE, MacroAction.HARD_DECELERATE)


@dataclass(frozen=True)
class RewardInput:
    outcome: Outcome
    d_front: float
    v_agent: float
    act: Optional[MacroAction]
    lane: Lane


def headway_term(d_front: float, constants: Optional[HeadwayConstants] = None, continuous: bool = False) -> float:
    """
    Headway feature around the nominal gap
    The printed form jumps from -1 to 3 at d_close; `continuous` switches to
    a ramp -1 -> 1 on [d_close, d_nom) falling to 0 at d_far.
    """
    c = constants or HeadwayConstants()
    span = c.d_nom - c.d_close
    if d_front < c.d_close:
        return -1.0
    if d_front < c.d_nom:
        if continuous:
            return -1.0 + 2.0 * (d_front - c.d_close) / span
        return 1.0 - 2.0 * (d_front - c.d_nom) / span
    if d_front < c.d_far:
        if continuous:
            return 1.0 - (d_front - c.d_nom) / (c.d_far - c.d_nom)
        return (d_front - c.d_nom) / span
    return 0.0


def velocity_term(
    v: float,
    constants: Optional[HeadwayConstants] = None,
    v_max: float = 29.16,
    continuous: bool = False,
) -> float:
    c = constants or HeadwayConstants()
    if v <= c.v_nom:
        if continuous:
            return -1.0 + 2.0 * v / c.v_nom
        return (v - c.v_nom) / c.v_nom
    return (v_max - v) / (v_max - c.v_nom)


def effort_term(act: Optional[MacroAction]) -> float:
    if act in _MODERATE:
        return -0.25
    if act in _HARD:
        return -1.0
    return 0.0


def stopping_term(
    act: Optional[MacroAction],
    d_front: float,
    v: float,
    constants: Optional[HeadwayConstants] = None,
) -> float:
    """Penalize crawling with open road ahead unless the agent is hard-accelerating"""
    c = constants or HeadwayConstants()
    if act != MacroAction.HARD_ACCELERATE and d_front > c.d_far and v < c.v_nom:
        return -1.0
    return 0.0


def not_merging_term(lane: Lane) -> float:
    return -1.0 if lane == Lane.RAMP else 0.0


def collision_term(outcome: Outcome) -> float:
    return 1.0 if outcome.is_failure else 0.0


def reward_terms(reward_input: RewardInput, config: Optional[RewardConfig] = None) -> Dict[str, float]:
    config = config or RewardConfig()
    c = config.headway
    v = min(max(reward_input.v_agent, 0.0), config.v_max)
    act = reward_input.act if reward_input.act is not None else config.non_macro_act
    return {
        "c": collision_term(reward_input.outcome),
        "h": headway_term(reward_input.d_front, c, config.continuous),
        "m": velocity_term(v, c, config.v_max, config.continuous),
        "e": effort_term(act),
        "nm": not_merging_term(reward_input.lane),
        "s": stopping_term(act, reward_input.d_front, v, c),
    }


def driver_reward(
    reward_input: RewardInput,
    weights: Optional[RewardWeights] = None,
    config: Optional[RewardConfig] = None,
) -> float:
    config = config or RewardConfig()
    w = weights or config.weights
    terms = reward_terms(reward_input, config)
    return (
        terms["c"] * w.w_c
        + terms["h"] * w.w_h
        + terms["m"] * w.w_m
        + terms["e"] * w.w_e
        + terms["nm"] * w.w_nm
        + terms["s"] * w.w_s
    )


class DriverRewardModel:
    """Driver reward bound to a config; scores environment frames"""

    def __init__(self, config: Optional[RewardConfig] = None):
        self.config = config or RewardConfig()

    def score(self, state, raw_observation, act: Optional[MacroAction] = None) -> float:
        """Reward for the frame that produced `state`"""
        reward_input = RewardInput(
            outcome=state.terminal,
            d_front=raw_observation.d_front,
            v_agent=state.ego.v,
            act=act,
            lane=state.ego.lane,
        )
        return driver_reward(reward_input, config=self.config)

    def __repr__(self):
        return f"<DriverRewardModel weights={self.config.weights.model_dump()} continuous={self.config.continuous}>"

from .driver_reward import (
    RewardInput,
    DriverRewardModel,
    headway_term,
    velocity_term,
    effort_term,
    stopping_term,
    not_merging_term,
    collision_term,
    reward_terms,
    driver_reward,
)

__all__ = [
    "RewardInput",
    "DriverRewardModel",
    "headway_term",
    "velocity_term",
    "effort_term",
    "stopping_term",
    "not_merging_term",
    "collision_term",
    "reward_terms",
    "driver_reward",
]

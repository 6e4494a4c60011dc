from .simulator import (
    TerminalStateError,
    MergeEnvironment,
    init_episode,
    step_kinematics,
    resolve_lane,
    detect_terminal,
    env_step,
)
from .traffic import env_vehicle_policy, idm_acceleration

__all__ = [
    "TerminalStateError",
    "MergeEnvironment",
    "init_episode",
    "step_kinematics",
    "resolve_lane",
    "detect_terminal",
    "env_step",
    "env_vehicle_policy",
    "idm_acceleration",
]

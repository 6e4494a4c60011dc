"""
Macro-Action Realization
Each discrete label becomes a sampled acceleration (and lane-change intent for Merge)
"""

import numpy as np

from core.models import ControlInput, MacroAction

EXP_RATE = 0.75  # mean 4/3 m/s^2
LAPLACE_SCALE = 0.1
MAINTAIN_BOUND = 0.25


def sample_truncated_laplace(rng: np.random.Generator, scale: float = LAPLACE_SCALE, bound: float = MAINTAIN_BOUND) -> float:
    """Exact Laplace(0, scale) restricted to [-bound, bound] by rejection"""
    while True:
        a = float(rng.laplace(0.0, scale))
        if -bound <= a <= bound:
            return a


def macro_acceleration(action: MacroAction, draw: float) -> float:
    """
    Acceleration for a label given its random draw: the accepted Laplace sample for
    Maintain, an Exp(0.75) sample for the four accelerating/braking labels, ignored for Merge.
    """
    if action is MacroAction.MAINTAIN:
        if abs(draw) > MAINTAIN_BOUND:
            raise ValueError(f"Maintain draw {draw} outside [-{MAINTAIN_BOUND}, {MAINTAIN_BOUND}]")
        return draw
    if action is MacroAction.ACCELERATE:
        return min(0.25 + draw, 2.0)
    if action is MacroAction.DECELERATE:
        return max(-0.25 - draw, -2.0)
    if action is MacroAction.HARD_ACCELERATE:
        return min(2.0 + draw, 3.0)
    if action is MacroAction.HARD_DECELERATE:
        return max(-2.0 - draw, -4.5)
    return 0.0


def realize_macro_action(action: MacroAction, rng: np.random.Generator) -> ControlInput:
    if action is MacroAction.MERGE:
        return ControlInput(a=0.0, l_p=1.0)
    if action is MacroAction.MAINTAIN:
        draw = sample_truncated_laplace(rng)
    else:
        draw = float(rng.exponential(1.0 / EXP_RATE))
    return ControlInput(a=macro_acceleration(action, draw), l_p=0.0)

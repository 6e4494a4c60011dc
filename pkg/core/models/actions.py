from enum import Enum
from typing import List


class MacroAction(Enum):
    """Stochastic primitives of the low-level DQN agent; index order is the network output order"""
    MAINTAIN = "Maintain"
    ACCELERATE = "Accelerate"
    DECELERATE = "Decelerate"
    HARD_ACCELERATE = "Hard-Accelerate"
    HARD_DECELERATE = "Hard-Decelerate"
    MERGE = "Merge"

    @property
    def index(self) -> int:
        return MACRO_ACTIONS.index(self)

    @classmethod
    def from_index(cls, index: int) -> "MacroAction":
        return MACRO_ACTIONS[index]

    @classmethod
    def from_label(cls, label: str) -> "MacroAction":
        """Accept either the printed label ("Hard-Accelerate") or the enum name"""
        for action in cls:
            if label in (action.value, action.name):
                return action
        raise ValueError(f"Unknown macro-action label: {label}")


MACRO_ACTIONS: List[MacroAction] = list(MacroAction)

from dataclasses import dataclass
from typing import Dict, Any

import numpy as np


@dataclass(frozen=True)
class SkillReplaySample:
    """Skill-discovery transition; s and s_next are quantized encodings"""
    s: np.ndarray
    z: int
    action: np.ndarray  # (a_act, l_p)
    r_z: float
    s_next: np.ndarray
    done: bool


@dataclass(frozen=True)
class ExperienceLow:
    s: np.ndarray
    a: int  # macro-action index 0..5
    r: float
    s_next: np.ndarray
    done: bool


@dataclass(frozen=True)
class ExperienceHigh:
    """Skill-selection transition; r_avg is the mean reward of the frames the skill ran"""
    s: np.ndarray
    z: int
    r_avg: float
    s_next: np.ndarray
    done: bool
    steps: int = 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "z": self.z,
            "r_avg": self.r_avg,
            "done": self.done,
            "steps": self.steps,
        }

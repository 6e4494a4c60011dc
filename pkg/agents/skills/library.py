"""
Skill Library
Frozen skill-conditioned policy; skill z is executed by conditioning on its one-hot vector
"""

from pathlib import Path
from typing import Optional, Union

import numpy as np
from loguru import logger

from core.models import ControlInput
from core.neural import (
    GaussianHead,
    MlpParams,
    deterministic_action,
    forward,
    load_checkpoint,
    sample_squashed_gaussian,
    save_checkpoint,
)
from .sac import skill_vector


class FingerprintMismatchError(ValueError):
    """Skill library was trained against a different observation/action interface"""


class SkillLibrary:
    """
    Immutable after construction: the policy parameters are copied and made read-only
    """

    def __init__(
        self,
        policy: MlpParams,
        n_skills: int,
        fingerprint: str = "",
        a_max: float = 4.5,
        head: Optional[GaussianHead] = None,
    ):
        self.policy = policy.copy()
        for p in self.policy.parameters():
            p.setflags(write=False)
        self.n_skills = n_skills
        self.fingerprint = fingerprint
        self.a_max = a_max
        self.head = head or GaussianHead()

    def check_fingerprint(self, expected: str):
        if self.fingerprint != expected:
            logger.error(f"Skill library fingerprint {self.fingerprint!r} does not match environment {expected!r}")
            raise FingerprintMismatchError(
                f"Skill library was trained for fingerprint {self.fingerprint!r}, "
                f"environment expects {expected!r}"
            )

    def raw_action(
        self,
        s: np.ndarray,
        z: Union[int, np.ndarray],
        rng: Optional[np.random.Generator] = None,
        deterministic: bool = False,
    ) -> np.ndarray:
        """(a_act, l_p) in [-1, 2/3] x [0, 1]"""
        z_vec = skill_vector(z, self.n_skills) if np.isscalar(z) else np.asarray(z, dtype=np.float64)
        if z_vec.shape != (self.n_skills,) or z_vec.sum() != 1.0 or np.count_nonzero(z_vec) != 1:
            raise ValueError(f"Skill vector must be one-hot of length {self.n_skills}")
        head_out = forward(self.policy, np.concatenate([np.asarray(s, dtype=np.float64), z_vec]))
        if deterministic:
            return deterministic_action(head_out, self.head)[0]
        if rng is None:
            raise ValueError("Stochastic skill execution needs an rng")
        return sample_squashed_gaussian(head_out, rng, self.head).action[0]

    def act(
        self,
        s: np.ndarray,
        z: Union[int, np.ndarray],
        rng: Optional[np.random.Generator] = None,
        deterministic: bool = False,
    ) -> ControlInput:
        a_act, l_p = self.raw_action(s, z, rng, deterministic)
        return ControlInput(a=float(a_act) * self.a_max, l_p=float(l_p))

    def save(self, path: str) -> Path:
        return save_checkpoint(
            path,
            {"policy": self.policy},
            metadata={
                "kind": "skill_library",
                "n_skills": self.n_skills,
                "fingerprint": self.fingerprint,
                "a_max": self.a_max,
                "log_std_min": self.head.log_std_min,
                "log_std_max": self.head.log_std_max,
            },
        )

    @classmethod
    def load(cls, path: str, expected_fingerprint: Optional[str] = None) -> "SkillLibrary":
        networks, metadata = load_checkpoint(path)
        if metadata.get("kind") != "skill_library" or "policy" not in networks:
            raise ValueError(f"{path} is not a skill library checkpoint")
        library = cls(
            policy=networks["policy"],
            n_skills=int(metadata["n_skills"]),
            fingerprint=str(metadata.get("fingerprint", "")),
            a_max=float(metadata.get("a_max", 4.5)),
            head=GaussianHead(
                log_std_min=float(metadata.get("log_std_min", -20.0)),
                log_std_max=float(metadata.get("log_std_max", 2.0)),
            ),
        )
        if expected_fingerprint is not None:
            library.check_fingerprint(expected_fingerprint)
        logger.info(f"Loaded skill library with {library.n_skills} skills from {path}")
        return library

    def __repr__(self):
        return f"<SkillLibrary skills={self.n_skills} fingerprint={self.fingerprint}>"


def act(
    library: SkillLibrary,
    s: np.ndarray,
    z: Union[int, np.ndarray],
    rng: Optional[np.random.Generator] = None,
    deterministic: bool = False,
    expected_fingerprint: Optional[str] = None,
) -> ControlInput:
    """a = a_act * a_max; refuses to run against a foreign observation interface"""
    if expected_fingerprint is not None:
        library.check_fingerprint(expected_fingerprint)
    return library.act(s, z, rng, deterministic)

"""
Configuration models
Validated with pydantic so a bad YAML key is reported by name; runtime state stays in dataclasses.
"""

import hashlib
from typing import Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .actions import MacroAction


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class RoadGeometry(_Section):
    """Road dimensions in meters"""
    total_length: float = Field(360.0, gt=0)
    ramp_end: float = Field(240.0, gt=0)
    merge_zone_start: float = Field(45.0, gt=0)
    lane_width: float = Field(3.7, gt=0)
    vehicle_length: float = Field(5.0, gt=0)
    vehicle_width: float = Field(2.0, gt=0)

    @model_validator(mode="after")
    def _check_order(self) -> "RoadGeometry":
        if not (self.merge_zone_start < self.ramp_end < self.total_length):
            raise ValueError("merge_zone_start < ramp_end < total_length must hold")
        return self


class IdmParams(_Section):
    """Intelligent driver model parameters for environment vehicles in idm mode"""
    desired_speed: float = Field(5.9, gt=0)
    min_gap: float = Field(2.0, ge=0)
    time_headway: float = Field(1.6, ge=0)
    max_acceleration: float = Field(0.73, gt=0)
    comfortable_deceleration: float = Field(1.67, gt=0)
    exponent: float = Field(4.0, gt=0)


class EnvConfig(_Section):
    dt: float = Field(0.1, gt=0)
    t_max: float = Field(200.0, gt=0)
    v_max: float = Field(29.16, gt=0)
    a_max: float = Field(4.5, gt=0)
    ego_v0_range: Tuple[float, float] = (2.3, 3.3)
    other_v0: float = Field(5.9, ge=0)
    n_vehicles: int = Field(6, ge=6, le=6)
    spacing: float = Field(50.0, gt=0)
    spacing_jitter: float = Field(10.0, ge=0)
    env_vehicle_mode: Literal["constant", "idm"] = "constant"
    idm: IdmParams = IdmParams()
    rng_seed: int = 0

    @model_validator(mode="after")
    def _check_ranges(self) -> "EnvConfig":
        low, high = self.ego_v0_range
        if not (0.0 <= low <= high <= self.v_max):
            raise ValueError("ego_v0_range must lie within [0, v_max] with low <= high")
        return self


class ObservationConfig(_Section):
    v_max: float = Field(29.16, gt=0)
    x_env: float = Field(360.0, gt=0)
    d_max: float = Field(30.0, gt=0)
    n_bins: int = Field(10, ge=2)


class HeadwayConstants(_Section):
    d_close: float = Field(2.3, ge=0)
    d_nom: float = Field(11.9, gt=0)
    d_far: float = Field(21.5, gt=0)
    v_nom: float = Field(5.9, gt=0)

    @model_validator(mode="after")
    def _check_order(self) -> "HeadwayConstants":
        if not (self.d_close < self.d_nom < self.d_far):
            raise ValueError("d_close < d_nom < d_far must hold")
        return self


class RewardWeights(_Section):
    w_c: float = -100.0
    w_h: float = 1.0
    w_m: float = 1.0
    w_e: float = 1.0
    w_nm: float = 0.5
    w_s: float = 1.0


class RewardConfig(_Section):
    weights: RewardWeights = RewardWeights()
    headway: HeadwayConstants = HeadwayConstants()
    v_max: float = Field(29.16, gt=0)
    continuous: bool = False
    # label used for the effort/stopping features when the agent emits continuous controls
    non_macro_act: Optional[MacroAction] = None


class SkillConfig(_Section):
    n_skills: int = Field(16, ge=1)
    episodes: int = Field(5000, ge=0)
    buffer_size: int = Field(10000, ge=1)
    batch_size: int = Field(128, ge=1)
    learning_starts: Optional[int] = Field(None, ge=1)
    gamma: float = Field(0.99, ge=0, lt=1)
    tau: float = Field(0.005, gt=0, le=1)
    alpha: float = Field(0.1, ge=0)
    lr: float = Field(3e-4, gt=0)
    reward_floor: float = Field(1e-6, gt=0, lt=1)
    hidden_sizes: Tuple[int, ...] = (64, 64)
    log_std_min: float = -20.0
    log_std_max: float = 2.0

    @property
    def update_gate(self) -> int:
        return self.learning_starts or self.batch_size


class DqnConfig(_Section):
    gamma: float = Field(0.99, ge=0, lt=1)
    batch_size: int = Field(64, ge=1)
    n_update: int = Field(100, ge=1)
    n_step: int = Field(8, ge=1)
    epsilon: float = Field(1.0, ge=0, le=1)
    beta: float = Field(0.99, gt=0, le=1)
    epsilon_min: float = Field(0.01, ge=0, le=1)
    buffer_size: int = Field(10000, ge=1)
    learning_starts: Optional[int] = Field(None, ge=1)
    episodes: int = Field(9000, ge=0)
    target_rule: Literal["double", "alg1_max"] = "double"
    lr: float = Field(3e-4, gt=0)
    hidden_sizes: Tuple[int, ...] = (64, 64)

    @model_validator(mode="after")
    def _check_epsilon(self) -> "DqnConfig":
        if self.epsilon < self.epsilon_min:
            raise ValueError("epsilon must lie in [epsilon_min, 1]")
        return self

    @property
    def update_gate(self) -> int:
        """Training starts once the replay buffer holds this many samples (a full buffer by default)"""
        return self.learning_starts or self.buffer_size


class EvaluationConfig(_Section):
    eval_every: int = Field(20000, ge=1)
    eval_episodes: int = Field(500, ge=1)
    success_window: int = Field(10, ge=1)
    reward_window: int = Field(1000, ge=1)
    trajectory_episodes: int = Field(1, ge=1)


class RunConfig(_Section):
    mode: Literal["train-skills", "train-low", "train-hrl", "eval", "export-traj"] = "train-low"
    seed: int = 0
    output_dir: Optional[str] = None
    agent: Literal["low", "hrl", "scripted"] = "low"
    skills_path: Optional[str] = None
    checkpoint: Optional[str] = None
    excel_report: bool = True
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "INFO"
    geometry: RoadGeometry = RoadGeometry()
    environment: EnvConfig = EnvConfig()
    observation: ObservationConfig = ObservationConfig()
    reward: RewardConfig = RewardConfig()
    skills: SkillConfig = SkillConfig()
    low_level: DqnConfig = DqnConfig()
    high_level: DqnConfig = DqnConfig()
    evaluation: EvaluationConfig = EvaluationConfig()

    @model_validator(mode="after")
    def _check_consistency(self) -> "RunConfig":
        if abs(self.observation.x_env - self.geometry.total_length) > 1e-9:
            raise ValueError("observation.x_env must equal geometry.total_length")
        if abs(self.observation.v_max - self.environment.v_max) > 1e-9:
            raise ValueError("observation.v_max must equal environment.v_max")
        return self


def observation_fingerprint(
    observation: ObservationConfig,
    environment: EnvConfig,
    n_skills: int,
) -> str:
    """Identify the observation/action interface a skill library was trained against"""
    base = (
        f"obs:{observation.v_max}:{observation.x_env}:{observation.d_max}:{observation.n_bins}"
        f"|act:[-1,2/3]x[0,1]:{environment.a_max}|skills:{n_skills}"
    )
    return hashlib.md5(base.encode()).hexdigest()[:16]

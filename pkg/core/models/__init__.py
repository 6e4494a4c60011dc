from .vehicle import Lane, Outcome, ControlInput, VehicleState, EnvState, TrajectoryFrame
from .actions import MacroAction, MACRO_ACTIONS
from .config import (
    RoadGeometry,
    IdmParams,
    EnvConfig,
    ObservationConfig,
    HeadwayConstants,
    RewardWeights,
    RewardConfig,
    SkillConfig,
    DqnConfig,
    EvaluationConfig,
    RunConfig,
    observation_fingerprint,
)
from .observation import (
    SlotId,
    SLOT_ORDER,
    N_FEATURES,
    NeighborSlot,
    RawObservation,
    NormalizedObservation,
    QuantizedObservation,
)
from .experience import SkillReplaySample, ExperienceLow, ExperienceHigh
from .metrics import MetricsRecord, EpisodeMetrics, EvaluationPoint

__all__ = [
    "Lane",
    "Outcome",
    "ControlInput",
    "VehicleState",
    "EnvState",
    "TrajectoryFrame",
    "MacroAction",
    "MACRO_ACTIONS",
    "RoadGeometry",
    "IdmParams",
    "EnvConfig",
    "ObservationConfig",
    "HeadwayConstants",
    "RewardWeights",
    "RewardConfig",
    "SkillConfig",
    "DqnConfig",
    "EvaluationConfig",
    "RunConfig",
    "observation_fingerprint",
    "SlotId",
    "SLOT_ORDER",
    "N_FEATURES",
    "NeighborSlot",
    "RawObservation",
    "NormalizedObservation",
    "QuantizedObservation",
    "SkillReplaySample",
    "ExperienceLow",
    "ExperienceHigh",
    "MetricsRecord",
    "EpisodeMetrics",
    "EvaluationPoint",
]

"""
Highway On-Ramp Simulator
Road geometry, longitudinal kinematics, stochastic lane change, terminal detection and episode lifecycle
"""

from typing import Callable, List, Optional, Tuple

import numpy as np
from loguru import logger

from core.models import (
    ControlInput,
    EnvConfig,
    EnvState,
    Lane,
    ObservationConfig,
    Outcome,
    RawObservation,
    QuantizedObservation,
    RoadGeometry,
    TrajectoryFrame,
    VehicleState,
)
from core.observation import extract_neighbors, observe
from .traffic import env_vehicle_policy

# lane-change probability thresholds
DETERMINISTIC_MERGE_P = 0.8
NEVER_MERGE_P = 0.2


class TerminalStateError(RuntimeError):
    """Raised when a terminal episode is stepped"""


def init_episode(config: EnvConfig, rng: np.random.Generator) -> EnvState:
    """Ego on the ramp at x=0; environment vehicle i at 50(i-1) + U[-10, 10] on the highway"""
    low, high = config.ego_v0_range
    ego = VehicleState(x=0.0, v=float(rng.uniform(low, high)), lane=Lane.RAMP)

    others = []
    for i in range(1, config.n_vehicles + 1):
        jitter = float(rng.uniform(-config.spacing_jitter, config.spacing_jitter))
        others.append(
            VehicleState(x=config.spacing * (i - 1) + jitter, v=config.other_v0, lane=Lane.HIGHWAY)
        )

    return EnvState(ego=ego, others=tuple(others), t=0.0, frame=0, terminal=Outcome.RUNNING)


def step_kinematics(x: float, v: float, a: float, dt: float) -> Tuple[float, float]:
    """
    x' = x + v dt + a dt^2 / 2, v' = v + a dt
    Vehicles do not reverse: when braking would drive v below 0 the vehicle
    stops at x + v^2 / (2|a|) and stays there for the rest of the frame.
    """
    v_next = v + a * dt
    if v_next >= 0.0:
        return x + v * dt + 0.5 * a * dt * dt, v_next
    return x + v * v / (2.0 * -a), 0.0


def resolve_lane(l: int, l_p: float, u: float) -> Lane:
    """New lane after a frame; u is a fresh U[0,1] draw"""
    if l == Lane.HIGHWAY:
        return Lane.HIGHWAY
    if l_p >= DETERMINISTIC_MERGE_P:
        return Lane.HIGHWAY
    if l_p <= NEVER_MERGE_P:
        return Lane.RAMP
    return Lane.HIGHWAY if u < l_p else Lane.RAMP


def detect_terminal(state: EnvState, geometry: RoadGeometry, t_max: float) -> Outcome:
    """Priority: collided > ramp_overrun > finished > timed_out"""
    ego = state.ego
    for other in state.others:
        if other.lane == ego.lane and abs(other.x - ego.x) < geometry.vehicle_length:
            return Outcome.COLLIDED
    if ego.lane == Lane.RAMP and ego.x >= geometry.ramp_end:
        return Outcome.RAMP_OVERRUN
    if ego.x >= geometry.total_length:
        return Outcome.FINISHED
    if state.t >= t_max - 1e-9:
        return Outcome.TIMED_OUT
    return Outcome.RUNNING


def env_step(
    state: EnvState,
    ego_input: ControlInput,
    rng: np.random.Generator,
    config: Optional[EnvConfig] = None,
    geometry: Optional[RoadGeometry] = None,
) -> EnvState:
    """Advance all 7 vehicles by one frame"""
    config = config or EnvConfig()
    geometry = geometry or RoadGeometry()
    if state.terminal.is_terminal:
        raise TerminalStateError(
            f"Episode already ended ({state.terminal.value}) at t={state.t:.2f}s"
        )

    ego = state.ego
    a = float(np.clip(ego_input.a, -config.a_max, config.a_max))
    l_p = float(np.clip(ego_input.l_p, 0.0, 1.0))
    if ego.x < geometry.merge_zone_start:
        l_p = 0.0  # no merging before the legal zone
    u = float(rng.random())

    x_next, v_next = step_kinematics(ego.x, ego.v, a, config.dt)
    lane_next = resolve_lane(ego.lane, l_p, u)
    new_ego = VehicleState(x=x_next, v=v_next, lane=lane_next)

    new_others: List[VehicleState] = []
    for i, other in enumerate(state.others, start=1):
        control = env_vehicle_policy(state, i, config, geometry)
        ox, ov = step_kinematics(other.x, other.v, control.a, config.dt)
        new_others.append(VehicleState(x=ox, v=ov, lane=other.lane))

    frame = state.frame + 1
    next_state = EnvState(
        ego=new_ego,
        others=tuple(new_others),
        t=frame * config.dt,
        frame=frame,
        terminal=Outcome.RUNNING,
        lane_changed=lane_next != ego.lane,
    )
    return next_state.with_terminal(detect_terminal(next_state, geometry, config.t_max))


FrameListener = Callable[[TrajectoryFrame], None]


class MergeEnvironment:
    """Stateful episode wrapper: reset / step / observe, with per-frame trajectory listeners"""

    def __init__(
        self,
        config: Optional[EnvConfig] = None,
        geometry: Optional[RoadGeometry] = None,
        observation_config: Optional[ObservationConfig] = None,
        rng: Optional[np.random.Generator] = None,
    ):
        self.config = config or EnvConfig()
        self.geometry = geometry or RoadGeometry()
        self.observation_config = observation_config or ObservationConfig()
        self.rng = rng if rng is not None else np.random.default_rng(self.config.rng_seed)
        self.state: Optional[EnvState] = None
        self.listeners: List[FrameListener] = []
        self.episode = 0

    def add_frame_listener(self, listener: FrameListener):
        self.listeners.append(listener)

    def remove_frame_listener(self, listener: FrameListener):
        self.listeners.remove(listener)

    def reset(self, rng: Optional[np.random.Generator] = None) -> EnvState:
        if rng is not None:
            self.rng = rng
        self.state = init_episode(self.config, self.rng)
        self.episode += 1
        logger.debug(f"Episode {self.episode} initialized: ego v0={self.state.ego.v:.2f} m/s")
        self._emit(ControlInput(), skill=-1, action="")
        return self.state

    def step(self, control: ControlInput, skill: int = -1, action: str = "") -> EnvState:
        if self.state is None:
            raise TerminalStateError("reset() must be called before step()")
        self.state = env_step(self.state, control, self.rng, self.config, self.geometry)
        self._emit(control, skill=skill, action=action)
        return self.state

    @property
    def done(self) -> bool:
        return self.state is not None and self.state.terminal.is_terminal

    def raw_observation(self) -> RawObservation:
        return extract_neighbors(self.state, self.geometry, self.observation_config)

    def observe(self) -> QuantizedObservation:
        return observe(self.state, self.geometry, self.observation_config)

    def _emit(self, control: ControlInput, skill: int, action: str):
        if not self.listeners:
            return
        frame = TrajectoryFrame(
            t=self.state.t,
            frame=self.state.frame,
            vehicles=self.state.vehicles(),
            control=control,
            outcome=self.state.terminal,
            lane_changed=self.state.lane_changed,
            skill=skill,
            action=action,
        )
        for listener in self.listeners:
            listener(frame)

    def __repr__(self):
        return f"<MergeEnvironment mode={self.config.env_vehicle_mode} state={self.state!r}>"

"""
Environment-vehicle control
constant mode keeps the initial velocity; idm mode follows the intelligent driver model
"""

import math
from typing import Optional

from core.models import ControlInput, EnvConfig, EnvState, IdmParams, Lane, RoadGeometry


def idm_acceleration(v: float, v_lead: Optional[float], gap: float, params: IdmParams) -> float:
    """IDM acceleration; v_lead None means a free road"""
    free_road = 1.0 - (v / params.desired_speed) ** params.exponent
    if v_lead is None or math.isinf(gap):
        return params.max_acceleration * free_road

    dv = v - v_lead
    s_star = params.min_gap + v * params.time_headway + v * dv / (
        2.0 * math.sqrt(params.max_acceleration * params.comfortable_deceleration)
    )
    s_star = max(s_star, params.min_gap)
    interaction = (s_star / max(gap, 0.1)) ** 2
    return params.max_acceleration * (free_road - interaction)


def _leader(state: EnvState, vehicle_index: int, geometry: RoadGeometry):
    """Nearest highway vehicle ahead of environment vehicle `vehicle_index` (ego included once merged)"""
    follower = state.others[vehicle_index - 1]
    best = None
    best_gap = math.inf
    for j, other in enumerate(state.vehicles()):
        if j == vehicle_index or other.lane != Lane.HIGHWAY:
            continue
        if other.x <= follower.x:
            continue
        gap = other.x - follower.x - geometry.vehicle_length
        if gap < best_gap:
            best, best_gap = other, gap
    return best, best_gap


def env_vehicle_policy(
    state: EnvState,
    vehicle_index: int,
    config: Optional[EnvConfig] = None,
    geometry: Optional[RoadGeometry] = None,
) -> ControlInput:
    """Control input of environment vehicle `vehicle_index` (1..6)"""
    config = config or EnvConfig()
    if not 1 <= vehicle_index <= len(state.others):
        raise ValueError(f"vehicle_index must be in 1..{len(state.others)}, got {vehicle_index}")

    if config.env_vehicle_mode == "constant":
        return ControlInput(a=0.0, l_p=0.0)

    geometry = geometry or RoadGeometry()
    vehicle = state.others[vehicle_index - 1]
    leader, gap = _leader(state, vehicle_index, geometry)
    v_lead = leader.v if leader is not None else None
    a = idm_acceleration(vehicle.v, v_lead, gap, config.idm)
    a = max(-config.a_max, min(config.a_max, a))
    return ControlInput(a=a, l_p=0.0)

"""
Observation Builder
Ego-centric neighbor extraction, normalization to [0,1] and 10-bin quantization
"""

from typing import Dict, List, Optional, Tuple

import numpy as np

from core.models import (
    EnvState,
    Lane,
    NeighborSlot,
    NormalizedObservation,
    ObservationConfig,
    QuantizedObservation,
    RawObservation,
    RoadGeometry,
    SLOT_ORDER,
    SlotId,
    VehicleState,
)

# Lane on each side of the ego lane; None when the road has no lane there.
# The ramp lies to the right of the highway.
_SIDE_LANES: Dict[Lane, Dict[str, Optional[Lane]]] = {
    Lane.HIGHWAY: {"left": None, "right": Lane.RAMP},
    Lane.RAMP: {"left": Lane.HIGHWAY, "right": None},
}


def _nearest(
    ego: VehicleState,
    others: List[VehicleState],
    lane: Optional[Lane],
    vehicle_length: float,
) -> Tuple[Optional[Tuple[float, float]], Optional[Tuple[float, float]]]:
    """(gap, v) of the nearest vehicle ahead and behind on `lane`"""
    if lane is None:
        return None, None
    front: Optional[Tuple[float, float]] = None
    back: Optional[Tuple[float, float]] = None
    for other in others:
        if other.lane != lane:
            continue
        dx = other.x - ego.x
        gap = max(0.0, abs(dx) - vehicle_length)
        if dx >= 0:
            if front is None or gap < front[0]:
                front = (gap, other.v)
        else:
            if back is None or gap < back[0]:
                back = (gap, other.v)
    return front, back


def extract_neighbors(
    state: EnvState,
    geometry: Optional[RoadGeometry] = None,
    config: Optional[ObservationConfig] = None,
) -> RawObservation:
    """
    Build the six neighbor slots around the ego vehicle
    Vehicles beyond d_max are unobservable and the slot keeps its default
    (v_rel = v_agent, d_rel = d_max). On the ramp the end of the merging
    region acts as a stopped vehicle ahead.
    """
    geometry = geometry or RoadGeometry()
    config = config or ObservationConfig()
    ego = state.ego
    v_agent = ego.v

    same_front, same_back = _nearest(ego, state.others, ego.lane, geometry.vehicle_length)
    sides = _SIDE_LANES[ego.lane]
    left_front, left_back = _nearest(ego, state.others, sides["left"], geometry.vehicle_length)
    right_front, right_back = _nearest(ego, state.others, sides["right"], geometry.vehicle_length)

    if ego.lane == Lane.RAMP:
        phantom_gap = max(0.0, geometry.ramp_end - ego.x)
        if same_front is None or phantom_gap < same_front[0]:
            same_front = (phantom_gap, 0.0)

    found = {
        SlotId.FRONT: same_front,
        SlotId.BACK: same_back,
        SlotId.LEFT_FRONT: left_front,
        SlotId.LEFT_BACK: left_back,
        SlotId.RIGHT_FRONT: right_front,
        SlotId.RIGHT_BACK: right_back,
    }

    slots = []
    for slot_id in SLOT_ORDER:
        hit = found[slot_id]
        if hit is None or hit[0] >= config.d_max:
            slots.append(NeighborSlot(slot_id, v_rel=v_agent, d_rel=config.d_max, present=False))
        else:
            gap, v_other = hit
            slots.append(NeighborSlot(slot_id, v_rel=v_agent - v_other, d_rel=gap))

    return RawObservation(v_agent=v_agent, x_agent=ego.x, slots=tuple(slots))


def normalize(raw: RawObservation, config: Optional[ObservationConfig] = None) -> NormalizedObservation:
    config = config or ObservationConfig()
    values = [
        raw.v_agent / config.v_max,
        min(raw.x_agent / config.x_env, 1.0),
    ]
    for slot in raw.slots:
        values.append((slot.v_rel + config.v_max) / (2.0 * config.v_max))
        values.append(min(slot.d_rel / config.d_max, 1.0))
    return NormalizedObservation(values=np.clip(np.asarray(values, dtype=np.float64), 0.0, 1.0))


def quantize(normalized: NormalizedObservation, n_bins: int = 10) -> QuantizedObservation:
    """Half-open bins with the top edge folded into the last bin"""
    bins = np.minimum(np.floor(normalized.values * n_bins), n_bins - 1).astype(np.int64)
    return QuantizedObservation(bins=bins, n_bins=n_bins)


def encode_bins(bins: np.ndarray, n_bins: int = 10) -> np.ndarray:
    """Bin midpoints fed to the networks"""
    return (np.asarray(bins, dtype=np.float64) + 0.5) / n_bins


def observe(
    state: EnvState,
    geometry: Optional[RoadGeometry] = None,
    config: Optional[ObservationConfig] = None,
) -> QuantizedObservation:
    config = config or ObservationConfig()
    raw = extract_neighbors(state, geometry, config)
    return quantize(normalize(raw, config), config.n_bins)


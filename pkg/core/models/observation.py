from dataclasses import dataclass
from enum import Enum
from typing import Dict, Any, List

import numpy as np


class SlotId(Enum):
    """Neighbor slots, in feature order"""
    FRONT = "front"
    BACK = "back"
    LEFT_FRONT = "left_front"
    LEFT_BACK = "left_back"
    RIGHT_FRONT = "right_front"
    RIGHT_BACK = "right_back"


SLOT_ORDER: List[SlotId] = list(SlotId)
N_FEATURES = 2 + 2 * len(SLOT_ORDER)


@dataclass(frozen=True)
class NeighborSlot:
    slot: SlotId
    v_rel: float  # v_agent - v_other
    d_rel: float  # bumper gap, >= 0
    present: bool = True

    def to_dict(self) -> Dict[str, Any]:
        return {
            "slot": self.slot.value,
            "v_rel": self.v_rel,
            "d_rel": self.d_rel,
            "present": self.present,
        }


@dataclass(frozen=True)
class RawObservation:
    v_agent: float
    x_agent: float
    slots: tuple  # 6 NeighborSlot in SLOT_ORDER

    def slot(self, slot_id: SlotId) -> NeighborSlot:
        return self.slots[SLOT_ORDER.index(slot_id)]

    @property
    def d_front(self) -> float:
        return self.slot(SlotId.FRONT).d_rel

    def to_dict(self) -> Dict[str, Any]:
        return {
            "v_agent": self.v_agent,
            "x_agent": self.x_agent,
            "slots": [s.to_dict() for s in self.slots],
        }


@dataclass(frozen=True)
class NormalizedObservation:
    """14 reals in [0,1]: [v_agent_n, x_agent_n, (v_rel_n, d_rel_n) x 6]"""
    values: np.ndarray

    def __repr__(self):
        return f"<NormalizedObservation {np.array2string(self.values, precision=3)}>"


@dataclass(frozen=True)
class QuantizedObservation:
    """Bin indices in {0..n_bins-1}; networks consume the bin midpoints"""
    bins: np.ndarray
    n_bins: int = 10

    @property
    def encoding(self) -> np.ndarray:
        return (self.bins.astype(np.float64) + 0.5) / self.n_bins

    def key(self) -> tuple:
        return tuple(int(b) for b in self.bins)

    def __repr__(self):
        return f"<QuantizedObservation {self.key()}>"

from dataclasses import dataclass, field, replace
from enum import Enum, IntEnum
from typing import List, Dict, Any, Tuple


class Lane(IntEnum):
    """Binary lane id l(t)"""
    HIGHWAY = 0
    RAMP = 1


class Outcome(Enum):
    """Episode outcome flag"""
    RUNNING = "running"
    COLLIDED = "collided"
    RAMP_OVERRUN = "ramp_overrun"
    FINISHED = "finished"
    TIMED_OUT = "timed_out"

    @property
    def is_terminal(self) -> bool:
        return self is not Outcome.RUNNING

    @property
    def is_failure(self) -> bool:
        """Outcomes penalized by the collision feature"""
        return self in (Outcome.COLLIDED, Outcome.RAMP_OVERRUN)


@dataclass(frozen=True)
class ControlInput:
    """Per-frame command: acceleration a(t) in m/s^2 and lane-change probability l_p"""
    a: float = 0.0
    l_p: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {"a": self.a, "l_p": self.l_p}


@dataclass(frozen=True)
class VehicleState:
    """
    Longitudinal state of one vehicle
    x is the front-bumper coordinate in meters
    """
    x: float
    v: float
    lane: Lane = Lane.HIGHWAY

    def to_dict(self) -> Dict[str, Any]:
        return {"x": self.x, "v": self.v, "lane": int(self.lane)}

    def __repr__(self):
        return f"<Vehicle x={self.x:.2f} v={self.v:.2f} lane={int(self.lane)}>"


@dataclass(frozen=True)
class EnvState:
    """
    Single source of truth for an episode: 1 ego + 6 environment vehicles
    States are immutable; env_step returns a new instance.
    """
    ego: VehicleState
    others: Tuple[VehicleState, ...]
    t: float = 0.0
    frame: int = 0
    terminal: Outcome = Outcome.RUNNING
    lane_changed: bool = False  # ego changed lane on the frame that produced this state

    def with_terminal(self, outcome: Outcome) -> "EnvState":
        return replace(self, terminal=outcome)

    def vehicles(self) -> List[VehicleState]:
        """Ego first, then environment vehicles 1..6"""
        return [self.ego, *self.others]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "t": self.t,
            "frame": self.frame,
            "terminal": self.terminal.value,
            "ego": self.ego.to_dict(),
            "others": [o.to_dict() for o in self.others],
        }

    def __repr__(self):
        return (
            f"<EnvState t={self.t:.1f} ego={self.ego!r} "
            f"terminal={self.terminal.value}>"
        )


@dataclass
class TrajectoryFrame:
    """One frame of the trajectory log"""
    t: float
    frame: int
    vehicles: List[VehicleState]
    control: ControlInput
    outcome: Outcome
    lane_changed: bool = False
    skill: int = -1
    action: str = ""
    metadata: Dict[str, Any] = field(default_factory=dict)

    def to_row(self) -> Dict[str, Any]:
        """Flatten to one CSV row (ego first, then vehicles 1..6)"""
        row: Dict[str, Any] = {"t": round(self.t, 10), "frame": self.frame}
        for i, vehicle in enumerate(self.vehicles):
            prefix = "ego" if i == 0 else f"veh{i}"
            row[f"{prefix}_x"] = vehicle.x
            row[f"{prefix}_v"] = vehicle.v
            row[f"{prefix}_lane"] = int(vehicle.lane)
        row["a"] = self.control.a
        row["l_p"] = self.control.l_p
        row["skill"] = self.skill
        row["action"] = self.action
        row["lane_changed"] = int(self.lane_changed)
        row["outcome"] = self.outcome.value
        row.update(self.metadata)
        return row

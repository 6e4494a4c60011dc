"""
Frozen Driving Policies
Everything the evaluator can drive the ego vehicle with
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from agents.dqn import realize_macro_action
from core.environment import MergeEnvironment
from core.models import ControlInput, HeadwayConstants, Lane, MacroAction
from core.neural import MlpParams, forward


@dataclass(frozen=True)
class PolicyDecision:
    control: ControlInput
    skill: int = -1
    action: str = ""


class MergePolicy:
    """Base policy: reset at episode start, then one decision per frame"""
    name = "policy"

    def reset(self, rng: Optional[np.random.Generator] = None):
        self.rng = rng if rng is not None else np.random.default_rng(0)

    def act(self, env: MergeEnvironment) -> PolicyDecision:
        raise NotImplementedError

    def __repr__(self):
        return f"<{self.__class__.__name__} {self.name}>"


class ConstantMacroPolicy(MergePolicy):
    """Always emits the same macro-action"""

    def __init__(self, action: MacroAction):
        self.action = action
        self.name = f"constant-{action.value}"
        self.reset()

    def act(self, env: MergeEnvironment) -> PolicyDecision:
        return PolicyDecision(realize_macro_action(self.action, self.rng), action=self.action.value)


class ScriptedMergePolicy(MergePolicy):
    """
    Gap-seeking controller
    Locks onto the admissible highway slot nearest the ego vehicle (between two vehicles,
    or the open road behind the rearmost one), tracks its center with a PD law at the
    traffic speed, and requests a merge once inside the merge zone with at least d_nom
    clearance on both sides and a matched speed.
    """
    name = "scripted"

    def __init__(
        self,
        headway: Optional[HeadwayConstants] = None,
        vehicle_length: float = 5.0,
        merge_zone_start: float = 45.0,
        kp: float = 0.25,
        kv: float = 1.0,
        a_min: float = -3.0,
        a_max: float = 2.0,
        speed_tolerance: float = 1.0,
    ):
        self.headway = headway or HeadwayConstants()
        self.vehicle_length = vehicle_length
        self.merge_zone_start = merge_zone_start
        self.kp = kp
        self.kv = kv
        self.a_min = a_min
        self.a_max = a_max
        self.speed_tolerance = speed_tolerance
        self.reset()

    def reset(self, rng: Optional[np.random.Generator] = None):
        super().reset(rng)
        self.slot: Optional[Tuple[Optional[int], Optional[int]]] = None

    def _slots(self, env: MergeEnvironment) -> List[Tuple[Optional[int], Optional[int], float]]:
        """(rear index, front index, center x) for each admissible slot"""
        highway = sorted(
            (i for i, o in enumerate(env.state.others) if o.lane == Lane.HIGHWAY),
            key=lambda i: env.state.others[i].x,
        )
        if not highway:
            return []
        others = env.state.others
        need = 2.0 * (self.headway.d_nom + self.vehicle_length)
        slots: List[Tuple[Optional[int], Optional[int], float]] = []
        rearmost = highway[0]
        slots.append((None, rearmost, others[rearmost].x - self.vehicle_length - 1.5 * self.headway.d_nom))
        for rear, front in zip(highway[:-1], highway[1:]):
            if others[front].x - others[rear].x >= need:
                slots.append((rear, front, 0.5 * (others[rear].x + others[front].x)))
        return slots

    def _center(self, env: MergeEnvironment) -> float:
        slots = self._slots(env)
        if self.slot is not None:
            for rear, front, center in slots:
                if (rear, front) == self.slot:
                    return center
        x = env.state.ego.x
        rear, front, center = min(slots, key=lambda s: abs(s[2] - x))
        self.slot = (rear, front)
        return center

    def _clearance(self, env: MergeEnvironment) -> Tuple[float, float]:
        ego = env.state.ego
        ahead, behind = np.inf, np.inf
        for other in env.state.others:
            if other.lane != Lane.HIGHWAY:
                continue
            dx = other.x - ego.x
            gap = abs(dx) - self.vehicle_length
            if dx >= 0:
                ahead = min(ahead, gap)
            else:
                behind = min(behind, gap)
        return ahead, behind

    def act(self, env: MergeEnvironment) -> PolicyDecision:
        ego = env.state.ego
        v_ref = self.headway.v_nom
        center = self._center(env)
        a = float(np.clip(self.kp * (center - ego.x) + self.kv * (v_ref - ego.v), self.a_min, self.a_max))

        l_p = 0.0
        if ego.lane == Lane.RAMP and ego.x >= self.merge_zone_start:
            ahead, behind = self._clearance(env)
            if (
                ahead >= self.headway.d_nom
                and behind >= self.headway.d_nom
                and abs(ego.v - v_ref) <= self.speed_tolerance
            ):
                l_p = 1.0
        return PolicyDecision(ControlInput(a=a, l_p=l_p), action="merge" if l_p else "track")


class GreedyLowLevelPolicy(MergePolicy):
    """Argmax over the macro-action Q values"""
    name = "low"

    def __init__(self, net: MlpParams):
        self.net = net
        self.reset()

    def act(self, env: MergeEnvironment) -> PolicyDecision:
        q = forward(self.net, env.observe().encoding)
        label = MacroAction.from_index(int(np.argmax(q)))
        return PolicyDecision(realize_macro_action(label, self.rng), action=label.value)


class GreedyHrlPolicy(MergePolicy):
    """Greedy skill selection every n_step frames; skills run their mean action"""
    name = "hrl"

    def __init__(self, net: MlpParams, skills, n_step: int = 8, deterministic_skills: bool = True):
        self.net = net
        self.skills = skills
        self.n_step = n_step
        self.deterministic_skills = deterministic_skills
        self.reset()

    def reset(self, rng: Optional[np.random.Generator] = None):
        super().reset(rng)
        self.skill = -1
        self.remaining = 0

    def act(self, env: MergeEnvironment) -> PolicyDecision:
        s = env.observe().encoding
        if self.remaining == 0:
            self.skill = int(np.argmax(forward(self.net, s)))
            self.remaining = self.n_step
        self.remaining -= 1
        control = self.skills.act(s, self.skill, self.rng, self.deterministic_skills)
        return PolicyDecision(control, skill=self.skill)

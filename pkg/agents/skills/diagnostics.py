"""
Skill diagnostics
Per-skill rollouts, visited-bin histograms and how well the discriminator tells skills apart
"""

from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Dict, List, Optional

import numpy as np

from core.environment import MergeEnvironment
from core.models import Lane
from .discriminator import SkillDiscriminator
from .library import SkillLibrary


@dataclass
class SkillRollout:
    skill: int
    bins: List[np.ndarray] = field(default_factory=list)
    encodings: List[np.ndarray] = field(default_factory=list)
    outcome: str = "running"
    merge_x: Optional[float] = None
    final_v: float = 0.0
    steps: int = 0


def rollout_skill(
    library: SkillLibrary,
    env: MergeEnvironment,
    skill: int,
    rng: Optional[np.random.Generator] = None,
    deterministic: bool = False,
) -> SkillRollout:
    """Run one episode with a fixed skill and record the visited observations"""
    rollout = SkillRollout(skill=skill)
    env.reset()
    while not env.done:
        obs = env.observe()
        control = library.act(obs.encoding, skill, rng, deterministic)
        state = env.step(control, skill=skill)
        if state.lane_changed and state.ego.lane == Lane.HIGHWAY:
            rollout.merge_x = state.ego.x
        next_obs = env.observe()
        rollout.bins.append(next_obs.bins)
        rollout.encodings.append(next_obs.encoding)
        rollout.steps += 1
    rollout.outcome = env.state.terminal.value
    rollout.final_v = env.state.ego.v
    return rollout


def collect_rollouts(
    library: SkillLibrary,
    env: MergeEnvironment,
    episodes_per_skill: int,
    rng: Optional[np.random.Generator] = None,
    deterministic: bool = False,
) -> List[SkillRollout]:
    return [
        rollout_skill(library, env, z, rng, deterministic)
        for z in range(library.n_skills)
        for _ in range(episodes_per_skill)
    ]


def visitation_histograms(rollouts: List[SkillRollout], n_skills: int, n_bins: int = 10) -> np.ndarray:
    """(n_skills, features, n_bins) visit frequencies, each feature row summing to 1 when visited"""
    counts: Optional[np.ndarray] = None
    for rollout in rollouts:
        for bins in rollout.bins:
            if counts is None:
                counts = np.zeros((n_skills, len(bins), n_bins))
            counts[rollout.skill, np.arange(len(bins)), bins] += 1.0
    if counts is None:
        return np.zeros((n_skills, 0, n_bins))
    totals = counts.sum(axis=2, keepdims=True)
    return np.divide(counts, totals, out=np.zeros_like(counts), where=totals > 0)


def mean_pairwise_l1(histograms: np.ndarray) -> float:
    """Mean L1 distance between the flattened histograms of every skill pair"""
    pairs = list(combinations(range(histograms.shape[0]), 2))
    if not pairs:
        return 0.0
    return float(np.mean([np.abs(histograms[i] - histograms[j]).sum() for i, j in pairs]))


def held_out_accuracy(discriminator: SkillDiscriminator, rollouts: List[SkillRollout]) -> float:
    states = [e for r in rollouts for e in r.encodings]
    skills = [r.skill for r in rollouts for _ in r.encodings]
    if not states:
        return 0.0
    return discriminator.accuracy(np.stack(states), skills)


def skill_summary(
    rollouts: List[SkillRollout],
    discriminator: Optional[SkillDiscriminator] = None,
) -> List[Dict[str, Any]]:
    """One row per skill: outcome counts, merge coordinate, final velocity and mean r_z"""
    rows = []
    for z in sorted({r.skill for r in rollouts}):
        mine = [r for r in rollouts if r.skill == z]
        merges = [r.merge_x for r in mine if r.merge_x is not None]
        row: Dict[str, Any] = {
            "skill": z,
            "episodes": len(mine),
            "mean_steps": float(np.mean([r.steps for r in mine])),
            "merge_rate": len(merges) / len(mine),
            "mean_merge_x": float(np.mean(merges)) if merges else None,
            "mean_final_v": float(np.mean([r.final_v for r in mine])),
        }
        for outcome in ("collided", "ramp_overrun", "finished", "timed_out"):
            row[f"n_{outcome}"] = sum(r.outcome == outcome for r in mine)
        if discriminator is not None:
            states = [e for r in mine for e in r.encodings]
            row["mean_r_z"] = float(np.mean(discriminator.rewards(np.stack(states), [z] * len(states)))) if states else None
        rows.append(row)
    return rows

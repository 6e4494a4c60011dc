"""
Shared fixtures
"""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from core.environment import MergeEnvironment
from core.models import (
    DqnConfig,
    EnvConfig,
    EnvState,
    Lane,
    ObservationConfig,
    RoadGeometry,
    SkillConfig,
    VehicleState,
)


@pytest.fixture
def geometry():
    return RoadGeometry()


@pytest.fixture
def env_config():
    return EnvConfig()


@pytest.fixture
def obs_config():
    return ObservationConfig()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def env():
    return MergeEnvironment(rng=np.random.default_rng(7))


@pytest.fixture
def small_skill_config():
    return SkillConfig(n_skills=4, episodes=1, buffer_size=500, batch_size=16, hidden_sizes=(16, 16), lr=1e-3)


@pytest.fixture
def small_dqn_config():
    return DqnConfig(
        episodes=1, batch_size=8, buffer_size=200, learning_starts=16, n_update=5, hidden_sizes=(16, 16)
    )


def far_traffic(n: int = 6, start: float = 1000.0, v: float = 5.9):
    """Highway vehicles well beyond the end of the road, out of every interaction"""
    return tuple(VehicleState(x=start + 50.0 * i, v=v, lane=Lane.HIGHWAY) for i in range(n))


def make_state(ego: VehicleState, others=(), t: float = 0.0) -> EnvState:
    return EnvState(ego=ego, others=tuple(others), t=t)


@pytest.fixture
def short_env():
    """Episodes capped at 3 s (30 frames) so training loops stay quick"""
    return MergeEnvironment(config=EnvConfig(t_max=3.0), rng=np.random.default_rng(7))


FD_EPS = 1e-5
FD_TOL = 1e-4


def finite_difference_check(loss_fn, params, analytic):
    """Central differences on every entry of every parameter array"""
    for p, g in zip(params, analytic):
        it = np.nditer(p, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            saved = p[idx]
            p[idx] = saved + FD_EPS
            plus = loss_fn()
            p[idx] = saved - FD_EPS
            minus = loss_fn()
            p[idx] = saved
            numeric = (plus - minus) / (2 * FD_EPS)
            assert abs(g[idx] - numeric) / max(1.0, abs(g[idx])) < FD_TOL, idx

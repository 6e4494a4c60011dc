"""
Tests for the highway on-ramp simulator: episode init, kinematics, lane resolution,
terminal detection and the stateful environment wrapper.
"""

import numpy as np
import pytest

from conftest import far_traffic, make_state
from core.environment import (
    MergeEnvironment,
    TerminalStateError,
    detect_terminal,
    env_step,
    env_vehicle_policy,
    idm_acceleration,
    init_episode,
    resolve_lane,
    step_kinematics,
)
from core.models import ControlInput, EnvConfig, IdmParams, Lane, Outcome, RoadGeometry, VehicleState


class MidpointRng:
    """Every uniform draw lands on the middle of its interval"""

    def uniform(self, low, high):
        return low + 0.5 * (high - low)


class TestInitEpisode:
    def test_initial_layout(self, env_config, rng):
        state = init_episode(env_config, rng)
        assert state.ego.x == 0.0
        assert state.ego.lane == Lane.RAMP
        assert 2.3 <= state.ego.v <= 3.3
        assert len(state.others) == 6
        for i, other in enumerate(state.others, start=1):
            assert other.lane == Lane.HIGHWAY
            assert other.v == 5.9
            assert abs(other.x - 50.0 * (i - 1)) <= 10.0
        assert state.t == 0.0
        assert state.terminal == Outcome.RUNNING

    def test_midpoint_draws(self, env_config):
        state = init_episode(env_config, MidpointRng())
        assert state.ego.v == pytest.approx(2.8, abs=1e-12)
        assert [o.x for o in state.others] == pytest.approx([0.0, 50.0, 100.0, 150.0, 200.0, 250.0])

    def test_same_seed_identical(self, env_config):
        a = init_episode(env_config, np.random.default_rng(3))
        b = init_episode(env_config, np.random.default_rng(3))
        assert a == b


class TestKinematics:
    def test_constant_acceleration(self):
        x, v = step_kinematics(0.0, 3.0, 1.0, 0.1)
        assert x == pytest.approx(0.305, abs=1e-12)
        assert v == pytest.approx(3.1, abs=1e-12)

    def test_zero_acceleration(self):
        assert step_kinematics(10.0, 5.0, 0.0, 0.1) == pytest.approx((10.5, 5.0), abs=1e-12)

    def test_braking_stops_without_reversing(self):
        x, v = step_kinematics(0.0, 0.1, -4.5, 0.1)
        assert v == 0.0
        assert 0.0 <= x < 0.01
        assert x == pytest.approx(0.1 ** 2 / (2 * 4.5), abs=1e-12)

    def test_stopped_vehicle_stays_put(self):
        assert step_kinematics(42.0, 0.0, -3.0, 0.1) == (42.0, 0.0)

    def test_zero_acceleration_displacement(self):
        for v in (0.0, 2.3, 5.9, 29.16):
            x_next, _ = step_kinematics(17.0, v, 0.0, 0.1)
            assert x_next - 17.0 == pytest.approx(v * 0.1, abs=1e-12)


class TestResolveLane:
    def test_highway_never_changes(self):
        assert resolve_lane(Lane.HIGHWAY, 1.0, 0.99) == Lane.HIGHWAY

    def test_deterministic_merge(self):
        assert resolve_lane(Lane.RAMP, 0.9, 0.99) == Lane.HIGHWAY

    def test_never_merge(self):
        assert resolve_lane(Lane.RAMP, 0.2, 0.0) == Lane.RAMP

    def test_probabilistic_branch(self):
        assert resolve_lane(Lane.RAMP, 0.5, 0.4) == Lane.HIGHWAY
        assert resolve_lane(Lane.RAMP, 0.5, 0.6) == Lane.RAMP

    def test_merge_frequency(self, rng):
        n = 100_000
        draws = rng.random(n)
        merged = sum(resolve_lane(Lane.RAMP, 0.5, u) == Lane.HIGHWAY for u in draws)
        sigma = np.sqrt(0.25 / n)
        assert abs(merged / n - 0.5) < 3 * sigma


class TestEnvStep:
    def test_no_merge_before_zone(self, rng):
        state = make_state(VehicleState(x=40.0, v=3.0, lane=Lane.RAMP), far_traffic())
        next_state = env_step(state, ControlInput(a=0.0, l_p=1.0), rng)
        assert next_state.ego.lane == Lane.RAMP
        assert not next_state.lane_changed

    def test_merge_inside_zone(self, rng):
        state = make_state(VehicleState(x=50.0, v=3.0, lane=Lane.RAMP), far_traffic())
        next_state = env_step(state, ControlInput(a=0.0, l_p=1.0), rng)
        assert next_state.ego.lane == Lane.HIGHWAY
        assert next_state.lane_changed

    def test_ramp_overrun(self, rng):
        state = make_state(VehicleState(x=239.0, v=5.0, lane=Lane.RAMP), far_traffic())
        state = env_step(state, ControlInput(), rng)
        assert state.ego.x == pytest.approx(239.5)
        assert state.terminal == Outcome.RUNNING
        state = env_step(state, ControlInput(), rng)
        assert state.ego.x >= 240.0
        assert state.terminal == Outcome.RAMP_OVERRUN

    def test_stationary_state(self, rng):
        others = tuple(VehicleState(x=1000.0 + 50 * i, v=0.0) for i in range(6))
        state = make_state(VehicleState(x=100.0, v=0.0, lane=Lane.RAMP), others)
        next_state = env_step(state, ControlInput(), rng)
        assert next_state.ego.x == 100.0
        assert [o.x for o in next_state.others] == [o.x for o in others]
        assert next_state.t == pytest.approx(0.1)
        assert next_state.frame == 1

    def test_terminal_state_rejected(self, rng):
        state = make_state(VehicleState(x=241.0, v=5.0, lane=Lane.RAMP), far_traffic()).with_terminal(
            Outcome.RAMP_OVERRUN
        )
        with pytest.raises(TerminalStateError):
            env_step(state, ControlInput(), rng)

    def test_acceleration_clipped(self, rng):
        state = make_state(VehicleState(x=100.0, v=5.0, lane=Lane.RAMP), far_traffic())
        next_state = env_step(state, ControlInput(a=100.0), rng)
        assert next_state.ego.v == pytest.approx(5.0 + 4.5 * 0.1)

    def test_determinism(self):
        controls = [ControlInput(a=float(a), l_p=float(p)) for a, p in np.random.default_rng(1).uniform(
            [-4.5, 0.0], [4.5, 1.0], size=(300, 2)
        )]
        runs = []
        for _ in range(2):
            env = MergeEnvironment(rng=np.random.default_rng(99))
            env.reset()
            states = []
            for control in controls:
                if env.done:
                    break
                states.append(env.step(control))
            runs.append(states)
        assert runs[0] == runs[1]

    def test_fuzz_invariants(self):
        rng = np.random.default_rng(2024)
        env = MergeEnvironment(rng=np.random.default_rng(5))
        steps = 0
        while steps < 100_000:
            prev = env.reset()
            while not env.done:
                a = float(rng.uniform(-4.5, 4.5))
                l_p = float(rng.random())
                state = env.step(ControlInput(a=a, l_p=l_p))
                steps += 1
                assert state.ego.v >= 0.0
                assert all(o.v >= 0.0 for o in state.others)
                assert state.t > prev.t
                if prev.ego.lane == Lane.HIGHWAY:
                    assert state.ego.lane == Lane.HIGHWAY
                if state.lane_changed:
                    assert prev.ego.x >= 45.0
                prev = state
            final = env.state
            with pytest.raises(TerminalStateError):
                env.step(ControlInput())
            assert env.state is final


class TestEnvVehiclePolicy:
    def test_constant_mode(self, env_config, rng):
        state = init_episode(env_config, rng)
        for i in range(1, 7):
            assert env_vehicle_policy(state, i, env_config) == ControlInput(0.0, 0.0)

    def test_idm_equilibrium(self):
        config = EnvConfig(env_vehicle_mode="idm")
        others = (VehicleState(x=0.0, v=5.9), VehicleState(x=1005.0, v=5.9))
        state = make_state(VehicleState(x=0.0, v=3.0, lane=Lane.RAMP), others)
        assert abs(env_vehicle_policy(state, 1, config).a) < 0.05

    def test_idm_stopped_leader(self):
        config = EnvConfig(env_vehicle_mode="idm")
        others = (VehicleState(x=0.0, v=5.9), VehicleState(x=11.0, v=0.0))
        state = make_state(VehicleState(x=0.0, v=3.0, lane=Lane.RAMP), others)
        assert env_vehicle_policy(state, 1, config).a < -1.0

    def test_merged_ego_is_a_leader(self):
        config = EnvConfig(env_vehicle_mode="idm")
        others = (VehicleState(x=0.0, v=5.9), VehicleState(x=500.0, v=5.9))
        state = make_state(VehicleState(x=11.0, v=0.0, lane=Lane.HIGHWAY), others)
        assert env_vehicle_policy(state, 1, config).a < -1.0

    def test_free_road(self):
        params = IdmParams()
        assert idm_acceleration(0.0, None, float("inf"), params) == pytest.approx(params.max_acceleration)

    def test_index_out_of_range(self, env_config, rng):
        state = init_episode(env_config, rng)
        with pytest.raises(ValueError):
            env_vehicle_policy(state, 7, env_config)
        with pytest.raises(ValueError):
            env_vehicle_policy(state, 0, env_config)


class TestDetectTerminal:
    def test_collision(self, geometry):
        state = make_state(VehicleState(x=100.0, v=5.0, lane=Lane.HIGHWAY), [VehicleState(x=103.0, v=5.0)])
        assert detect_terminal(state, geometry, 200.0) == Outcome.COLLIDED

    def test_ramp_overrun(self, geometry):
        state = make_state(VehicleState(x=240.1, v=5.0, lane=Lane.RAMP), far_traffic())
        assert detect_terminal(state, geometry, 200.0) == Outcome.RAMP_OVERRUN

    def test_finished(self, geometry):
        state = make_state(VehicleState(x=360.0, v=5.0, lane=Lane.HIGHWAY), far_traffic(start=2000.0))
        assert detect_terminal(state, geometry, 200.0) == Outcome.FINISHED

    def test_timed_out(self, geometry):
        state = make_state(VehicleState(x=100.0, v=0.0, lane=Lane.RAMP), far_traffic(), t=200.0)
        assert detect_terminal(state, geometry, 200.0) == Outcome.TIMED_OUT

    def test_collision_outranks_overrun(self, geometry):
        state = make_state(
            VehicleState(x=240.1, v=5.0, lane=Lane.RAMP),
            [VehicleState(x=242.0, v=5.0, lane=Lane.RAMP)],
        )
        assert detect_terminal(state, geometry, 200.0) == Outcome.COLLIDED

    def test_running(self, geometry):
        state = make_state(VehicleState(x=100.0, v=5.0, lane=Lane.RAMP), far_traffic())
        assert detect_terminal(state, geometry, 200.0) == Outcome.RUNNING


class TestMergeEnvironment:
    def test_step_before_reset(self):
        with pytest.raises(TerminalStateError):
            MergeEnvironment().step(ControlInput())

    def test_frame_listener(self, env):
        frames = []
        env.add_frame_listener(frames.append)
        env.reset()
        for _ in range(10):
            env.step(ControlInput(a=1.0), skill=3, action="hold")
        assert len(frames) == 11
        times = np.array([f.t for f in frames])
        assert np.all(np.diff(times) > 0)
        assert np.diff(times) == pytest.approx(np.full(10, 0.1))
        assert frames[-1].skill == 3
        assert frames[-1].action == "hold"
        assert len(frames[0].vehicles) == 7

        env.remove_frame_listener(frames.append)
        env.step(ControlInput())
        assert len(frames) == 11

    def test_observe_shapes(self, env):
        env.reset()
        obs = env.observe()
        assert obs.bins.shape == (14,)
        assert obs.encoding.shape == (14,)

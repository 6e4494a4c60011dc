"""
Tests for neighbor extraction, normalization and quantization
"""

import numpy as np
import pytest

from conftest import far_traffic, make_state
from core.environment import MergeEnvironment
from core.models import (
    ControlInput,
    Lane,
    NeighborSlot,
    NormalizedObservation,
    ObservationConfig,
    RawObservation,
    SLOT_ORDER,
    SlotId,
    VehicleState,
)
from core.observation import encode_bins, extract_neighbors, normalize, observe, quantize


class TestExtractNeighbors:
    def test_alone_on_highway(self):
        state = make_state(VehicleState(x=100.0, v=6.0, lane=Lane.HIGHWAY), far_traffic())
        raw = extract_neighbors(state)
        assert len(raw.slots) == 6
        for slot in raw.slots:
            assert (slot.v_rel, slot.d_rel) == (6.0, 30.0)
            assert not slot.present

    def test_ramp_end_phantom(self):
        state = make_state(VehicleState(x=230.0, v=4.0, lane=Lane.RAMP), far_traffic())
        front = extract_neighbors(state).slot(SlotId.FRONT)
        assert front.v_rel == pytest.approx(4.0)
        assert front.d_rel == pytest.approx(10.0)
        assert front.present

    def test_phantom_beyond_range(self):
        state = make_state(VehicleState(x=100.0, v=4.0, lane=Lane.RAMP), far_traffic())
        front = extract_neighbors(state).slot(SlotId.FRONT)
        assert (front.v_rel, front.d_rel) == (4.0, 30.0)

    def test_front_vehicle(self):
        state = make_state(
            VehicleState(x=100.0, v=5.0, lane=Lane.HIGHWAY),
            [VehicleState(x=112.0, v=6.0, lane=Lane.HIGHWAY), *far_traffic(5)],
        )
        front = extract_neighbors(state).slot(SlotId.FRONT)
        assert front.v_rel == pytest.approx(-1.0)
        assert front.d_rel == pytest.approx(7.0)

    def test_nearest_vehicle_wins(self):
        state = make_state(
            VehicleState(x=100.0, v=5.0, lane=Lane.HIGHWAY),
            [
                VehicleState(x=125.0, v=1.0),
                VehicleState(x=110.0, v=3.0),
                VehicleState(x=90.0, v=4.0),
                *far_traffic(3),
            ],
        )
        raw = extract_neighbors(state)
        assert raw.slot(SlotId.FRONT).d_rel == pytest.approx(5.0)
        assert raw.slot(SlotId.FRONT).v_rel == pytest.approx(2.0)
        assert raw.slot(SlotId.BACK).d_rel == pytest.approx(5.0)
        assert raw.slot(SlotId.BACK).v_rel == pytest.approx(1.0)

    def test_ramp_sees_highway_on_the_left(self):
        state = make_state(
            VehicleState(x=100.0, v=5.0, lane=Lane.RAMP),
            [VehicleState(x=115.0, v=5.9), VehicleState(x=80.0, v=5.9), *far_traffic(4)],
        )
        raw = extract_neighbors(state)
        assert raw.slot(SlotId.LEFT_FRONT).d_rel == pytest.approx(10.0)
        assert raw.slot(SlotId.LEFT_BACK).d_rel == pytest.approx(15.0)
        assert not raw.slot(SlotId.RIGHT_FRONT).present
        assert not raw.slot(SlotId.RIGHT_BACK).present


class TestNormalize:
    def _raw(self, v_agent=0.0, x_agent=0.0, v_rel=0.0, d_rel=0.0):
        slots = tuple(NeighborSlot(slot, v_rel=v_rel, d_rel=d_rel) for slot in SLOT_ORDER)
        return RawObservation(v_agent=v_agent, x_agent=x_agent, slots=slots)

    def test_velocity_features(self):
        values = normalize(self._raw(v_agent=29.16)).values
        assert values[0] == pytest.approx(1.0, abs=1e-12)
        assert values[2] == pytest.approx(0.5, abs=1e-12)

    def test_position_and_gap_features(self):
        values = normalize(self._raw(x_agent=180.0, d_rel=45.0)).values
        assert values[1] == pytest.approx(0.5, abs=1e-12)
        assert values[3] == pytest.approx(1.0, abs=1e-12)

    def test_all_zero(self):
        values = normalize(self._raw()).values
        assert values.shape == (14,)
        assert values[0] == 0.0 and values[1] == 0.0
        assert np.all(values[2::2] == 0.5)
        assert np.all(values[3::2] == 0.0)

    def test_position_clamped_past_road_end(self):
        assert normalize(self._raw(x_agent=400.0)).values[1] == 1.0


class TestQuantize:
    @pytest.mark.parametrize(
        "value,bin_index,encoding",
        [(0.0, 0, 0.05), (1.0, 9, 0.95), (0.55, 5, 0.55)],
    )
    def test_examples(self, value, bin_index, encoding):
        q = quantize(NormalizedObservation(values=np.full(14, value)))
        assert np.all(q.bins == bin_index)
        assert q.encoding == pytest.approx(np.full(14, encoding), abs=1e-12)

    def test_encode_bins_matches(self):
        bins = np.arange(10)
        assert encode_bins(bins) == pytest.approx(0.05 + 0.1 * bins, abs=1e-12)

    def test_idempotent_on_midpoints(self):
        q = quantize(NormalizedObservation(values=np.linspace(0.0, 1.0, 14)))
        again = quantize(NormalizedObservation(values=q.encoding))
        assert np.array_equal(q.bins, again.bins)

    def test_monotone(self):
        values = np.sort(np.random.default_rng(0).random(14))
        bins = quantize(NormalizedObservation(values=values)).bins
        assert np.all(np.diff(bins) >= 0)


class TestObservationFuzz:
    def test_random_states_stay_in_range(self):
        rng = np.random.default_rng(11)
        config = ObservationConfig()
        for _ in range(100_000):
            ego_lane = Lane(int(rng.integers(0, 2)))
            ego = VehicleState(x=float(rng.uniform(0, 400)), v=float(rng.uniform(0, 29.16)), lane=ego_lane)
            others = [
                VehicleState(
                    x=float(rng.uniform(-50, 450)),
                    v=float(rng.uniform(0, 29.16)),
                    lane=Lane(int(rng.integers(0, 2))),
                )
                for _ in range(6)
            ]
            state = make_state(ego, others)
            values = normalize(extract_neighbors(state, config=config), config).values
            assert values.shape == (14,)
            assert np.all((values >= 0.0) & (values <= 1.0))
            bins = quantize(NormalizedObservation(values=values)).bins
            assert np.all((bins >= 0) & (bins <= 9))

    def test_rollout_observations_in_range(self):
        env = MergeEnvironment(rng=np.random.default_rng(3))
        rng = np.random.default_rng(4)
        for _ in range(5):
            env.reset()
            while not env.done:
                q = env.observe()
                assert np.all((q.bins >= 0) & (q.bins <= 9))
                assert np.all((q.encoding > 0.0) & (q.encoding < 1.0))
                env.step(ControlInput(a=float(rng.uniform(-4.5, 4.5)), l_p=float(rng.random())))

    def test_observe_matches_pipeline(self):
        state = make_state(VehicleState(x=60.0, v=4.0, lane=Lane.RAMP), far_traffic())
        expected = quantize(normalize(extract_neighbors(state)))
        assert np.array_equal(observe(state).bins, expected.bins)

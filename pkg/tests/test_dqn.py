"""
Tests for macro-action realization, the DQN learner and both DQN trainers
"""

import numpy as np
import pytest

from conftest import finite_difference_check
from core.environment import MergeEnvironment
from core.models import DqnConfig, EnvConfig, EvaluationPoint, ExperienceLow, MacroAction
from core.neural import build_mlp
from core.reward import DriverRewardModel
from agents.dqn import (
    DqnBatch,
    DqnLearner,
    HighLevelTrainer,
    LowLevelTrainer,
    compute_td_targets,
    decay_epsilon,
    dqn_target,
    epsilon_greedy,
    macro_acceleration,
    realize_macro_action,
    td_loss,
    train_high_level,
    train_low_level,
)
from agents.skills import FingerprintMismatchError, SkillLibrary


def constant_net(bias, rng, obs_dim=14):
    """Q network whose output ignores the input"""
    net = build_mlp(obs_dim, len(bias), rng, hidden_sizes=(8,))
    for w in net.weights:
        w[...] = 0.0
    net.biases[-1][...] = bias
    return net


def random_experiences(rng, n, n_actions=6):
    return [
        ExperienceLow(
            s=(rng.integers(0, 10, 14) + 0.5) / 10,
            a=int(rng.integers(0, n_actions)),
            r=float(rng.normal()),
            s_next=(rng.integers(0, 10, 14) + 0.5) / 10,
            done=bool(rng.random() < 0.3),
        )
        for _ in range(n)
    ]


class SequenceReward:
    """Driver-reward stand-in that pays 1, 2, 3, 1, 2, 3, ..."""

    def __init__(self):
        self.calls = 0

    def score(self, state, raw_observation, act=None):
        self.calls += 1
        return float((self.calls - 1) % 3 + 1)


@pytest.fixture
def skill_library(rng):
    return SkillLibrary(build_mlp(18, 4, rng, hidden_sizes=(8,), role="policy"), 4, fingerprint="abc")


class TestMacroActions:
    def test_merge(self, rng):
        control = realize_macro_action(MacroAction.MERGE, rng)
        assert (control.a, control.l_p) == (0.0, 1.0)

    def test_substitutions(self):
        assert macro_acceleration(MacroAction.ACCELERATE, 0.5) == pytest.approx(0.75, abs=1e-12)
        assert macro_acceleration(MacroAction.HARD_DECELERATE, 5.0) == -4.5
        assert macro_acceleration(MacroAction.ACCELERATE, 5.0) == 2.0
        assert macro_acceleration(MacroAction.DECELERATE, 0.5) == pytest.approx(-0.75, abs=1e-12)
        assert macro_acceleration(MacroAction.HARD_ACCELERATE, 0.5) == pytest.approx(2.5, abs=1e-12)

    def test_maintain_draw_checked(self):
        with pytest.raises(ValueError):
            macro_acceleration(MacroAction.MAINTAIN, 0.3)

    @pytest.mark.parametrize(
        "action,low,high",
        [
            (MacroAction.MAINTAIN, -0.25, 0.25),
            (MacroAction.ACCELERATE, 0.25, 2.0),
            (MacroAction.DECELERATE, -2.0, -0.25),
            (MacroAction.HARD_ACCELERATE, 2.0, 3.0),
            (MacroAction.HARD_DECELERATE, -4.5, -2.0),
        ],
    )
    def test_bounds(self, action, low, high):
        rng = np.random.default_rng(action.index)
        for _ in range(20_000):
            control = realize_macro_action(action, rng)
            assert low <= control.a <= high
            assert control.l_p == 0.0

    def test_means(self):
        rng = np.random.default_rng(40)
        n = 100_000
        maintain = np.array([realize_macro_action(MacroAction.MAINTAIN, rng).a for _ in range(n)])
        assert abs(maintain.mean()) < 4 * maintain.std() / np.sqrt(n)
        accelerate = np.array([realize_macro_action(MacroAction.ACCELERATE, rng).a for _ in range(n)])
        expected = 0.25 + (1.0 - np.exp(-0.75 * 1.75)) / 0.75
        assert accelerate.mean() == pytest.approx(expected, abs=4 * accelerate.std() / np.sqrt(n))

    @pytest.mark.slow
    @pytest.mark.parametrize(
        "action,expected",
        [
            (MacroAction.MAINTAIN, 0.0),
            (MacroAction.ACCELERATE, 0.25 + (1.0 - np.exp(-0.75 * 1.75)) / 0.75),
            (MacroAction.DECELERATE, -(0.25 + (1.0 - np.exp(-0.75 * 1.75)) / 0.75)),
        ],
    )
    def test_means_three_sigma(self, action, expected):
        rng = np.random.default_rng(41 + action.index)
        n = 1_000_000
        draws = np.array([realize_macro_action(action, rng).a for _ in range(n)])
        assert abs(draws.mean() - expected) < 3 * draws.std() / np.sqrt(n)


class TestEpsilonGreedy:
    def test_greedy(self, rng):
        assert epsilon_greedy([1.0, 3.0, 2.0], 0.0, rng) == 1

    def test_tie_break(self, rng):
        assert epsilon_greedy([2.0, 2.0, 1.0], 0.0, rng) == 0

    def test_uniform_when_fully_exploring(self, rng):
        n = 100_000
        counts = np.bincount([epsilon_greedy(np.arange(6.0), 1.0, rng) for _ in range(n)], minlength=6)
        sigma = np.sqrt(n * (1 / 6) * (5 / 6))
        assert np.all(np.abs(counts - n / 6) < 4 * sigma)

    @pytest.mark.slow
    def test_uniform_three_sigma(self):
        rng = np.random.default_rng(101)
        n = 1_000_000
        counts = np.bincount([epsilon_greedy(np.arange(6.0), 1.0, rng) for _ in range(n)], minlength=6)
        sigma = np.sqrt(n * (1 / 6) * (5 / 6))
        assert np.all(np.abs(counts - n / 6) < 3 * sigma)

    def test_range(self, rng):
        with pytest.raises(ValueError):
            epsilon_greedy([0.0], 1.5, rng)

    def test_decay_law(self):
        eps = 1.0
        for _ in range(100):
            eps = decay_epsilon(eps, 0.99, 0.01)
        assert eps == pytest.approx(0.99 ** 100)
        assert eps == pytest.approx(0.366, abs=1e-3)
        assert decay_epsilon(0.0101, 0.5, 0.01) == 0.01


class TestTargets:
    def test_terminal(self, rng):
        net = constant_net([1.0, 2.0, 0.0], rng)
        assert dqn_target(-3.0, True, np.zeros(14), net, net, 0.99) == -3.0

    def test_max_rule(self, rng):
        target = constant_net([1.0, 2.0, 0.0], rng)
        primary = constant_net([5.0, 1.0, 1.0], rng)
        assert dqn_target(0.5, False, np.zeros(14), primary, target, 0.99, "alg1_max") == pytest.approx(2.48, abs=1e-12)

    def test_double_rule(self, rng):
        target = constant_net([1.0, 2.0, 0.0], rng)
        primary = constant_net([5.0, 1.0, 1.0], rng)
        assert dqn_target(0.5, False, np.zeros(14), primary, target, 0.99, "double") == pytest.approx(1.49, abs=1e-12)

    def test_unknown_rule(self):
        with pytest.raises(ValueError):
            compute_td_targets(np.zeros(1), np.zeros(1), np.zeros((1, 2)), np.zeros((1, 2)), 0.9, "max")


class TestTdUpdate:
    def _learner(self, **overrides):
        config = DqnConfig(batch_size=8, buffer_size=100, hidden_sizes=(8, 8), **overrides)
        return DqnLearner(3, config, np.random.default_rng(10))

    def test_zero_loss_keeps_parameters(self):
        learner = self._learner()
        for w in learner.primary.weights:
            w[...] = 0.0
        learner.primary.biases[-1][...] = [1.0, 2.0, 0.0]
        learner.target.load_from(learner.primary)
        before = learner.primary.copy()
        experiences = [
            ExperienceLow(s=np.full(14, 0.05), a=1, r=2.0, s_next=np.full(14, 0.15), done=True),
            ExperienceLow(s=np.full(14, 0.25), a=0, r=1.0, s_next=np.full(14, 0.35), done=True),
        ]
        loss = learner.td_update(DqnBatch.from_experiences(experiences))
        assert loss == 0.0
        assert learner.primary.equals(before)

    def test_target_sync_every_n_updates(self):
        learner = self._learner(n_update=3)
        batch = DqnBatch.from_experiences(random_experiences(np.random.default_rng(1), 8, 3))
        learner.td_update(batch)
        learner.td_update(batch)
        assert not learner.target.equals(learner.primary)
        learner.td_update(batch)
        assert learner.target.equals(learner.primary)
        assert learner.updates == 3

    @pytest.mark.parametrize("rule", ["double", "alg1_max"])
    def test_loss_gradient(self, rule):
        rng = np.random.default_rng(13)
        primary = build_mlp(14, 3, rng, hidden_sizes=(8, 8))
        target = build_mlp(14, 3, rng, hidden_sizes=(8, 8))
        batch = DqnBatch.from_experiences(random_experiences(rng, 6, 3))
        _, grads = td_loss(primary, target, batch, 0.99, rule)
        finite_difference_check(
            lambda: td_loss(primary, target, batch, 0.99, rule)[0], primary.parameters(), grads.parameters()
        )

    def test_ready_gate(self):
        learner = self._learner()
        assert learner.config.update_gate == 100
        for e in random_experiences(np.random.default_rng(2), 99, 3):
            learner.store(e)
        assert not learner.ready
        learner.store(random_experiences(np.random.default_rng(3), 1, 3)[0])
        assert learner.ready

    def test_save_and_load(self, tmp_path):
        learner = self._learner()
        path = learner.save(str(tmp_path / "low.json"))
        other = DqnLearner(3, learner.config, np.random.default_rng(99))
        other.load_weights(str(path))
        assert other.primary.equals(learner.primary)
        assert other.target.equals(learner.primary)
        wrong_role = DqnLearner(3, learner.config, np.random.default_rng(99), role="high_dqn")
        with pytest.raises(ValueError):
            wrong_role.load_weights(str(path))


class TestLowLevelTrainer:
    def test_zero_episodes(self, short_env, small_dqn_config):
        trainer = LowLevelTrainer(small_dqn_config, short_env, rng=np.random.default_rng(5))
        before = trainer.learner.primary.copy()
        assert trainer.train(episodes=0) == []
        assert trainer.learner.primary.equals(before)

    def test_epsilon_decays_per_episode(self, short_env, small_dqn_config):
        trainer = LowLevelTrainer(small_dqn_config, short_env, rng=np.random.default_rng(5))
        metrics = trainer.train(episodes=5)
        assert [m.epsilon for m in metrics] == pytest.approx([0.99 ** k for k in range(5)])
        assert trainer.learner.epsilon == pytest.approx(0.99 ** 5)

    def test_buffer_capacity_and_updates(self, short_env, small_dqn_config):
        trainer = LowLevelTrainer(small_dqn_config, short_env, rng=np.random.default_rng(6))
        metrics = trainer.train(episodes=10)
        assert trainer.env_steps == sum(m.steps for m in metrics)
        assert len(trainer.learner.buffer) == min(trainer.env_steps, small_dqn_config.buffer_size)
        assert trainer.learner.updates == trainer.env_steps - small_dqn_config.update_gate + 1
        assert metrics[-1].loss_mean is not None

    def test_evaluation_clock(self, short_env, small_dqn_config):
        calls = []

        def hook(env_steps, episode):
            calls.append((env_steps, episode))
            return EvaluationPoint(env_steps=env_steps, episode=episode, success_rate=0.0, episodes=1)

        trainer = LowLevelTrainer(small_dqn_config, short_env, rng=np.random.default_rng(7), eval_every=10, eval_hook=hook)
        trainer.train(episodes=2)
        assert [c[0] for c in calls] == list(range(10, trainer.env_steps + 1, 10))
        assert len(trainer.evaluation_rows()) == len(calls)

    def test_functional_entry_point(self, short_env, small_dqn_config):
        learner, metrics = train_low_level(small_dqn_config, short_env, DriverRewardModel(), np.random.default_rng(8))
        assert len(metrics) == small_dqn_config.episodes
        assert learner.n_actions == 6

    def test_reproducible(self, small_dqn_config):
        rows = []
        for _ in range(2):
            env = MergeEnvironment(config=EnvConfig(t_max=3.0), rng=np.random.default_rng(1))
            trainer = LowLevelTrainer(small_dqn_config, env, rng=np.random.default_rng(2))
            trainer.train(episodes=3)
            rows.append(trainer.metrics_rows())
        assert rows[0] == rows[1]


class TestHighLevelTrainer:
    def _trainer(self, skill_library, t_max, n_step, reward=None):
        env = MergeEnvironment(config=EnvConfig(t_max=t_max), rng=np.random.default_rng(3))
        config = DqnConfig(n_step=n_step, hidden_sizes=(8, 8))
        return HighLevelTrainer(skill_library, config, env, reward=reward, rng=np.random.default_rng(4))

    def test_mean_reward_over_interval(self, skill_library):
        trainer = self._trainer(skill_library, t_max=3.0, n_step=3, reward=SequenceReward())
        trainer.train(episodes=1)
        first = trainer.learner.buffer[0]
        assert first.steps == 3
        assert first.r_avg == pytest.approx(2.0)
        assert all(e.r_avg == pytest.approx(2.0) for e in trainer.learner.buffer)

    def test_terminal_inside_interval(self, skill_library):
        trainer = self._trainer(skill_library, t_max=0.2, n_step=8)
        trainer.train(episodes=1)
        assert len(trainer.learner.buffer) == 1
        only = trainer.learner.buffer[0]
        assert only.steps == 2
        assert only.done

    def test_decision_count(self, skill_library):
        trainer = self._trainer(skill_library, t_max=2.0, n_step=8)
        metrics = trainer.train(episodes=1)
        assert [e.steps for e in trainer.learner.buffer] == [8, 8, 4]
        assert trainer.high_level_steps == [3]
        assert metrics[0].extra["decisions"] == 3
        assert metrics[0].steps == trainer.env_steps == 20

    def test_single_step_interval(self, skill_library):
        trainer = self._trainer(skill_library, t_max=1.0, n_step=1)
        metrics = trainer.train(episodes=1)
        assert metrics[0].extra["decisions"] == metrics[0].steps == 10

    def test_functional_entry_point(self, skill_library):
        env = MergeEnvironment(config=EnvConfig(t_max=1.0), rng=np.random.default_rng(3))
        config = DqnConfig(episodes=1, n_step=4, hidden_sizes=(8, 8))
        learner, metrics = train_high_level(config, env, DriverRewardModel(), skill_library, np.random.default_rng(4))
        assert learner.n_actions == skill_library.n_skills
        assert metrics[0].extra["decisions"] == 3

    def test_fingerprint_mismatch(self, skill_library):
        with pytest.raises(FingerprintMismatchError):
            HighLevelTrainer(skill_library, DqnConfig(), fingerprint="xyz")

    def test_save_metadata(self, skill_library, tmp_path):
        trainer = self._trainer(skill_library, t_max=1.0, n_step=4)
        path = trainer.save(str(tmp_path / "high.json"))
        other = DqnLearner(4, trainer.learner.config, role="high_dqn")
        metadata = other.load_weights(str(path))
        assert metadata["n_skills"] == 4
        assert metadata["fingerprint"] == "abc"
        assert metadata["n_step"] == 4

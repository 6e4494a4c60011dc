#!/usr/bin/env python3
"""
Main Runner Script
Skill discovery, low-level / hierarchical DQN training, evaluation and trajectory export
"""

import sys
import argparse
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd
from loguru import logger

# Add project to path
sys.path.insert(0, str(Path(__file__).parent))

from agents.dqn import DqnLearner, HighLevelTrainer, LowLevelTrainer
from agents.skills import (
    FingerprintMismatchError,
    SkillLibrary,
    SkillTrainer,
    collect_rollouts,
    mean_pairwise_l1,
    skill_summary,
    visitation_histograms,
)
from core.environment import MergeEnvironment
from core.evaluation import (
    Evaluator,
    GreedyHrlPolicy,
    GreedyLowLevelPolicy,
    MergePolicy,
    ScriptedMergePolicy,
)
from core.models import MACRO_ACTIONS, RunConfig, observation_fingerprint
from core.neural import save_checkpoint
from core.reward import DriverRewardModel
from utils import (
    ConfigError,
    ExcelExporter,
    MetricsLog,
    TrajectoryRecorder,
    load_config,
    resolve_output_dir,
    write_csv,
    write_frame,
    write_manifest,
)

MODES = ["train-skills", "train-low", "train-hrl", "eval", "export-traj"]
EXIT_CONFIG = 2
EXIT_FINGERPRINT = 3

DQN_COLUMNS = ["episode", "return", "steps", "env_steps", "epsilon", "outcome", "loss_mean"]
SKILL_COLUMNS = [
    "episode", "skill", "return", "mean_r_z", "steps", "env_steps", "outcome",
    "disc_loss", "disc_accuracy", "q1_loss", "q2_loss", "value_loss", "policy_loss",
]


def setup_logging(log_level="INFO", log_file: Optional[Path] = None):
    """Setup logging"""
    logger.remove()
    logger.add(
        sys.stdout,
        format="<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | <level>{message}</level>",
        level=log_level,
    )
    if log_file is not None:
        logger.add(
            str(log_file),
            rotation="100 MB",
            level=log_level,
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Merge Skill Lab - skill discovery and hierarchical DQN for highway on-ramp merging"
    )
    parser.add_argument("mode", choices=MODES, help="What to run")
    parser.add_argument("--config", type=str, help="YAML config (default: config/config.yaml)")
    parser.add_argument("--seed", type=int, help="Master seed")
    parser.add_argument("--out", type=str, help="Output directory")
    parser.add_argument("--episodes", type=int, help="Training episodes, or evaluated/exported episodes")
    parser.add_argument("--n-step", type=int, choices=[8, 16], help="Frames per high-level decision")
    parser.add_argument("--skills", type=str, help="Skill library checkpoint")
    parser.add_argument("--target-rule", choices=["double", "alg1"], help="TD target rule")
    parser.add_argument("--eval-every", type=int, help="Evaluate every N environment steps")
    parser.add_argument("--eval-episodes", type=int, help="Episodes per evaluation")
    parser.add_argument("--checkpoint", type=str, help="DQN checkpoint for eval / export-traj")
    parser.add_argument("--agent", choices=["low", "hrl", "scripted"], help="Policy for eval / export-traj")
    parser.add_argument(
        "--log-level",
        type=str,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Log level",
    )
    return parser


def overrides_from_args(args: argparse.Namespace) -> Dict[str, Any]:
    episodes_key = {
        "train-skills": "skills.episodes",
        "train-low": "low_level.episodes",
        "train-hrl": "high_level.episodes",
        "eval": "evaluation.eval_episodes",
        "export-traj": "evaluation.trajectory_episodes",
    }[args.mode]
    target_rule = {"double": "double", "alg1": "alg1_max"}.get(args.target_rule)
    overrides = {
        "mode": args.mode,
        "seed": args.seed,
        "output_dir": args.out,
        "high_level.n_step": args.n_step,
        "skills_path": args.skills,
        "low_level.target_rule": target_rule,
        "high_level.target_rule": target_rule,
        "evaluation.eval_every": args.eval_every,
        "evaluation.eval_episodes": args.eval_episodes,
        "checkpoint": args.checkpoint,
        "agent": args.agent,
        "log_level": args.log_level,
    }
    # --episodes wins over --eval-episodes in eval mode
    overrides[episodes_key] = args.episodes if args.episodes is not None else overrides.get(episodes_key)
    return overrides


class ExperimentRunner:
    """
    Dispatches one RunConfig to its trainer or evaluator and writes every artifact
    Random streams: environment, agent, evaluation and diagnostics are spawned from the master seed.
    """

    def __init__(self, config: RunConfig, output_dir: Path):
        self.config = config
        self.output_dir = Path(output_dir)
        env_seq, agent_seq, eval_seq, diag_seq = np.random.SeedSequence(config.seed).spawn(4)
        self.env_rng = np.random.default_rng(env_seq)
        self.agent_rng = np.random.default_rng(agent_seq)
        self.eval_rng = np.random.default_rng(eval_seq)
        self.diag_rng = np.random.default_rng(diag_seq)
        self.fingerprint = observation_fingerprint(config.observation, config.environment, config.skills.n_skills)
        self.tables: Dict[str, pd.DataFrame] = {}
        self.summary: Dict[str, Any] = {"mode": config.mode, "seed": config.seed}

    # -- shared pieces ---------------------------------------------------

    def make_environment(self, rng: np.random.Generator) -> MergeEnvironment:
        c = self.config
        return MergeEnvironment(c.environment, c.geometry, c.observation, rng=rng)

    def make_evaluator(self) -> Evaluator:
        c = self.config
        return Evaluator(c.environment, c.geometry, c.observation, rng=self.eval_rng)

    def load_skills(self) -> SkillLibrary:
        if not self.config.skills_path:
            raise ConfigError("skills_path", f"{self.config.mode} with agent hrl requires --skills")
        return SkillLibrary.load(self.config.skills_path, expected_fingerprint=self.fingerprint)

    def build_policy(self) -> MergePolicy:
        c = self.config
        if c.agent == "scripted":
            return ScriptedMergePolicy(c.reward.headway, c.geometry.vehicle_length, c.geometry.merge_zone_start)

        if c.agent == "low":
            learner = DqnLearner(len(MACRO_ACTIONS), c.low_level, self.agent_rng, role="low_dqn")
        else:
            skills = self.load_skills()
            learner = DqnLearner(skills.n_skills, c.high_level, self.agent_rng, role="high_dqn")

        if c.checkpoint:
            metadata = learner.load_weights(c.checkpoint)
            logger.info(f"✓ Loaded {learner.role} checkpoint: {c.checkpoint}")
            if c.agent == "hrl" and metadata.get("fingerprint") not in (None, skills.fingerprint):
                raise FingerprintMismatchError(
                    f"Checkpoint {c.checkpoint} was trained with skills {metadata['fingerprint']!r}, "
                    f"library is {skills.fingerprint!r}"
                )
        else:
            logger.warning(f"No checkpoint given, evaluating an untrained {learner.role} network")

        if c.agent == "low":
            return GreedyLowLevelPolicy(learner.primary)
        return GreedyHrlPolicy(learner.primary, skills, n_step=c.high_level.n_step)

    def _write_curves(self, trainer):
        c = self.config.evaluation
        log = MetricsLog()
        for m in trainer.metrics:
            log.append("return", m.episode, m.episode_return)
        for p in trainer.evaluations:
            log.append("success_rate", p.env_steps, p.success_rate)

        rewards = log.curve("return", c.reward_window, index_name="episode")
        success = log.curve("success_rate", c.success_window, index_name="env_steps")
        write_frame(rewards, self.output_dir / "reward_curve.csv")
        write_frame(success, self.output_dir / "success_curve.csv")
        write_csv(trainer.evaluation_rows(), self.output_dir / "evaluation.csv")
        self.tables["reward_curve"] = rewards
        self.tables["success_curve"] = success

    def _summarize_training(self, trainer):
        recent = trainer.metrics[-100:]
        self.summary.update(
            {
                "episodes": len(trainer.metrics),
                "env_steps": trainer.env_steps,
                "updates": trainer.learner.updates,
                "final_epsilon": trainer.learner.epsilon,
                "recent_mean_return": float(np.mean([m.episode_return for m in recent])) if recent else None,
                "recent_finish_rate": float(np.mean([m.outcome == "finished" for m in recent])) if recent else None,
            }
        )
        if trainer.evaluations:
            self.summary["last_success_rate"] = trainer.evaluations[-1].success_rate

    # -- modes -----------------------------------------------------------

    def train_skills(self):
        c = self.config
        env = self.make_environment(self.env_rng)
        trainer = SkillTrainer(c.skills, env, self.agent_rng, self.fingerprint)
        library = trainer.train(progress=True)
        logger.info(f"✓ Trained {library.n_skills} skills over {trainer.env_steps} environment steps")

        library.save(str(self.output_dir / "skills.json"))
        save_checkpoint(
            str(self.output_dir / "skill_networks.json"),
            {**trainer.ensemble.networks(), "discriminator": trainer.discriminator.net},
            metadata={"kind": "skill_ensemble", "n_skills": library.n_skills, "fingerprint": self.fingerprint},
        )
        metrics = pd.DataFrame(trainer.metrics_rows(), columns=SKILL_COLUMNS)
        write_frame(metrics, self.output_dir / "skill_metrics.csv")
        self.tables["skill_metrics"] = metrics

        rollouts = collect_rollouts(
            library, self.make_environment(self.diag_rng), c.evaluation.trajectory_episodes, deterministic=True
        )
        summary = pd.DataFrame(skill_summary(rollouts, trainer.discriminator))
        write_frame(summary, self.output_dir / "skill_summary.csv")
        self.tables["skill_summary"] = summary
        divergence = mean_pairwise_l1(visitation_histograms(rollouts, library.n_skills, c.observation.n_bins))
        self.summary.update({"n_skills": library.n_skills, "env_steps": trainer.env_steps, "skill_divergence": divergence})
        logger.info(f"✓ Mean pairwise visitation divergence: {divergence:.3f}")

    def train_low(self):
        c = self.config
        env = self.make_environment(self.env_rng)
        evaluator = self.make_evaluator()
        trainer = LowLevelTrainer(
            c.low_level,
            env,
            DriverRewardModel(c.reward),
            self.agent_rng,
            eval_every=c.evaluation.eval_every,
            eval_hook=evaluator.hook(
                lambda: GreedyLowLevelPolicy(trainer.learner.primary.copy()), c.evaluation.eval_episodes
            ),
        )
        trainer.train(progress=True)
        logger.info(f"✓ Low-level agent trained for {len(trainer.metrics)} episodes")

        trainer.learner.save(str(self.output_dir / "low_dqn.json"))
        metrics = pd.DataFrame(trainer.metrics_rows(), columns=DQN_COLUMNS)
        write_frame(metrics, self.output_dir / "metrics.csv")
        self.tables["metrics"] = metrics
        self._write_curves(trainer)
        self._summarize_training(trainer)

    def train_hrl(self):
        c = self.config
        skills = self.load_skills()
        env = self.make_environment(self.env_rng)
        evaluator = self.make_evaluator()
        trainer = HighLevelTrainer(
            skills,
            c.high_level,
            env,
            DriverRewardModel(c.reward),
            self.agent_rng,
            eval_every=c.evaluation.eval_every,
            eval_hook=evaluator.hook(
                lambda: GreedyHrlPolicy(trainer.learner.primary.copy(), skills, n_step=c.high_level.n_step),
                c.evaluation.eval_episodes,
            ),
        )
        trainer.train(progress=True)
        logger.info(f"✓ Skill selector trained for {len(trainer.metrics)} episodes (n_step={c.high_level.n_step})")

        trainer.save(str(self.output_dir / "high_dqn.json"))
        metrics = pd.DataFrame(trainer.metrics_rows(), columns=DQN_COLUMNS + ["decisions"])
        write_frame(metrics, self.output_dir / "metrics.csv")
        self.tables["metrics"] = metrics
        self._write_curves(trainer)
        self._summarize_training(trainer)

    def evaluate(self):
        c = self.config
        policy = self.build_policy()
        result = self.make_evaluator().run(policy, c.evaluation.eval_episodes)
        row = {"agent": c.agent, **result.get_summary()}
        frame = pd.DataFrame([row])
        write_frame(frame, self.output_dir / "evaluation.csv")
        self.tables["evaluation"] = frame
        self.summary.update(row)
        logger.info(f"✓ Success rate {result.success_rate:.3f} over {result.episodes} episodes ({c.agent})")

    def export_trajectories(self):
        c = self.config
        policy = self.build_policy()
        recorder = TrajectoryRecorder()
        result = self.make_evaluator().run(policy, c.evaluation.trajectory_episodes, listener=recorder)
        path = recorder.save(self.output_dir / "trajectory.csv")
        logger.info(f"✓ Exported {len(recorder)} frames from {len(recorder.episodes)} episode(s) to {path}")
        self.summary.update({"agent": c.agent, **result.get_summary()})

        if isinstance(policy, GreedyHrlPolicy):
            rollouts = collect_rollouts(
                policy.skills, self.make_environment(self.diag_rng), c.evaluation.trajectory_episodes, deterministic=True
            )
            summary = pd.DataFrame(skill_summary(rollouts))
            write_frame(summary, self.output_dir / "skill_summary.csv")
            self.tables["skill_summary"] = summary

    def run(self) -> Path:
        self.output_dir.mkdir(parents=True, exist_ok=True)
        extra = {"skills_fingerprint": self.fingerprint} if self.config.mode in ("train-skills", "train-hrl") or self.config.agent == "hrl" else {}
        write_manifest(self.config, self.output_dir / "manifest.txt", extra)

        {
            "train-skills": self.train_skills,
            "train-low": self.train_low,
            "train-hrl": self.train_hrl,
            "eval": self.evaluate,
            "export-traj": self.export_trajectories,
        }[self.config.mode]()

        if self.config.excel_report:
            ExcelExporter(str(self.output_dir)).export_run_report(self.summary, self.tables)
        return self.output_dir


def run(config: RunConfig) -> int:
    """Execute one configured run; returns the process exit status"""
    output_dir = resolve_output_dir(config)
    output_dir.mkdir(parents=True, exist_ok=True)
    setup_logging(config.log_level, output_dir / "run.log")

    logger.info("=" * 80)
    logger.info(f"Merge Skill Lab - {config.mode} (seed {config.seed})")
    logger.info("=" * 80)

    try:
        ExperimentRunner(config, output_dir).run()
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    except FingerprintMismatchError as e:
        logger.error(f"Refusing to run: {e}")
        return EXIT_FINGERPRINT
    except Exception as e:
        logger.exception(f"Run failed: {e}")
        return 1

    logger.info("\n" + "=" * 80)
    logger.info(f"✓ {config.mode} complete!")
    logger.info(f"✓ Artifacts saved to: {output_dir}")
    logger.info("=" * 80)
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level or "INFO")
    try:
        config = load_config(args.config, overrides_from_args(args))
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    return run(config)


if __name__ == "__main__":
    sys.exit(main())

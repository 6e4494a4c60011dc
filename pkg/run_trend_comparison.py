#!/usr/bin/env python3
"""
Trend Comparison Runner
Pre-trains a skill library, trains the low-level and hierarchical agents on it for several
seeds, and reports how often the hierarchical success curve sits above the baseline's.
"""

import sys
import argparse
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd
from loguru import logger

# Add project to path
sys.path.insert(0, str(Path(__file__).parent))

from run_experiment import EXIT_CONFIG, run, setup_logging
from utils import ConfigError, dominance_fraction, load_config, write_csv

EXIT_TREND_NOT_MET = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Merge Skill Lab - hierarchical vs low-level success-rate comparison"
    )
    parser.add_argument("--config", type=str, help="YAML config (default: config/config.yaml)")
    parser.add_argument("--out", type=str, default="outputs/trend_comparison", help="Output directory")
    parser.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2], help="Master seeds")
    parser.add_argument("--n-skills", type=int, default=8, help="Skills to pre-train")
    parser.add_argument("--skill-episodes", type=int, default=1500, help="Skill pre-training episodes")
    parser.add_argument("--episodes", type=int, default=3000, help="Training episodes per agent")
    parser.add_argument("--n-step", type=int, choices=[8, 16], default=8, help="Frames per high-level decision")
    parser.add_argument("--learning-starts", type=int, default=1000, help="Replay gate for both DQN agents")
    parser.add_argument("--eval-every", type=int, default=20000, help="Evaluate every N environment steps")
    parser.add_argument("--eval-episodes", type=int, default=200, help="Episodes per evaluation")
    parser.add_argument("--threshold", type=float, default=0.7, help="Dominance share a seed needs to pass")
    parser.add_argument("--burn-in", type=float, default=0.25, help="Leading share of checkpoints to ignore")
    parser.add_argument("--required-seeds", type=int, default=2, help="Seeds that must pass")
    parser.add_argument(
        "--log-level",
        type=str,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        default="INFO",
        help="Log level",
    )
    return parser


def stage_overrides(args: argparse.Namespace, seed: int, mode: str, out: Path) -> Dict[str, Any]:
    overrides: Dict[str, Any] = {
        "mode": mode,
        "seed": seed,
        "output_dir": str(out / mode),
        "excel_report": False,
        "log_level": args.log_level,
        "skills.n_skills": args.n_skills,
        "evaluation.eval_every": args.eval_every,
        "evaluation.eval_episodes": args.eval_episodes,
    }
    if mode == "train-skills":
        overrides["skills.episodes"] = args.skill_episodes
    elif mode == "train-low":
        overrides["low_level.episodes"] = args.episodes
        overrides["low_level.learning_starts"] = args.learning_starts
    else:
        overrides["high_level.episodes"] = args.episodes
        overrides["high_level.learning_starts"] = args.learning_starts
        overrides["high_level.n_step"] = args.n_step
        overrides["skills_path"] = str(out / "train-skills" / "skills.json")
    return overrides


def compare_seed(args: argparse.Namespace, seed: int) -> Optional[Dict[str, Any]]:
    """Run the three stages for one seed; None when a stage fails"""
    out = Path(args.out) / f"seed{seed}"
    for mode in ("train-skills", "train-low", "train-hrl"):
        status = run(load_config(args.config, stage_overrides(args, seed, mode, out)))
        if status != 0:
            logger.error(f"Seed {seed}: {mode} exited with status {status}")
            return None

    low = pd.read_csv(out / "train-low" / "success_curve.csv")
    hrl = pd.read_csv(out / "train-hrl" / "success_curve.csv")
    share = dominance_fraction(hrl, low, burn_in=args.burn_in)
    checkpoints = len(low.merge(hrl, on="env_steps"))
    logger.info(f"Seed {seed}: hierarchical ahead at {share:.1%} of {checkpoints} shared checkpoints")
    return {
        "seed": seed,
        "checkpoints": checkpoints,
        "dominance": share,
        "low_final": float(low["success_rate_avg"].iloc[-1]) if len(low) else None,
        "hrl_final": float(hrl["success_rate_avg"].iloc[-1]) if len(hrl) else None,
        "passed": share >= args.threshold,
    }


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)

    logger.info("=" * 80)
    logger.info(f"Trend comparison over seeds {args.seeds}")
    logger.info("=" * 80)

    rows = []
    try:
        for seed in args.seeds:
            row = compare_seed(args, seed)
            if row is None:
                return 1
            rows.append(row)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG

    # each stage re-targets the log file, restore the console sink
    setup_logging(args.log_level)
    path = write_csv(rows, Path(args.out) / "trend_comparison.csv")
    passed = sum(r["passed"] for r in rows)

    logger.info("\n" + "=" * 80)
    logger.info(f"✓ {passed}/{len(rows)} seeds at or above {args.threshold:.0%} dominance")
    logger.info(f"✓ Report saved to: {path}")
    logger.info("=" * 80)
    return 0 if passed >= args.required_seeds else EXIT_TREND_NOT_MET


if __name__ == "__main__":
    sys.exit(main())

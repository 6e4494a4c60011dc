"""
Unsupervised skill discovery
"""

from .sac import (
    SacBatch,
    SacEnsemble,
    build_sac_ensemble,
    one_hot,
    sac_gradients,
    sac_losses,
    sac_q_target,
    sac_update,
    skill_vector,
)
from .discriminator import (
    SkillDiscriminator,
    cross_entropy,
    discriminator_accuracy,
    discriminator_loss,
    discriminator_update,
    skill_reward,
)
from .library import FingerprintMismatchError, SkillLibrary, act
from .trainer import SkillTrainer, sample_skill_prior, train_skills
from .diagnostics import (
    SkillRollout,
    collect_rollouts,
    held_out_accuracy,
    mean_pairwise_l1,
    rollout_skill,
    skill_summary,
    visitation_histograms,
)

__all__ = [
    "SacBatch",
    "SacEnsemble",
    "build_sac_ensemble",
    "one_hot",
    "sac_gradients",
    "sac_losses",
    "sac_q_target",
    "sac_update",
    "skill_vector",
    "SkillDiscriminator",
    "cross_entropy",
    "discriminator_accuracy",
    "discriminator_loss",
    "discriminator_update",
    "skill_reward",
    "FingerprintMismatchError",
    "SkillLibrary",
    "act",
    "SkillTrainer",
    "sample_skill_prior",
    "train_skills",
    "SkillRollout",
    "collect_rollouts",
    "held_out_accuracy",
    "mean_pairwise_l1",
    "rollout_skill",
    "skill_summary",
    "visitation_histograms",
]

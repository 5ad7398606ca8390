from .baselines import OracleAgent, PolicyAgent, RandomAgent, ScriptedAgent, random_policy
from .policy import PolicyParams, init_params, policy_forward
from .ppo import (
    EpisodeRecord,
    PPOConfig,
    RolloutBuffer,
    compute_gae,
    load_checkpoint,
    ppo_loss_and_grad,
    ppo_update,
    save_checkpoint,
    train,
)

__all__ = [
    "EpisodeRecord",
    "OracleAgent",
    "PPOConfig",
    "PolicyAgent",
    "PolicyParams",
    "RandomAgent",
    "RolloutBuffer",
    "ScriptedAgent",
    "compute_gae",
    "init_params",
    "load_checkpoint",
    "policy_forward",
    "ppo_loss_and_grad",
    "ppo_update",
    "random_policy",
    "save_checkpoint",
    "train",
]

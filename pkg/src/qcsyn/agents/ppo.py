"""Proximal policy optimization on top of :mod:`qcsyn.agents.policy`.

Single-threaded and deterministic for a given seed. Updates use plain
gradient descent so a checkpoint is fully described by its weights.
"""
from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Callable, NamedTuple

import numpy as np

from ..env import EnvConfig, Outcome, QuantumCircuitEnv
from ..gates import Action
from ..metrics import EpisodeOutcome
from ..rng import Xoshiro256, derive_seed
from .policy import PolicyParams, backward, entropy, init_params, log_softmax, policy_forward, softmax

logger = logging.getLogger(__name__)

CHECKPOINT_VERSION = 1


@dataclass
class PPOConfig:
    learning_rate: float = 1e-3
    clip_epsilon: float = 0.2
    gamma: float = 0.99
    gae_lambda: float = 0.95
    rollout_length: int = 512
    minibatch_size: int = 64
    epochs: int = 10
    entropy_coef: float = 0.0
    value_coef: float = 0.5
    max_grad_norm: float = 0.0  # 0 disables clipping
    total_steps: int = 100_000
    seed: int = 1
    hidden: tuple[int, ...] = (64, 64)
    checkpoint_every: int = 0  # in updates; 0 disables

    def __post_init__(self):
        self.hidden = tuple(int(h) for h in self.hidden)
        if not 0 < self.clip_epsilon < 1:
            raise ValueError(f"clip_epsilon must lie in (0, 1), got {self.clip_epsilon}")
        for name in ("gamma", "gae_lambda"):
            v = getattr(self, name)
            if not 0 <= v < 1:
                raise ValueError(f"{name} must lie in [0, 1), got {v}")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.rollout_length < 1 or self.minibatch_size < 1 or self.epochs < 1:
            raise ValueError("rollout_length, minibatch_size and epochs must be positive")
        if self.total_steps < 0:
            raise ValueError("total_steps must be non-negative")


@dataclass
class RolloutBuffer:
    observations: list[np.ndarray] = field(default_factory=list)
    gate_actions: list[int] = field(default_factory=list)
    perm_actions: list[int] = field(default_factory=list)
    log_probs: list[float] = field(default_factory=list)
    rewards: list[float] = field(default_factory=list)
    values: list[float] = field(default_factory=list)
    dones: list[bool] = field(default_factory=list)
    advantages: np.ndarray | None = None
    returns: np.ndarray | None = None

    def __len__(self):
        return len(self.rewards)

    def add(self, obs, action, log_prob, reward, value, done):
        self.observations.append(obs)
        self.gate_actions.append(int(action[0]))
        self.perm_actions.append(int(action[1]))
        self.log_probs.append(float(log_prob))
        self.rewards.append(float(reward))
        self.values.append(float(value))
        self.dones.append(bool(done))


def compute_gae(
    rewards, values, dones, last_value: float, gamma: float, gae_lambda: float
) -> tuple[np.ndarray, np.ndarray]:
    """Generalized advantage estimates and returns (``A + V``).

    ``dones[t]`` marks that the episode ended at step ``t``; ``last_value``
    bootstraps the state following the final step.
    """
    rewards = np.asarray(rewards, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    dones = np.asarray(dones, dtype=np.float64)
    T = len(rewards)
    adv = np.zeros(T)
    next_adv = 0.0
    for t in range(T - 1, -1, -1):
        next_value = values[t + 1] if t + 1 < T else last_value
        live = 1.0 - dones[t]
        delta = rewards[t] + gamma * next_value * live - values[t]
        next_adv = delta + gamma * gae_lambda * live * next_adv
        adv[t] = next_adv
    return adv, adv + values


def normalize_advantages(adv: np.ndarray) -> np.ndarray:
    adv = np.asarray(adv, dtype=np.float64)
    centered = adv - adv.mean()
    std = centered.std()
    return centered / std if std > 0 else centered


class LossInfo(NamedTuple):
    loss: float
    policy_loss: float
    value_loss: float
    entropy: float
    clip_fraction: float


def ppo_loss_and_grad(
    params: PolicyParams,
    obs: np.ndarray,
    gate_actions: np.ndarray,
    perm_actions: np.ndarray,
    old_log_probs: np.ndarray,
    advantages: np.ndarray,
    returns: np.ndarray,
    clip_epsilon: float,
    value_coef: float,
    entropy_coef: float,
) -> tuple[LossInfo, PolicyParams]:
    """Clipped-surrogate loss averaged over the batch, and its exact gradient."""
    fwd = policy_forward(params, obs)
    B = obs.shape[0]
    rows = np.arange(B)
    lp_g, lp_p = log_softmax(fwd.gate_logits), log_softmax(fwd.perm_logits)
    pr_g, pr_p = np.exp(lp_g), np.exp(lp_p)
    logp = lp_g[rows, gate_actions] + lp_p[rows, perm_actions]
    ratio = np.exp(logp - old_log_probs)
    clipped = np.clip(ratio, 1.0 - clip_epsilon, 1.0 + clip_epsilon)
    unclipped_obj, clipped_obj = ratio * advantages, clipped * advantages
    policy_loss = -np.minimum(unclipped_obj, clipped_obj).mean()
    value_err = fwd.value - returns
    value_loss = (value_err**2).mean()
    ent_g, ent_p = entropy(fwd.gate_logits), entropy(fwd.perm_logits)
    ent = (ent_g + ent_p).mean()
    loss = policy_loss + value_coef * value_loss - entropy_coef * ent

    # d loss / d logp: the ratio path only carries gradient where the
    # unclipped term is the active minimum
    active = unclipped_obj <= clipped_obj
    d_logp = np.where(active, -advantages * ratio, 0.0) / B
    onehot_g = np.zeros_like(pr_g)
    onehot_g[rows, gate_actions] = 1.0
    onehot_p = np.zeros_like(pr_p)
    onehot_p[rows, perm_actions] = 1.0
    d_gl = d_logp[:, None] * (onehot_g - pr_g)
    d_pl = d_logp[:, None] * (onehot_p - pr_p)
    # dH/dz_k = -p_k (log p_k + H)
    d_gl += (entropy_coef / B) * pr_g * (lp_g + ent_g[:, None])
    d_pl += (entropy_coef / B) * pr_p * (lp_p + ent_p[:, None])
    d_v = value_coef * 2.0 * value_err / B
    grads = backward(params, fwd, d_gl, d_pl, d_v)
    clip_frac = float(np.mean(np.abs(ratio - 1.0) > clip_epsilon))
    return LossInfo(float(loss), float(policy_loss), float(value_loss), float(ent), clip_frac), grads


class NonFiniteLossError(FloatingPointError):
    pass


def sgd_step(params: PolicyParams, grads: PolicyParams, lr: float, max_grad_norm: float = 0.0) -> None:
    scale = 1.0
    if max_grad_norm > 0:
        norm = float(np.sqrt(sum(float((g * g).sum()) for _, g in grads.items())))
        if norm > max_grad_norm:
            scale = max_grad_norm / norm
    for k, g in grads.items():
        params.arrays[k] -= lr * scale * g


def ppo_update(
    params: PolicyParams, buffer: RolloutBuffer, config: PPOConfig, rng: Xoshiro256
) -> tuple[PolicyParams, list[LossInfo]]:
    """Epochs of minibatch gradient descent; returns new params and per-minibatch diagnostics."""
    if buffer.advantages is None:
        raise ValueError("compute advantages before updating")
    params = params.copy()
    obs = np.asarray(buffer.observations)
    ga = np.asarray(buffer.gate_actions, dtype=np.intp)
    pa = np.asarray(buffer.perm_actions, dtype=np.intp)
    old = np.asarray(buffer.log_probs)
    adv, ret = buffer.advantages, buffer.returns
    T = len(buffer)
    history = []
    for _ in range(config.epochs):
        order = np.asarray(rng.permutation(T), dtype=np.intp)
        for start in range(0, T, config.minibatch_size):
            idx = order[start : start + config.minibatch_size]
            info, grads = ppo_loss_and_grad(
                params,
                obs[idx],
                ga[idx],
                pa[idx],
                old[idx],
                normalize_advantages(adv[idx]),
                ret[idx],
                config.clip_epsilon,
                config.value_coef,
                config.entropy_coef,
            )
            if not np.isfinite(info.loss) or not grads.all_finite():
                raise NonFiniteLossError(f"non-finite PPO loss: {info}")
            sgd_step(params, grads, config.learning_rate, config.max_grad_norm)
            history.append(info)
    return params, history


def sample_action(params: PolicyParams, obs: np.ndarray, rng: Xoshiro256) -> tuple[Action, float, float]:
    """Sample from both heads; returns ``(action, joint log-prob, value)``."""
    fwd = policy_forward(params, obs)
    pg, pp = softmax(fwd.gate_logits[0]), softmax(fwd.perm_logits[0])
    g = rng.categorical(pg.tolist())
    p = rng.categorical(pp.tolist())
    logp = float(np.log(pg[g]) + np.log(pp[p]))
    return Action(g, p), logp, float(fwd.value[0])


@dataclass
class EpisodeRecord:
    """One row of the per-episode training/eval log."""

    run_id: str
    episode: int
    seed: int
    n: int
    lam: int | None
    L: int
    outcome: str
    n_g: int
    total_reward: float
    final_fidelity: float
    circuit: str

    def to_outcome(self) -> EpisodeOutcome:
        return EpisodeOutcome(self.lam, self.L, self.n_g, self.outcome == Outcome.SUCCESS.value, self.final_fidelity)


def train(
    env_config: EnvConfig,
    ppo_config: PPOConfig,
    run_id: str = "",
    on_checkpoint: Callable[[int, PolicyParams], None] | None = None,
) -> tuple[PolicyParams, list[EpisodeRecord]]:
    """Collect rollouts and update until ``total_steps`` environment steps."""
    seed = ppo_config.seed
    init_rng = Xoshiro256(derive_seed(seed, 1))
    env_rng = Xoshiro256(derive_seed(seed, 2))
    act_rng = Xoshiro256(derive_seed(seed, 3))
    shuffle_rng = Xoshiro256(derive_seed(seed, 4))
    n_gates, n_perms = env_config.action_dims
    params = init_params(env_config.observation_size, n_gates, n_perms, init_rng, ppo_config.hidden)
    log: list[EpisodeRecord] = []
    if ppo_config.total_steps == 0:
        return params, log

    env = QuantumCircuitEnv(env_config, env_rng)
    obs = env.reset()
    ep_reward = 0.0
    steps = updates = 0
    while steps < ppo_config.total_steps:
        buf = RolloutBuffer()
        n_collect = min(ppo_config.rollout_length, ppo_config.total_steps - steps)
        for _ in range(n_collect):
            action, logp, value = sample_action(params, obs, act_rng)
            res = env.step(action)
            done = res.done is not Outcome.RUNNING
            buf.add(obs, action, logp, res.reward, value, done)
            ep_reward += res.reward
            steps += 1
            if done:
                log.append(
                    EpisodeRecord(
                        run_id, len(log), seed, env_config.n, env_config.lam, env_config.max_depth,
                        res.done.value, res.info["n_g"], ep_reward, res.info["fidelity"],
                        ";".join(env.circuit_text()),
                    )
                )
                ep_reward = 0.0
                obs = env.reset()
            else:
                obs = res.observation
        last_value = 0.0 if buf.dones[-1] else float(policy_forward(params, obs).value[0])
        buf.advantages, buf.returns = compute_gae(
            buf.rewards, buf.values, buf.dones, last_value, ppo_config.gamma, ppo_config.gae_lambda
        )
        params, history = ppo_update(params, buf, ppo_config, shuffle_rng)
        updates += 1
        if history:
            logger.debug("update %d (step %d): loss %.4f", updates, steps, history[-1].loss)
        if on_checkpoint and ppo_config.checkpoint_every and updates % ppo_config.checkpoint_every == 0:
            on_checkpoint(steps, params)
    return params, log


# Checkpoint JSON: {"version", "config", "env", "weights": {name: {"shape", "data"}}}


def checkpoint_dict(params: PolicyParams, ppo_config: PPOConfig | None = None, env: dict | None = None) -> dict:
    return {
        "version": CHECKPOINT_VERSION,
        "config": asdict(ppo_config) if ppo_config else None,
        "env": env,
        "weights": {k: {"shape": list(v.shape), "data": v.ravel().tolist()} for k, v in params.items()},
    }


def save_checkpoint(path, params: PolicyParams, ppo_config: PPOConfig | None = None, env: dict | None = None) -> None:
    Path(path).write_text(json.dumps(checkpoint_dict(params, ppo_config, env), indent=1))


def load_checkpoint(path) -> tuple[PolicyParams, dict]:
    data = json.loads(Path(path).read_text())
    if data.get("version") != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {data.get('version')!r}")
    arrays = {k: np.array(w["data"], dtype=np.float64).reshape(w["shape"]) for k, w in data["weights"].items()}
    return PolicyParams(arrays), data


def config_from_dict(d: dict) -> PPOConfig:
    names = {f.name for f in fields(PPOConfig)}
    unknown = set(d) - names
    if unknown:
        raise ValueError(f"unknown PPO config keys: {sorted(unknown)}")
    return PPOConfig(**d)

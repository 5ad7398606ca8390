"""Episode dynamics for gate-by-gate state preparation."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .gates import Action, GateSet, clifford_t, combination_count, decode_action, format_circuit
from .quantum import QuantumState, apply_gate, fidelity_pure, ground_state
from .rng import Xoshiro256
from .targets import CHANGE_EPSILON, generate_target

DEFAULT_SFE = 1e-3


class Outcome(str, enum.Enum):
    RUNNING = "running"
    SUCCESS = "success"
    TRUNCATED = "truncated"


class RewardKind(str, enum.Enum):
    STEP_PENALTY = "step"
    DISTANCE = "distance"


@dataclass(frozen=True)
class FixedTarget:
    state: QuantumState
    max_depth: int

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError(f"max depth L must be >= 1, got {self.max_depth}")


@dataclass(frozen=True)
class RandomTarget:
    lam: int

    def __post_init__(self):
        if self.lam < 1:
            raise ValueError(f"circuit depth lambda must be >= 1, got {self.lam}")

    @property
    def max_depth(self) -> int:
        return 2 * self.lam


@dataclass(frozen=True)
class EnvConfig:
    n: int
    target_mode: FixedTarget | RandomTarget
    gateset: GateSet = field(default_factory=clifford_t)
    sfe: float = DEFAULT_SFE
    reward_kind: RewardKind = RewardKind.STEP_PENALTY
    change_epsilon: float = CHANGE_EPSILON

    def __post_init__(self):
        if not 0 < self.sfe < 1:
            raise ValueError(f"sfe must lie in (0, 1), got {self.sfe}")
        object.__setattr__(self, "reward_kind", RewardKind(self.reward_kind))
        combination_count(self.gateset, self.n)
        if isinstance(self.target_mode, FixedTarget) and self.target_mode.state.n != self.n:
            raise ValueError(f"fixed target has {self.target_mode.state.n} qubits, env has {self.n}")

    @property
    def max_depth(self) -> int:
        return self.target_mode.max_depth

    @property
    def lam(self) -> int | None:
        return self.target_mode.lam if isinstance(self.target_mode, RandomTarget) else None

    @property
    def observation_size(self) -> int:
        return 2 ** (self.n + 2)

    @property
    def action_dims(self) -> tuple[int, int]:
        return len(self.gateset), combination_count(self.gateset, self.n)


@dataclass
class EpisodeState:
    current: QuantumState
    target: QuantumState
    actions_taken: list[Action] = field(default_factory=list)
    outcome: Outcome = Outcome.RUNNING

    @property
    def l(self) -> int:
        return len(self.actions_taken)


class StepResult(NamedTuple):
    observation: np.ndarray
    reward: float
    done: Outcome
    info: dict


def encode_observation(current: QuantumState, target: QuantumState) -> np.ndarray:
    """``[Re(v); Im(v); Re(v_target); Im(v_target)]``, length ``2**(n+2)``."""
    if current.n != target.n:
        raise ValueError(f"dimension mismatch: {current.n} vs {target.n} qubits")
    v, t = current.amplitudes, target.amplitudes
    return np.concatenate([v.real, v.imag, t.real, t.imag])


def decode_observation(obs: np.ndarray) -> tuple[QuantumState, QuantumState]:
    obs = np.asarray(obs, dtype=np.float64)
    d = obs.shape[0] // 4
    v = obs[:d] + 1j * obs[d : 2 * d]
    t = obs[2 * d : 3 * d] + 1j * obs[3 * d :]
    return QuantumState.from_amplitudes(v), QuantumState.from_amplitudes(t)


def reward_step_penalty(F: float, l: int, L: int, sfe: float) -> float:
    if 1.0 - F < sfe:
        return float(L - l - 1)
    return -1.0


def reward_distance(F: float, l: int, L: int, sfe: float) -> float:
    # the distance branch fires on the step that exhausts the budget (l == L)
    if 1.0 - F < sfe:
        return float(L - l - 1)
    if l == L:
        return -(L // 2) * (1.0 - F)
    return -1.0


REWARDS = {
    RewardKind.STEP_PENALTY: reward_step_penalty,
    RewardKind.DISTANCE: reward_distance,
}


class EpisodeFinishedError(RuntimeError):
    pass


class QuantumCircuitEnv:
    """Gym-style ``reset``/``step`` environment over one ``EnvConfig``.

    ``rng`` drives target generation in random-target mode; pass a seed or an
    existing :class:`Xoshiro256`.
    """

    def __init__(self, config: EnvConfig, rng: Xoshiro256 | int = 0):
        self.config = config
        self.rng = rng if isinstance(rng, Xoshiro256) else Xoshiro256(rng)
        self.episode: EpisodeState | None = None
        self.last_trace = None
        self._initial = ground_state(config.n)

    @property
    def max_depth(self) -> int:
        return self.config.max_depth

    def reset(self, rng: Xoshiro256 | None = None) -> np.ndarray:
        cfg = self.config
        if isinstance(cfg.target_mode, RandomTarget):
            trace = generate_target(
                cfg.n, cfg.target_mode.lam, cfg.gateset, rng or self.rng, change_epsilon=cfg.change_epsilon
            )
            self.last_trace = trace
            target = trace.target
        else:
            target = cfg.target_mode.state
        # no success check here even if target == initial state
        self.episode = EpisodeState(self._initial, target)
        return encode_observation(self._initial, target)

    def step(self, action: Sequence[int]) -> StepResult:
        ep = self.episode
        if ep is None:
            raise EpisodeFinishedError("call reset() before step()")
        if ep.outcome is not Outcome.RUNNING:
            raise EpisodeFinishedError(f"episode already finished ({ep.outcome.value}); call reset()")
        cfg = self.config
        action = Action(*(int(a) for a in action))
        gate, qubits = decode_action(action, cfg.gateset, cfg.n)
        ep.current = apply_gate(ep.current, gate, qubits)
        ep.actions_taken.append(action)
        l, L = ep.l, cfg.max_depth
        F = fidelity_pure(ep.current, ep.target)
        if 1.0 - F < cfg.sfe:
            ep.outcome = Outcome.SUCCESS
        elif l >= L:
            ep.outcome = Outcome.TRUNCATED
        reward = REWARDS[cfg.reward_kind](F, l, L, cfg.sfe)
        info = {"fidelity": F, "l": l, "n_g": None}
        if ep.outcome is not Outcome.RUNNING:
            info["n_g"] = l if ep.outcome is Outcome.SUCCESS else L
        return StepResult(encode_observation(ep.current, ep.target), reward, ep.outcome, info)

    def circuit_text(self) -> list[str]:
        return format_circuit(self.episode.actions_taken, self.config.gateset, self.config.n)

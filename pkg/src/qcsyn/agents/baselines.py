"""Agents usable by the benchmark harness.

An agent exposes ``begin_episode()`` and ``act(observation, rng) -> Action``.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from ..env import decode_observation
from ..gates import Action, GateSet, combination_count, sample_uniform_action
from ..oracle import min_depth_search
from .policy import PolicyParams, policy_forward, softmax


class RandomAgent:
    """Uniform over both action heads; never learns."""

    def __init__(self, gateset: GateSet, n: int):
        self.gateset, self.n = gateset, n
        combination_count(gateset, n)

    def begin_episode(self) -> None:
        pass

    def act(self, obs, rng) -> Action:
        return sample_uniform_action(self.gateset, self.n, rng)


def random_policy(gateset: GateSet, n: int) -> RandomAgent:
    return RandomAgent(gateset, n)


class PolicyAgent:
    """Samples from a trained two-head policy (or takes the argmax if ``greedy``)."""

    def __init__(self, params: PolicyParams, greedy: bool = False):
        self.params, self.greedy = params, greedy

    def begin_episode(self) -> None:
        pass

    def act(self, obs, rng) -> Action:
        fwd = policy_forward(self.params, obs)
        if self.greedy:
            return Action(int(np.argmax(fwd.gate_logits[0])), int(np.argmax(fwd.perm_logits[0])))
        pg, pp = softmax(fwd.gate_logits[0]), softmax(fwd.perm_logits[0])
        return Action(rng.categorical(pg.tolist()), rng.categorical(pp.tolist()))


class ScriptedAgent:
    """Replays a fixed action list each episode, then repeats its last action."""

    def __init__(self, actions: Sequence[Sequence[int]]):
        self.actions = [Action(*a) for a in actions]
        self._i = 0

    def begin_episode(self) -> None:
        self._i = 0

    def act(self, obs, rng) -> Action:
        a = self.actions[min(self._i, len(self.actions) - 1)]
        self._i += 1
        return a


class OracleAgent:
    """Reads the target from the first observation and replays a shortest circuit.

    The environment never succeeds before the first step, so a target equal to
    the start state is answered with the identity gate.
    """

    def __init__(self, gateset: GateSet, n: int, max_depth: int = 10, sfe: float = 1e-3):
        self.gateset, self.n, self.max_depth, self.sfe = gateset, n, max_depth, sfe
        self._plan: list[Action] | None = None
        self._cache: dict[bytes, list[Action]] = {}

    def begin_episode(self) -> None:
        self._plan = None

    def _solve(self, obs) -> list[Action]:
        key = np.asarray(obs).tobytes()
        if key not in self._cache:
            _, target = decode_observation(obs)
            res = min_depth_search(target, self.gateset, self.n, self.max_depth, self.sfe)
            plan = res.circuit if res.found else []
            self._cache[key] = plan or [Action(self.gateset.index("I") if "I" in self.gateset.names else 0, 0)]
        return list(self._cache[key])

    def act(self, obs, rng) -> Action:
        if self._plan is None:
            self._plan = self._solve(obs)
        if self._plan:
            return self._plan.pop(0)
        return Action(0, 0)

"""Random target states built from gates that each change the state."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gates import Action, GateSet, decode_action, sample_uniform_action
from .quantum import QuantumState, apply_gate, ground_state

CHANGE_EPSILON = 1e-3


class TargetGenerationError(RuntimeError):
    pass


@dataclass
class GenerationTrace:
    target: QuantumState
    accepted_actions: list[Action]
    visited_states: list[QuantumState]
    restarts: int
    samples: int


def generate_target(
    n: int,
    lam: int,
    gateset: GateSet,
    rng,
    change_epsilon: float = CHANGE_EPSILON,
    max_samples: int | None = None,
) -> GenerationTrace:
    """Apply ``lam`` uniformly sampled gates to ``|0...0>``.

    A sampled gate is kept only if the resulting state differs from every state
    visited so far (the start state included) by ``1 - F >= change_epsilon``.
    After ``2 * |G|`` consecutive rejections the whole construction restarts
    from the ground state.
    """
    if lam < 1:
        raise ValueError(f"circuit depth must be >= 1, got {lam}")
    if n < gateset.n_max:
        raise ValueError(f"n={n} is smaller than the widest gate ({gateset.n_max} qubits)")
    if max_samples is None:
        max_samples = 10 * lam * 2 * len(gateset)
    max_failures = 2 * len(gateset)

    start = ground_state(n)
    actions: list[Action] = []
    visited = [start]
    visited_amps = [start.amplitudes]
    failures = restarts = samples = 0
    while len(actions) < lam:
        if samples >= max_samples:
            raise TargetGenerationError(
                f"gave up after {samples} samples (n={n}, lambda={lam}, restarts={restarts}, "
                f"accepted {len(actions)}/{lam})"
            )
        samples += 1
        action = sample_uniform_action(gateset, n, rng)
        gate, qubits = decode_action(action, gateset, n)
        candidate = apply_gate(visited[-1], gate, qubits)
        overlaps = np.abs(np.asarray(visited_amps).conj() @ candidate.amplitudes) ** 2
        if np.all(1.0 - overlaps >= change_epsilon):
            actions.append(action)
            visited.append(candidate)
            visited_amps.append(candidate.amplitudes)
            failures = 0
            continue
        failures += 1
        if failures >= max_failures:
            actions, visited, visited_amps = [], [start], [start.amplitudes]
            failures = 0
            restarts += 1
    return GenerationTrace(visited[-1], actions, visited, restarts, samples)

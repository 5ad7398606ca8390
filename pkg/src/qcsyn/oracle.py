"""Breadth-first search for shortest gate sequences from ``|0...0>``.

States equal up to a global phase are merged through a canonical key: the
first amplitude whose magnitude exceeds ``key_tol`` is rotated onto the
non-negative real axis, then every real and imaginary part is rounded to a
grid of width ``grid``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .gates import Action, GateSet, all_actions, decode_action
from .quantum import QuantumState, apply_gate, apply_gate_batch, fidelity_pure, ground_state

logger = logging.getLogger(__name__)

KEY_GRID = 1e-6


def canonical_keys(psi: np.ndarray, key_tol: float = KEY_GRID, grid: float = KEY_GRID) -> np.ndarray:
    """Integer key rows for a batch of state vectors (shape ``(m, d)`` -> ``(m, 2d)``)."""
    psi = np.atleast_2d(psi)
    mags = np.abs(psi)
    lead = np.argmax(mags > key_tol, axis=1)
    rows = np.arange(psi.shape[0])
    ref = psi[rows, lead]
    phase = np.where(np.abs(ref) > 0, ref / np.where(np.abs(ref) > 0, np.abs(ref), 1), 1)
    rotated = psi * phase.conj()[:, None]
    parts = np.concatenate([rotated.real, rotated.imag], axis=1)
    return np.rint(parts / grid).astype(np.int64)


def canonical_key(state: QuantumState, key_tol: float = KEY_GRID, grid: float = KEY_GRID) -> bytes:
    return canonical_keys(state.amplitudes[None, :], key_tol, grid)[0].tobytes()


@dataclass
class SearchResult:
    found: bool
    min_depth: int | None
    circuit: list[Action] | None
    states_explored: int
    frontier_sizes: list[int] = field(default_factory=list)


def min_depth_search(
    target: QuantumState,
    gateset: GateSet,
    n: int,
    max_depth: int,
    sfe: float = 1e-3,
    dedup: bool = True,
    key_tol: float = KEY_GRID,
    grid: float = KEY_GRID,
) -> SearchResult:
    """Shortest circuit reaching ``target`` (``1 - F < sfe``) within ``max_depth`` gates.

    Layers are expanded parent-major, action-minor (gate index, then permutation
    index), and the first matching state in that order supplies the witness.
    """
    if target.n != n:
        raise ValueError(f"target has {target.n} qubits, search configured for {n}")
    if max_depth < 0:
        raise ValueError(f"max_depth must be >= 0, got {max_depth}")
    actions = all_actions(gateset, n)
    decoded = [decode_action(a, gateset, n) for a in actions]
    tgt = target.amplitudes

    layer = ground_state(n).amplitudes[None, :].copy()
    seen = {canonical_keys(layer, key_tol, grid)[0].tobytes()} if dedup else None
    # per depth: (parent index into previous layer, action index)
    back: list[tuple[np.ndarray, np.ndarray]] = []
    sizes = [1]
    explored = 1

    def witness(depth: int, idx: int) -> list[Action]:
        path = []
        for d in range(depth, 0, -1):
            parents, acts = back[d - 1]
            path.append(actions[acts[idx]])
            idx = parents[idx]
        return path[::-1]

    for depth in range(max_depth + 1):
        fid = np.abs(layer.conj() @ tgt) ** 2
        hits = np.flatnonzero(1.0 - fid < sfe)
        if hits.size:
            return SearchResult(True, depth, witness(depth, int(hits[0])), explored, sizes)
        if depth == max_depth:
            break
        m, A = layer.shape[0], len(actions)
        children = np.empty((m, A, layer.shape[1]), dtype=np.complex128)
        for a, (gate, qubits) in enumerate(decoded):
            children[:, a, :] = apply_gate_batch(layer, gate, qubits, n)
        children = children.reshape(m * A, -1)
        parents = np.repeat(np.arange(m), A)
        acts = np.tile(np.arange(A), m)
        if dedup:
            keys = canonical_keys(children, key_tol, grid)
            keep = []
            for i, row in enumerate(keys):
                k = row.tobytes()
                if k not in seen:
                    seen.add(k)
                    keep.append(i)
            keep = np.asarray(keep, dtype=np.intp)
            children, parents, acts = children[keep], parents[keep], acts[keep]
        back.append((parents, acts))
        layer = children
        sizes.append(layer.shape[0])
        explored += layer.shape[0]
        logger.debug("depth %d: %d states", depth + 1, layer.shape[0])
        if layer.shape[0] == 0:
            break
    return SearchResult(False, None, None, explored, sizes)


def replay(circuit: Sequence[Sequence[int]], gateset: GateSet, n: int) -> QuantumState:
    state = ground_state(n)
    for action in circuit:
        gate, qubits = decode_action(action, gateset, n)
        state = apply_gate(state, gate, qubits)
    return state


def verify_circuit(
    circuit: Sequence[Sequence[int]], target: QuantumState, gateset: GateSet, sfe: float = 1e-3
) -> tuple[bool, float]:
    """Replay ``circuit`` from the ground state; report ``(1 - F < sfe, F)``."""
    F = fidelity_pure(replay(circuit, gateset, target.n), target)
    return 1.0 - F < sfe, F

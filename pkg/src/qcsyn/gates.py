"""The Clifford+T vocabulary and the multi-discrete action encoding.

An action is a pair ``(gate_index, perm_index)``. The second index selects an
ordered tuple of ``n_max`` distinct qubits (lexicographic order); a gate of
smaller arity acts on the leading entries of that tuple.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .quantum import GateMatrix


class Action(NamedTuple):
    gate_index: int
    perm_index: int


@dataclass(frozen=True)
class GateSet:
    gates: tuple[GateMatrix, ...]
    n_max: int = field(init=False)

    def __post_init__(self):
        if not self.gates:
            raise ValueError("gate set must not be empty")
        names = [g.name for g in self.gates]
        if len(set(names)) != len(names):
            raise ValueError(f"gate names must be unique: {names}")
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "n_max", max(g.arity for g in self.gates))

    def __len__(self):
        return len(self.gates)

    @property
    def names(self) -> list[str]:
        return [g.name for g in self.gates]

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown gate {name!r}; known: {self.names}") from None


def clifford_t() -> GateSet:
    """I, H, S, CNOT, T in that order."""
    s2 = 1 / math.sqrt(2)
    return GateSet(
        (
            GateMatrix("I", 1, np.eye(2)),
            GateMatrix("H", 1, s2 * np.array([[1, 1], [1, -1]])),
            GateMatrix("S", 1, np.diag([1, np.exp(1j * np.pi / 2)])),
            GateMatrix(
                "CNOT",
                2,
                np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]),
            ),
            GateMatrix("T", 1, np.diag([1, np.exp(1j * np.pi / 4)])),
        )
    )


def combination_count(gateset: GateSet, n: int) -> int:
    """Size of the qubit-permutation head: ``n! / (n - n_max)!``."""
    if n < gateset.n_max:
        raise ValueError(f"n={n} is smaller than the widest gate ({gateset.n_max} qubits)")
    return math.perm(n, gateset.n_max)


@lru_cache(maxsize=None)
def enumerate_permutations(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    """All ordered ``k``-tuples of distinct qubits of ``range(n)``, lexicographic."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    return tuple(itertools.permutations(range(n), k))


def decode_action(action: Sequence[int], gateset: GateSet, n: int) -> tuple[GateMatrix, tuple[int, ...]]:
    gate_index, perm_index = (int(a) for a in action)
    perms = enumerate_permutations(n, gateset.n_max)
    if not 0 <= gate_index < len(gateset):
        raise IndexError(f"gate index {gate_index} out of range [0, {len(gateset)})")
    if not 0 <= perm_index < len(perms):
        raise IndexError(f"permutation index {perm_index} out of range [0, {len(perms)})")
    gate = gateset.gates[gate_index]
    return gate, perms[perm_index][: gate.arity]


def sample_uniform_action(gateset: GateSet, n: int, rng) -> Action:
    """Gate and permutation drawn independently and uniformly (gate first)."""
    g = rng.integers(len(gateset))
    p = rng.integers(combination_count(gateset, n))
    return Action(g, p)


def all_actions(gateset: GateSet, n: int) -> list[Action]:
    """Every action, gate index major and permutation index minor."""
    c = combination_count(gateset, n)
    return [Action(g, p) for g in range(len(gateset)) for p in range(c)]


# Circuit text format: one gate per line, ``NAME q<i>[ q<j>]``.


def format_gate(action: Sequence[int], gateset: GateSet, n: int) -> str:
    gate, qubits = decode_action(action, gateset, n)
    return " ".join([gate.name] + [f"q{q}" for q in qubits])


def format_circuit(actions: Iterable[Sequence[int]], gateset: GateSet, n: int) -> list[str]:
    return [format_gate(a, gateset, n) for a in actions]


def parse_gate(line: str, gateset: GateSet, n: int) -> Action:
    """Inverse of :func:`format_gate`; returns the lowest permutation index that matches."""
    parts = line.split()
    if not parts:
        raise ValueError("empty gate line")
    g = gateset.index(parts[0])
    arity = gateset.gates[g].arity
    if len(parts) - 1 != arity:
        raise ValueError(f"{parts[0]} takes {arity} qubit(s), got line {line!r}")
    qubits = []
    for tok in parts[1:]:
        if not (tok.startswith("q") and tok[1:].isdigit()):
            raise ValueError(f"bad qubit token {tok!r} in {line!r}")
        qubits.append(int(tok[1:]))
    qubits = tuple(qubits)
    for p, perm in enumerate(enumerate_permutations(n, gateset.n_max)):
        if perm[:arity] == qubits:
            return Action(g, p)
    raise ValueError(f"qubits {qubits} are not valid for n={n}")


def parse_circuit(text: str | Iterable[str], gateset: GateSet, n: int) -> list[Action]:
    """Accepts newline- or semicolon-separated text, or an iterable of lines."""
    if isinstance(text, str):
        lines = text.replace(";", "\n").splitlines()
    else:
        lines = list(text)
    return [parse_gate(line, gateset, n) for line in lines if line.strip()]

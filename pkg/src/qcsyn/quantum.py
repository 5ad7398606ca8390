"""Dense state-vector simulation for pure n-qubit states.

Basis index ``i`` encodes qubit 0 as the most significant bit, so
``|q0 q1 ... q_{n-1}>`` reads left to right as the binary expansion of ``i``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

MAX_QUBITS = 20
NORM_TOL = 1e-10


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Normalized amplitude vector over ``2**n`` basis states (immutable)."""

    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"qubit count must be positive, got {self.n}")
        amps = _frozen(self.amplitudes)
        if amps.shape != (2**self.n,):
            raise ValueError(f"expected {2**self.n} amplitudes for n={self.n}, got shape {amps.shape}")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (squared norm {norm!r})")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, values: Sequence[complex], normalize: bool = False) -> "QuantumState":
        amps = np.asarray(values, dtype=np.complex128)
        n = int(round(np.log2(len(amps)))) if len(amps) else 0
        if len(amps) != 2**n:
            raise ValueError(f"amplitude count {len(amps)} is not a power of two")
        if normalize:
            amps = amps / np.linalg.norm(amps)
        return cls(n, amps)

    def to_json(self) -> list[list[float]]:
        """``[[re, im], ...]`` in basis-index order."""
        return [[float(a.real), float(a.imag)] for a in self.amplitudes]

    @classmethod
    def from_json(cls, pairs: Sequence[Sequence[float]], normalize: bool = False) -> "QuantumState":
        return cls.from_amplitudes([complex(re, im) for re, im in pairs], normalize=normalize)

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    def allclose(self, other: "QuantumState", atol: float = NORM_TOL) -> bool:
        return self.n == other.n and bool(np.allclose(self.amplitudes, other.amplitudes, rtol=0, atol=atol))

    def __repr__(self):
        return f"QuantumState(n={self.n}, amplitudes={np.array2string(self.amplitudes, precision=4)})"


@dataclass(frozen=True, eq=False)
class GateMatrix:
    name: str
    arity: int
    entries: np.ndarray

    def __post_init__(self):
        m = _frozen(self.entries)
        dim = 2**self.arity
        if m.shape != (dim, dim):
            raise ValueError(f"gate {self.name}: expected {dim}x{dim} matrix, got {m.shape}")
        if not np.allclose(m.conj().T @ m, np.eye(dim), rtol=0, atol=NORM_TOL):
            raise ValueError(f"gate {self.name} is not unitary")
        object.__setattr__(self, "entries", m)
        # (out_0..out_k-1, in_0..in_k-1) tensor form used by apply_gate
        t = m.reshape((2,) * (2 * self.arity))
        t.setflags(write=False)
        object.__setattr__(self, "_tensor", t)

    @property
    def tensor(self) -> np.ndarray:
        return self._tensor


def ground_state(n: int, max_qubits: int = MAX_QUBITS) -> QuantumState:
    """``|0...0>`` on ``n`` qubits."""
    if n < 1:
        raise ValueError(f"qubit count must be positive, got {n}")
    if n > max_qubits:
        raise ValueError(f"n={n} exceeds the memory cap of {max_qubits} qubits")
    amps = np.zeros(2**n, dtype=np.complex128)
    amps[0] = 1.0
    return QuantumState(n, amps)


def _check_qubits(n: int, arity: int, qubits: Sequence[int]) -> tuple[int, ...]:
    qubits = tuple(int(q) for q in qubits)
    if len(qubits) != arity:
        raise ValueError(f"gate of arity {arity} given {len(qubits)} qubits")
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"duplicate qubit indices {qubits}")
    for q in qubits:
        if not 0 <= q < n:
            raise ValueError(f"qubit index {q} out of range for n={n}")
    return qubits


def apply_gate_batch(psi: np.ndarray, gate: GateMatrix, qubits: Sequence[int], n: int) -> np.ndarray:
    """Apply ``gate`` to every row of ``psi`` (shape ``(m, 2**n)``).

    Works on the ``(m, 2, ..., 2)`` tensor view, so the cost is
    ``O(m * 2**n * 2**arity)`` and no ``2**n x 2**n`` operator is formed.
    """
    qubits = _check_qubits(n, gate.arity, qubits)
    m = psi.shape[0]
    t = psi.reshape((m,) + (2,) * n)
    k = gate.arity
    axes = [q + 1 for q in qubits]
    # contract gate inputs with the listed axes; outputs land at the end
    out = np.tensordot(t, gate.tensor, axes=(axes, list(range(k, 2 * k))))
    out = np.moveaxis(out, list(range(n + 1 - k, n + 1)), axes)
    return np.ascontiguousarray(out).reshape(m, 2**n)


def apply_gate(state: QuantumState, gate: GateMatrix, qubits: Sequence[int]) -> QuantumState:
    """Return ``U|state>`` with ``gate`` on ``qubits`` (first entry = first wire)."""
    out = apply_gate_batch(state.amplitudes[None, :], gate, qubits, state.n)[0]
    return QuantumState(state.n, out)


def fidelity_pure(a: QuantumState, b: QuantumState) -> float:
    """``|<a|b>|**2``, clipped to [0, 1]."""
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n} qubits")
    f = abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2
    return float(min(max(f, 0.0), 1.0))

"""Gate-by-gate quantum state preparation as a reinforcement-learning task."""

from .env import EnvConfig, FixedTarget, Outcome, QuantumCircuitEnv, RandomTarget, RewardKind, encode_observation
from .gates import Action, GateSet, clifford_t, combination_count, decode_action, enumerate_permutations
from .quantum import GateMatrix, QuantumState, apply_gate, fidelity_pure, ground_state

__version__ = "0.1.0"

"""Benchmarks on 2-qubit Clifford+T targets.

Two suites: random targets grouped into difficulty levels by generator depth,
and a fixed set of nine well-known states with their known minimal depths.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .env import EnvConfig, FixedTarget, Outcome, QuantumCircuitEnv
from .gates import GateSet, clifford_t, format_circuit
from .metrics import reconstructed_depth
from .quantum import QuantumState
from .rng import Xoshiro256, derive_seed
from .targets import generate_target

BENCH_N = 2
BENCH_MAX_LEN = 30


@dataclass(frozen=True)
class EvaluationLevel:
    name: str
    lambdas: tuple[int, ...]


LEVELS = {
    "easy": EvaluationLevel("easy", (1, 2, 3, 4, 5)),
    "medium": EvaluationLevel("medium", (6, 7, 8, 9, 10)),
    "hard": EvaluationLevel("hard", (11, 12, 13, 14, 15)),
}


@dataclass(frozen=True)
class NamedState:
    name: str
    label: str
    state: QuantumState
    level: str
    minimal_depth: int
    # most frequent circuit reported for trained agents, where one exists
    reference_circuit: tuple[str, ...] | None = None


def well_known_states() -> list[NamedState]:
    r = 1 / math.sqrt(2)

    def st(*amps):
        return QuantumState.from_amplitudes(amps)

    return [
        NamedState("zero", "|00>", st(1, 0, 0, 0), "easy", 0),
        NamedState("plus-plus", "(|00>+|01>+|10>+|11>)/2", st(0.5, 0.5, 0.5, 0.5), "easy", 2, ("H q0", "H q1")),
        NamedState("bell-phi-plus", "(|00>+|11>)/sqrt2", st(r, 0, 0, r), "easy", 2, ("H q0", "CNOT q0 q1")),
        NamedState("basis-01", "|01>", st(0, 1, 0, 0), "medium", 4, ("H q1", "S q1", "S q1", "H q1")),
        NamedState("basis-10", "|10>", st(0, 0, 1, 0), "medium", 4, ("H q0", "S q0", "S q0", "H q0")),
        NamedState(
            "bell-phi-minus", "(|00>-|11>)/sqrt2", st(r, 0, 0, -r), "medium", 4,
            ("H q0", "S q0", "CNOT q0 q1", "S q1"),
        ),
        NamedState(
            "basis-11", "|11>", st(0, 0, 0, 1), "hard", 5,
            ("H q0", "S q0", "S q0", "H q0", "CNOT q0 q1"),
        ),
        NamedState(
            "bell-psi-plus", "(|01>+|10>)/sqrt2", st(0, r, r, 0), "hard", 5,
            ("H q0", "CNOT q0 q1", "H q1", "CNOT q1 q0", "H q1"),
        ),
        NamedState("bell-psi-minus", "(|01>-|10>)/sqrt2", st(0, r, -r, 0), "hard", 7),
    ]


def named_state(name: str) -> NamedState:
    for s in well_known_states():
        if s.name == name:
            return s
    raise KeyError(f"unknown state {name!r}; known: {[s.name for s in well_known_states()]}")


@dataclass
class BenchRow:
    agent: str
    suite: str
    target: str
    lam: int | None
    episode: int
    seed: int
    L: int
    outcome: str
    n_g: int
    final_fidelity: float
    circuit: str


def _stats(values: Sequence[float]) -> tuple[float, float]:
    if not len(values):
        return float("nan"), float("nan")
    a = np.asarray(values, dtype=np.float64)
    return float(a.mean()), float(a.std())


@dataclass
class BenchReport:
    """Raw episode rows plus aggregates recomputed from them on demand."""

    rows: list[BenchRow] = field(default_factory=list)
    modal: dict[str, dict] = field(default_factory=dict)

    def _summary(self, rows: list[BenchRow]) -> dict:
        n_g = [r.n_g for r in rows]
        lam = [reconstructed_depth(r.n_g, r.lam) for r in rows if r.lam]
        mean, std = _stats(n_g)
        lmean, lstd = _stats(lam)
        return {
            "episodes": len(rows),
            "n_g_mean": mean,
            "n_g_std": std,
            "success_rate": sum(r.outcome == Outcome.SUCCESS.value for r in rows) / len(rows),
            "lambda_mean": lmean if lam else None,
            "lambda_std": lstd if lam else None,
        }

    def group(self, key: str) -> dict[str, dict]:
        groups: dict[str, list[BenchRow]] = {}
        for r in self.rows:
            groups.setdefault(getattr(r, key), []).append(r)
        return {k: self._summary(v) for k, v in groups.items()}

    def overall(self) -> dict:
        return self._summary(self.rows) if self.rows else {"episodes": 0}

    def to_dict(self) -> dict:
        return {
            "overall": self.overall(),
            "per_target": self.group("target"),
            "per_agent": self.group("agent"),
            "modal_circuits": self.modal,
        }

    def extend(self, other: "BenchReport") -> None:
        self.rows.extend(other.rows)
        self.modal.update(other.modal)


def run_episode(env: QuantumCircuitEnv, agent, rng: Xoshiro256) -> tuple[Outcome, int, float, list[str]]:
    obs = env.reset(rng)
    agent.begin_episode()
    while True:
        res = env.step(agent.act(obs, rng))
        if res.done is not Outcome.RUNNING:
            return res.done, res.info["n_g"], res.info["fidelity"], env.circuit_text()
        obs = res.observation


def _fixed_env(state: QuantumState, L: int, sfe: float, gateset: GateSet) -> QuantumCircuitEnv:
    return QuantumCircuitEnv(EnvConfig(state.n, FixedTarget(state, L), gateset, sfe))


def eval_random_targets(
    agent,
    level: EvaluationLevel,
    n_targets: int = 100,
    L: int = BENCH_MAX_LEN,
    sfe: float = 1e-3,
    seed: int = 0,
    agent_name: str = "agent",
    gateset: GateSet | None = None,
    n: int = BENCH_N,
) -> BenchReport:
    """One episode per random target; ``lam`` drawn uniformly from the level.

    Each target gets its own stream ``derive_seed(seed, i)`` so results do
    not depend on evaluation order.
    """
    gateset = gateset or clifford_t()
    report = BenchReport()
    for i in range(n_targets):
        rng = Xoshiro256(derive_seed(seed, i))
        lam = level.lambdas[rng.integers(len(level.lambdas))]
        target = generate_target(n, lam, gateset, rng).target
        env = _fixed_env(target, L, sfe, gateset)
        outcome, n_g, F, circuit = run_episode(env, agent, rng)
        report.rows.append(
            BenchRow(agent_name, level.name, f"{level.name}-{i}", lam, 0, seed, L, outcome.value, n_g, F, ";".join(circuit))
        )
    return report


def eval_named_states(
    agent,
    states: Iterable[NamedState],
    episodes_per_state: int,
    L: int = BENCH_MAX_LEN,
    sfe: float = 1e-3,
    seed: int = 0,
    agent_name: str = "agent",
    gateset: GateSet | None = None,
) -> BenchReport:
    gateset = gateset or clifford_t()
    report = BenchReport()
    for si, ns in enumerate(states):
        env = _fixed_env(ns.state, L, sfe, gateset)
        for e in range(episodes_per_state):
            rng = Xoshiro256(derive_seed(seed, si, e))
            outcome, n_g, F, circuit = run_episode(env, agent, rng)
            report.rows.append(
                BenchRow(
                    agent_name, "states", ns.name, ns.minimal_depth or None, e, seed, L,
                    outcome.value, n_g, F, ";".join(circuit),
                )
            )
    return report


def modal_circuit(
    agent,
    target: NamedState,
    episodes: int = 100,
    L: int = BENCH_MAX_LEN,
    sfe: float = 1e-3,
    seed: int = 0,
    gateset: GateSet | None = None,
) -> tuple[list[str], float]:
    """Most frequent successful circuit and its share of all episodes (percent).

    Ties go to the lexicographically smallest circuit text.
    """
    gateset = gateset or clifford_t()
    env = _fixed_env(target.state, L, sfe, gateset)
    counts: Counter[tuple[str, ...]] = Counter()
    for e in range(episodes):
        rng = Xoshiro256(derive_seed(seed, e))
        outcome, _, _, circuit = run_episode(env, agent, rng)
        if outcome is Outcome.SUCCESS:
            counts[tuple(circuit)] += 1
    if not counts:
        return [], 0.0
    best = min(counts.items(), key=lambda kv: (-kv[1], "\n".join(kv[0])))
    return list(best[0]), 100.0 * best[1] / episodes


def state_benchmark(
    agent,
    states: Sequence[NamedState],
    episodes_per_state: int,
    L: int = BENCH_MAX_LEN,
    sfe: float = 1e-3,
    seed: int = 0,
    agent_name: str = "agent",
    gateset: GateSet | None = None,
) -> BenchReport:
    """Named-state evaluation plus a modal circuit per state."""
    report = eval_named_states(agent, states, episodes_per_state, L, sfe, seed, agent_name, gateset)
    for ns in states:
        circuit, prob = modal_circuit(agent, ns, episodes_per_state, L, sfe, seed, gateset)
        report.modal[f"{agent_name}/{ns.name}"] = {"circuit": circuit, "generation_probability": prob}
    return report


# Plot-data rows; one list of dicts per figure layout.


def level_plot_rows(report: BenchReport) -> list[dict]:
    """Mean gate count per agent, evaluation level and target depth."""
    out = []
    groups: dict[tuple[str, str, int], list[BenchRow]] = {}
    for r in report.rows:
        groups.setdefault((r.agent, r.suite, r.lam), []).append(r)
    for (agent, level, lam), rows in sorted(groups.items()):
        mean, std = _stats([r.n_g for r in rows])
        out.append({"agent": agent, "level": level, "lambda": lam, "n_g_mean": mean, "n_g_std": std, "targets": len(rows)})
    return out


def state_plot_rows(report: BenchReport) -> list[dict]:
    """Mean gate count per agent and named state."""
    out = []
    groups: dict[tuple[str, str], list[BenchRow]] = {}
    for r in report.rows:
        groups.setdefault((r.agent, r.target), []).append(r)
    for (agent, target), rows in groups.items():
        mean, std = _stats([r.n_g for r in rows])
        out.append({"agent": agent, "state": target, "n_g_mean": mean, "n_g_std": std, "episodes": len(rows)})
    return out


def sweep_rows(results: Iterable[dict], key: str) -> list[dict]:
    """Cross-seed mean/std of final trailing reconstructed depth.

    ``results`` items carry ``key`` (e.g. ``reward`` or ``n``), ``lambda``,
    ``seed`` and ``trailing_lambda_mean``.
    """
    groups: dict[tuple, list[float]] = {}
    for r in results:
        groups.setdefault((r[key], r["lambda"]), []).append(r["trailing_lambda_mean"])
    out = []
    for (k, lam), vals in sorted(groups.items(), key=lambda kv: (str(kv[0][0]), kv[0][1])):
        mean, std = _stats(vals)
        out.append({key: k, "lambda": lam, "lambda_mean": mean, "lambda_std": std, "runs": len(vals)})
    return out


def rows_as_dicts(rows: Iterable) -> list[dict]:
    return [asdict(r) for r in rows]

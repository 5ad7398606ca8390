import cmath
from collections import Counter

import numpy as np
import pytest

from qcsyn.gates import (
    Action,
    GateSet,
    all_actions,
    combination_count,
    decode_action,
    enumerate_permutations,
    format_circuit,
    parse_circuit,
    sample_uniform_action,
)
from qcsyn.quantum import GateMatrix
from qcsyn.rng import Xoshiro256


def test_clifford_t_contents(gs):
    assert gs.names == ["I", "H", "S", "CNOT", "T"]
    assert len(gs) == 5
    assert gs.n_max == 2
    t = gs.gates[gs.index("T")].entries
    assert t[1, 1] == pytest.approx(cmath.exp(1j * cmath.pi / 4))
    s = gs.gates[gs.index("S")].entries
    assert s[1, 1] == pytest.approx(1j)


def test_gateset_validation():
    g = GateMatrix("X", 1, [[0, 1], [1, 0]])
    with pytest.raises(ValueError):
        GateSet(())
    with pytest.raises(ValueError):
        GateSet((g, g))


@pytest.mark.parametrize("n, expected", [(2, 2), (3, 6), (4, 12), (10, 90)])
def test_combination_count(gs, n, expected):
    assert combination_count(gs, n) == expected
    assert len(enumerate_permutations(n, gs.n_max)) == expected


def test_combination_count_single_qubit_set():
    single = GateSet((GateMatrix("X", 1, [[0, 1], [1, 0]]),))
    assert single.n_max == 1
    assert combination_count(single, 4) == 4


def test_combination_count_rejects_small_n(gs):
    with pytest.raises(ValueError):
        combination_count(gs, 1)


def test_enumerate_permutations():
    assert enumerate_permutations(2, 2) == ((0, 1), (1, 0))
    assert enumerate_permutations(3, 2) == ((0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1))
    assert enumerate_permutations(1, 1) == ((0,),)
    with pytest.raises(ValueError):
        enumerate_permutations(2, 3)


@pytest.mark.parametrize(
    "action, name, qubits",
    [((1, 0), "H", (0,)), ((3, 1), "CNOT", (1, 0)), ((0, 1), "I", (1,))],
)
def test_decode_action_examples(gs, action, name, qubits):
    gate, q = decode_action(action, gs, 2)
    assert gate.name == name and q == qubits


def test_decode_action_bounds(gs):
    with pytest.raises(IndexError):
        decode_action((5, 0), gs, 2)
    with pytest.raises(IndexError):
        decode_action((0, 2), gs, 2)


def test_single_qubit_aliasing(gs):
    # n=2: the two permutations start with different qubits
    assert decode_action((1, 0), gs, 2)[1] != decode_action((1, 1), gs, 2)[1]
    # n=3: (0,1) and (0,2) share their first qubit
    assert decode_action((1, 0), gs, 3)[1] == decode_action((1, 1), gs, 3)[1] == (0,)
    assert decode_action((3, 0), gs, 3)[1] != decode_action((3, 1), gs, 3)[1]


@pytest.mark.parametrize("n", [2, 3, 4])
def test_decoded_qubits_are_valid(gs, n):
    for a in all_actions(gs, n):
        gate, q = decode_action(a, gs, n)
        assert len(q) == gate.arity == len(set(q))
        assert all(0 <= x < n for x in q)


def test_uniform_sampling_frequencies(gs):
    rng = Xoshiro256(2024)
    samples = [sample_uniform_action(gs, 2, rng) for _ in range(100_000)]
    gates = Counter(a.gate_index for a in samples)
    perms = Counter(a.perm_index for a in samples)
    assert all(abs(gates[g] / 1e5 - 0.2) < 0.01 for g in range(5))
    assert all(abs(perms[p] / 1e5 - 0.5) < 0.01 for p in range(2))


def test_sampling_is_seeded(gs):
    a = [sample_uniform_action(gs, 3, Xoshiro256(5)) for _ in range(1)]
    r1, r2 = Xoshiro256(9), Xoshiro256(9)
    assert [sample_uniform_action(gs, 3, r1) for _ in range(50)] == [sample_uniform_action(gs, 3, r2) for _ in range(50)]
    assert isinstance(a[0], Action)


def test_circuit_text_round_trip(gs):
    text = ["H q0", "CNOT q0 q1", "S q1", "T q0", "CNOT q1 q0", "I q1"]
    actions = parse_circuit(text, gs, 2)
    assert format_circuit(actions, gs, 2) == text
    assert parse_circuit(";".join(text), gs, 2) == actions
    assert actions[1] == Action(3, 0) and actions[4] == Action(3, 1)


@pytest.mark.parametrize("bad", ["X q0", "H", "CNOT q0", "H q5", "H 0", "CNOT q1 q1"])
def test_circuit_parse_errors(gs, bad):
    with pytest.raises((ValueError, KeyError)):
        parse_circuit([bad], gs, 2)

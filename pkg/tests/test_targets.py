import numpy as np
import pytest

from qcsyn.gates import clifford_t, decode_action
from qcsyn.quantum import apply_gate, fidelity_pure, ground_state
from qcsyn.rng import Xoshiro256
from qcsyn.targets import TargetGenerationError, generate_target

from conftest import R2


def test_lambda_one_single_qubit_set_always_h():
    from qcsyn.gates import GateSet

    gs = GateSet(tuple(g for g in clifford_t().gates if g.arity == 1))
    for seed in range(50):
        tr = generate_target(1, 1, gs, Xoshiro256(seed))
        assert gs.gates[tr.accepted_actions[0].gate_index].name == "H"
        np.testing.assert_allclose(tr.target.amplitudes, [R2, R2], atol=1e-15)


def test_exhaustive_first_gate_check(gs):
    # only H changes |0> (or |00>) by at least the threshold
    start = ground_state(2)
    for g in gs.gates:
        qubits = (0, 1)[: g.arity]
        changed = 1 - fidelity_pure(apply_gate(start, g, qubits), start) >= 1e-3
        assert changed == (g.name == "H")


def test_trace_shape_and_replay(gs):
    tr = generate_target(2, 3, gs, Xoshiro256(8))
    assert len(tr.accepted_actions) == 3 and len(tr.visited_states) == 4
    state = ground_state(2)
    for a in tr.accepted_actions:
        g, q = decode_action(a, gs, 2)
        state = apply_gate(state, g, q)
    assert state.allclose(tr.target)


def test_seeded_determinism(gs):
    a = generate_target(3, 7, gs, Xoshiro256(123))
    b = generate_target(3, 7, gs, Xoshiro256(123))
    assert a.accepted_actions == b.accepted_actions and a.restarts == b.restarts
    np.testing.assert_array_equal(a.target.amplitudes, b.target.amplitudes)


def test_pairwise_change_condition(gs):
    for seed in range(40):
        tr = generate_target(2, 6, gs, Xoshiro256(seed))
        v = tr.visited_states
        for j in range(len(v)):
            for i in range(j):
                assert 1 - fidelity_pure(v[j], v[i]) >= 1e-3


def test_restart_counter_and_cap(gs):
    # with an impossible threshold every sample is rejected
    with pytest.raises(TargetGenerationError, match="restarts=5"):
        generate_target(2, 1, gs, Xoshiro256(0), change_epsilon=2.0, max_samples=50)
    restarts = [generate_target(2, 2, gs, Xoshiro256(s)).restarts for s in range(200)]
    assert max(restarts) > 0


def test_bad_arguments(gs):
    with pytest.raises(ValueError):
        generate_target(2, 0, gs, Xoshiro256(0))
    with pytest.raises(ValueError):
        generate_target(1, 2, gs, Xoshiro256(0))

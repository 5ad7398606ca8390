import itertools

import numpy as np
import pytest

from qcsyn.env import (
    EnvConfig,
    EpisodeFinishedError,
    FixedTarget,
    Outcome,
    QuantumCircuitEnv,
    RandomTarget,
    decode_observation,
    encode_observation,
    reward_distance,
    reward_step_penalty,
)
from qcsyn.gates import GateSet, clifford_t, decode_action, parse_circuit
from qcsyn.quantum import QuantumState, apply_gate, fidelity_pure, ground_state
from qcsyn.rng import Xoshiro256

from conftest import R2, basis


def single_qubit_set():
    gs = clifford_t()
    return GateSet(tuple(g for g in gs.gates if g.arity == 1))


def test_encode_observation_examples(gs):
    obs = encode_observation(ground_state(1), basis(1, 1))
    np.testing.assert_array_equal(obs, [1, 0, 0, 0, 0, 1, 0, 0])
    plus = apply_gate(ground_state(1), gs.gates[1], [0])
    np.testing.assert_allclose(encode_observation(plus, ground_state(1)), [R2, R2, 0, 0, 1, 0, 0, 0], atol=1e-15)
    assert encode_observation(ground_state(2), ground_state(2)).shape == (16,)
    with pytest.raises(ValueError):
        encode_observation(ground_state(1), ground_state(2))


def test_observation_round_trip():
    s = QuantumState.from_amplitudes([0.5, 0.5j, -0.5, 0.5], normalize=True)
    cur, tgt = decode_observation(encode_observation(ground_state(2), s))
    assert cur.allclose(ground_state(2)) and tgt.allclose(s)


@pytest.mark.parametrize("n", [1, 2, 3, 5, 10])
def test_observation_length(n):
    gs = clifford_t() if n >= 2 else single_qubit_set()
    env = QuantumCircuitEnv(EnvConfig(n, RandomTarget(2), gs), 1)
    obs = env.reset()
    assert obs.shape == (2 ** (n + 2),)
    d = 2**n
    for block in (obs[:d] + 1j * obs[d : 2 * d], obs[2 * d : 3 * d] + 1j * obs[3 * d :]):
        assert abs(np.linalg.norm(block) - 1) < 1e-10


def test_config_validation(gs):
    with pytest.raises(ValueError):
        RandomTarget(0)
    with pytest.raises(ValueError):
        FixedTarget(ground_state(2), 0)
    with pytest.raises(ValueError):
        EnvConfig(2, RandomTarget(3), sfe=0)
    with pytest.raises(ValueError):
        EnvConfig(3, FixedTarget(ground_state(2), 4))
    with pytest.raises(ValueError):
        EnvConfig(1, RandomTarget(3))  # CNOT needs two qubits
    assert EnvConfig(2, RandomTarget(5)).max_depth == 10


def test_reset_fixed_target():
    env = QuantumCircuitEnv(EnvConfig(2, FixedTarget(basis(2, 3), 10)))
    obs = env.reset()
    np.testing.assert_array_equal(obs[:4], [1, 0, 0, 0])
    np.testing.assert_array_equal(obs[8:12], [0, 0, 0, 1])
    assert env.episode.l == 0 and env.episode.outcome is Outcome.RUNNING


def test_reset_random_target_is_seeded():
    cfg = EnvConfig(2, RandomTarget(5))
    a, b = QuantumCircuitEnv(cfg, 17), QuantumCircuitEnv(cfg, 17)
    for _ in range(3):
        np.testing.assert_array_equal(a.reset(), b.reset())
    assert a.max_depth == 10
    obs1 = a.reset(Xoshiro256(5))
    obs2 = b.reset(Xoshiro256(5))
    np.testing.assert_array_equal(obs1, obs2)


def test_reset_does_not_check_success():
    env = QuantumCircuitEnv(EnvConfig(2, FixedTarget(ground_state(2), 3)))
    env.reset()
    res = env.step((1, 0))  # H moves away from the target
    assert res.done is Outcome.RUNNING and res.reward == -1


def test_bell_state_episode(gs):
    phi = QuantumState(2, [R2, 0, 0, R2])
    env = QuantumCircuitEnv(EnvConfig(2, FixedTarget(phi, 4)))
    env.reset()
    h, cx = parse_circuit(["H q0", "CNOT q0 q1"], gs, 2)
    r1 = env.step(h)
    assert r1.done is Outcome.RUNNING and r1.reward == -1 and r1.info["n_g"] is None
    r2 = env.step(cx)
    assert r2.done is Outcome.SUCCESS
    assert r2.info["fidelity"] >= 0.999
    assert r2.reward == 4 - 2 - 1
    assert r2.info["n_g"] == 2
    with pytest.raises(EpisodeFinishedError):
        env.step(h)


def test_truncation_after_L_steps():
    env = QuantumCircuitEnv(EnvConfig(2, FixedTarget(basis(2, 3), 10)))
    env.reset()
    for i in range(10):
        res = env.step((0, 0))  # identity never reaches |11>
        assert res.reward == -1
        assert res.done is (Outcome.TRUNCATED if i == 9 else Outcome.RUNNING)
    assert res.info["n_g"] == 10


def test_step_before_reset_is_error():
    env = QuantumCircuitEnv(EnvConfig(2, RandomTarget(1)))
    with pytest.raises(EpisodeFinishedError):
        env.step((0, 0))


def test_reward_examples():
    assert reward_step_penalty(1.0, 3, 10, 1e-3) == 6
    assert reward_step_penalty(0.4, 3, 10, 1e-3) == -1
    assert reward_step_penalty(1.0, 10, 10, 1e-3) == -1
    assert reward_distance(1.0, 3, 10, 1e-3) == 6
    assert reward_distance(0.5, 10, 10, 1e-3) == -2.5
    assert reward_distance(0.5, 4, 10, 1e-3) == -1


def test_reward_tables_on_grid():
    sfe = 1e-3
    for F, L in itertools.product([0.0, 0.3, 0.5, 0.998, 0.999, 0.9995, 1.0], [1, 2, 5, 10, 11, 30]):
        for l in range(1, L + 1):
            success = 1 - F < sfe
            assert reward_step_penalty(F, l, L, sfe) == (L - l - 1 if success else -1)
            if success:
                expected = L - l - 1
            elif l == L:
                expected = -(L // 2) * (1 - F)
            else:
                expected = -1
            assert reward_distance(F, l, L, sfe) == expected


def test_success_threshold_is_strict():
    # 1 - 0.999 rounds to slightly above 1e-3 in binary floating point
    assert reward_step_penalty(0.999, 1, 4, 1e-3) == -1
    # exactly at the threshold: not a success
    assert reward_step_penalty(1 - 0.25, 1, 4, 0.25) == -1
    assert reward_step_penalty(1 - 0.125, 1, 4, 0.25) == 2


def _run(env, actions):
    env.reset()
    total = 0.0
    for a in actions:
        res = env.step(a)
        total += res.reward
        if res.done is not Outcome.RUNNING:
            return res, total
    return res, total


@pytest.mark.parametrize("L", [2, 4, 7, 10])
def test_episode_reward_identities(gs, L):
    # basis-10 via X = H S S H on q0; prefix with k-4 identities
    x_q0 = parse_circuit(["H q0", "S q0", "S q0", "H q0"], gs, 2)
    target = basis(2, 2)
    for k in range(4, L + 1):
        env = QuantumCircuitEnv(EnvConfig(2, FixedTarget(target, L)))
        res, total = _run(env, [(0, 0)] * (k - 4) + x_q0)
        assert res.done is Outcome.SUCCESS and res.info["l"] == k
        assert total == L - 2 * k
    env = QuantumCircuitEnv(EnvConfig(2, FixedTarget(target, L)))
    res, total = _run(env, [(0, 0)] * L)
    assert res.done is Outcome.TRUNCATED and total == -L


@pytest.mark.parametrize("lam", [1, 2, 5, 8])
def test_truncation_at_twice_lambda(lam):
    env = QuantumCircuitEnv(EnvConfig(2, RandomTarget(lam)), 3)
    for _ in range(5):
        env.reset()
        steps = 0
        while True:
            res = env.step((0, 0))  # generated targets always differ from |00>
            steps += 1
            if res.done is not Outcome.RUNNING:
                break
        assert res.done is Outcome.TRUNCATED and steps == 2 * lam


def test_replay_invariant(gs):
    env = QuantumCircuitEnv(EnvConfig(3, RandomTarget(6)), 11)
    rng = Xoshiro256(4)
    from qcsyn.gates import sample_uniform_action

    for _ in range(20):
        env.reset()
        while True:
            res = env.step(sample_uniform_action(gs, 3, rng))
            state = ground_state(3)
            for a in env.episode.actions_taken:
                g, q = decode_action(a, gs, 3)
                state = apply_gate(state, g, q)
            assert state.allclose(env.episode.current)
            assert env.episode.l == len(env.episode.actions_taken) <= env.max_depth
            if res.done is Outcome.SUCCESS:
                assert res.info["fidelity"] > 0.999
                assert 1 - fidelity_pure(env.episode.current, env.episode.target) < 1e-3
            if res.done is not Outcome.RUNNING:
                break


def test_distance_reward_env():
    env = QuantumCircuitEnv(EnvConfig(2, FixedTarget(QuantumState(2, [R2, R2, 0, 0]), 4), reward_kind="distance"))
    env.reset()
    rewards = [env.step((0, 0)).reward for _ in range(4)]
    assert rewards[:3] == [-1, -1, -1]
    assert rewards[3] == pytest.approx(-2 * 0.5)

"""Two-head categorical actor-critic MLP with hand-written backprop."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from ..rng import Xoshiro256


@dataclass
class PolicyParams:
    """Flat ``name -> array`` store.

    Trunk layers are ``layer.<i>.{w,b}``; heads are ``gate_head``,
    ``perm_head`` and ``value_head``. Weights are ``(fan_in, fan_out)``.
    """

    arrays: dict[str, np.ndarray]

    @property
    def n_trunk(self) -> int:
        return sum(1 for k in self.arrays if k.startswith("layer.") and k.endswith(".w"))

    @property
    def obs_size(self) -> int:
        return self.arrays["layer.0.w"].shape[0]

    @property
    def action_dims(self) -> tuple[int, int]:
        return self.arrays["gate_head.b"].shape[0], self.arrays["perm_head.b"].shape[0]

    def copy(self) -> "PolicyParams":
        return PolicyParams({k: v.copy() for k, v in self.arrays.items()})

    def items(self) -> Iterator[tuple[str, np.ndarray]]:
        return iter(self.arrays.items())

    def all_finite(self) -> bool:
        return all(np.all(np.isfinite(v)) for v in self.arrays.values())

    def zeros_like(self) -> "PolicyParams":
        return PolicyParams({k: np.zeros_like(v) for k, v in self.arrays.items()})


def init_params(
    obs_size: int,
    n_gates: int,
    n_perms: int,
    rng: Xoshiro256,
    hidden: tuple[int, ...] = (64, 64),
    head_gain: float = 0.01,
) -> PolicyParams:
    """Scaled-normal init: trunk std ``1/sqrt(fan_in)``, policy heads scaled by ``head_gain``."""
    arrays: dict[str, np.ndarray] = {}

    def dense(name, fan_in, fan_out, gain):
        w = np.array(rng.normals(fan_in * fan_out)).reshape(fan_in, fan_out)
        arrays[f"{name}.w"] = w * (gain / math.sqrt(fan_in))
        arrays[f"{name}.b"] = np.zeros(fan_out)

    width = obs_size
    for i, h in enumerate(hidden):
        dense(f"layer.{i}", width, h, 1.0)
        width = h
    dense("gate_head", width, n_gates, head_gain)
    dense("perm_head", width, n_perms, head_gain)
    dense("value_head", width, 1, 1.0)
    return PolicyParams(arrays)


class Forward(NamedTuple):
    gate_logits: np.ndarray
    perm_logits: np.ndarray
    value: np.ndarray
    activations: list[np.ndarray]  # trunk input followed by each hidden output


def policy_forward(params: PolicyParams, obs: np.ndarray) -> Forward:
    """Batched forward pass; ``obs`` is ``(B, obs_size)`` or a single vector."""
    x = np.atleast_2d(np.asarray(obs, dtype=np.float64))
    if x.shape[1] != params.obs_size:
        raise ValueError(f"observation width {x.shape[1]} does not match network input {params.obs_size}")
    acts = [x]
    h = x
    p = params.arrays
    for i in range(params.n_trunk):
        h = np.tanh(h @ p[f"layer.{i}.w"] + p[f"layer.{i}.b"])
        acts.append(h)
    gl = h @ p["gate_head.w"] + p["gate_head.b"]
    pl = h @ p["perm_head.w"] + p["perm_head.b"]
    v = (h @ p["value_head.w"] + p["value_head.b"])[:, 0]
    return Forward(gl, pl, v, acts)


def log_softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=-1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=-1, keepdims=True))


def softmax(z: np.ndarray) -> np.ndarray:
    return np.exp(log_softmax(z))


def entropy(logits: np.ndarray) -> np.ndarray:
    lp = log_softmax(logits)
    return -(np.exp(lp) * lp).sum(axis=-1)


def joint_log_prob(fwd: Forward, gate_idx: np.ndarray, perm_idx: np.ndarray) -> np.ndarray:
    rows = np.arange(fwd.gate_logits.shape[0])
    return log_softmax(fwd.gate_logits)[rows, gate_idx] + log_softmax(fwd.perm_logits)[rows, perm_idx]


def backward(
    params: PolicyParams,
    fwd: Forward,
    d_gate_logits: np.ndarray,
    d_perm_logits: np.ndarray,
    d_value: np.ndarray,
) -> PolicyParams:
    """Parameter gradients given upstream gradients on the three head outputs."""
    p = params.arrays
    g: dict[str, np.ndarray] = {}
    h = fwd.activations[-1]
    dv = d_value[:, None]
    g["gate_head.w"] = h.T @ d_gate_logits
    g["gate_head.b"] = d_gate_logits.sum(axis=0)
    g["perm_head.w"] = h.T @ d_perm_logits
    g["perm_head.b"] = d_perm_logits.sum(axis=0)
    g["value_head.w"] = h.T @ dv
    g["value_head.b"] = dv.sum(axis=0)
    dh = d_gate_logits @ p["gate_head.w"].T + d_perm_logits @ p["perm_head.w"].T + dv @ p["value_head.w"].T
    for i in range(params.n_trunk - 1, -1, -1):
        out, inp = fwd.activations[i + 1], fwd.activations[i]
        dpre = dh * (1.0 - out * out)
        g[f"layer.{i}.w"] = inp.T @ dpre
        g[f"layer.{i}.b"] = dpre.sum(axis=0)
        if i:
            dh = dpre @ p[f"layer.{i}.w"].T
    return PolicyParams({k: g[k] for k in p})

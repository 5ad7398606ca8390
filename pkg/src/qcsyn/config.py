"""Run configuration: flat ``dotted.key = <json value>`` text files.

Lines starting with ``#`` are comments. Values are JSON literals, so
``env.n = 2``, ``env.reward = "step"``, ``seeds = [1, 2, 3]``.
"""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import fields
from pathlib import Path
from typing import Any

from .agents.ppo import PPOConfig

_PPO_DEFAULTS = {f"ppo.{f.name}": f.default for f in fields(PPOConfig)}
_PPO_DEFAULTS["ppo.hidden"] = [64, 64]

DEFAULTS: dict[str, Any] = {
    "env.n": 2,
    "env.lambda": None,  # 5 unless a fixed target is given
    "env.target": None,  # named state or path to amplitude JSON
    "env.max_len": None,  # L for a fixed target
    "env.sfe": 0.001,
    "env.reward": "step",
    **_PPO_DEFAULTS,
    "ppo.seed": None,  # taken from the run seed
    "bench.level": "all",
    "bench.states": "all",
    "bench.episodes": 100,
    "bench.max_len": 30,
    "bench.agents": ["random"],
    "bench.lambdas": [2, 3, 4, 5],
    "bench.ns": [2],
    "bench.rewards": ["step", "distance"],
    "oracle.max_depth": 8,
    "oracle.dedup": True,
    "seeds": [1, 2, 3],
    "output_dir": "runs",
}

DEFAULT_LAMBDA = 5


class ConfigError(ValueError):
    pass


def _check_type(key: str, value: Any) -> Any:
    default = DEFAULTS[key]
    if value is None:
        return None
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{key}: expected a boolean, got {value!r}")
    elif isinstance(default, int) and default is not None:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{key}: expected an integer, got {value!r}")
    elif isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key}: expected a number, got {value!r}")
        value = float(value)
    elif isinstance(default, list):
        if not isinstance(value, list):
            raise ConfigError(f"{key}: expected a list, got {value!r}")
    return value


def validate(config: dict[str, Any]) -> dict[str, Any]:
    """Fill defaults, reject unknown keys and type errors, resolve the target mode."""
    unknown = sorted(set(config) - set(DEFAULTS))
    if unknown:
        raise ConfigError(f"unknown config keys: {unknown}")
    out = dict(DEFAULTS)
    for k, v in config.items():
        out[k] = _check_type(k, v)
    if out["env.lambda"] is not None and out["env.target"] is not None:
        raise ConfigError("give either env.lambda or env.target, not both")
    if out["env.target"] is None:
        if out["env.lambda"] is None:
            out["env.lambda"] = DEFAULT_LAMBDA
        if out["env.lambda"] < 1:
            raise ConfigError(f"env.lambda must be >= 1, got {out['env.lambda']}")
        if out["env.max_len"] is not None:
            raise ConfigError("env.max_len is derived as 2*lambda in random-target mode")
    elif out["env.max_len"] is None or out["env.max_len"] < 1:
        raise ConfigError("a fixed env.target needs env.max_len >= 1")
    if out["env.reward"] not in ("step", "distance"):
        raise ConfigError(f"env.reward must be 'step' or 'distance', got {out['env.reward']!r}")
    if not 0 < out["env.sfe"] < 1:
        raise ConfigError("env.sfe must lie in (0, 1)")
    if not out["seeds"] or not all(isinstance(s, int) and not isinstance(s, bool) for s in out["seeds"]):
        raise ConfigError(f"seeds must be a non-empty list of integers, got {out['seeds']!r}")
    if out["bench.level"] not in ("all", "easy", "medium", "hard"):
        raise ConfigError(f"bench.level must be all/easy/medium/hard, got {out['bench.level']!r}")
    try:
        ppo_config(out, out["seeds"][0])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid ppo settings: {exc}") from None
    return out


def ppo_config(config: dict[str, Any], seed: int) -> PPOConfig:
    kw = {k[4:]: v for k, v in config.items() if k.startswith("ppo.")}
    kw["seed"] = seed if kw.get("seed") is None else kw["seed"]
    kw["hidden"] = tuple(kw["hidden"])
    return PPOConfig(**kw)


def dumps(config: dict[str, Any]) -> str:
    return "".join(f"{k} = {json.dumps(config[k])}\n" for k in sorted(config))


def loads(text: str) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key = key.strip()
        try:
            out[key] = json.loads(value.strip())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from None
    return out


def load(path: str | None) -> dict[str, Any]:
    if path is None or path == "default":
        return {}
    return loads(Path(path).read_text())


def config_hash(config: dict[str, Any]) -> str:
    """Hash of everything except the seed list and output location."""
    body = {k: v for k, v in config.items() if k not in ("seeds", "output_dir")}
    return hashlib.sha256(dumps(body).encode()).hexdigest()[:8]


def output_dir(config: dict[str, Any]) -> Path:
    return Path(os.environ.get("QCSYN_OUTPUT_DIR") or config["output_dir"])

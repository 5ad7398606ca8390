"""``qcsyn`` command-line entry point."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import config as cfgmod
from .agents import OracleAgent, PolicyAgent, RandomAgent, load_checkpoint, save_checkpoint, train
from .bench import (
    LEVELS,
    BenchReport,
    eval_random_targets,
    level_plot_rows,
    state_plot_rows,
    named_state,
    rows_as_dicts,
    state_benchmark,
    sweep_rows,
    well_known_states,
)
from .agents.ppo import EpisodeRecord
from .bench import run_episode
from .env import REWARDS, EnvConfig, FixedTarget, QuantumCircuitEnv, RandomTarget
from .gates import clifford_t, format_circuit
from .metrics import metric_summary
from .oracle import min_depth_search
from .quantum import QuantumState
from .rng import Xoshiro256, derive_seed
from .targets import generate_target

logger = logging.getLogger("qcsyn")

EPISODE_FIELDS = [
    "run_id", "episode", "seed", "n", "lambda", "L", "outcome", "n_g", "total_reward", "final_fidelity", "circuit",
]


class CommandError(RuntimeError):
    pass


# -- file helpers -----------------------------------------------------------


def write_csv(path: Path, rows: list[dict], fieldnames: list[str] | None = None) -> None:
    fieldnames = fieldnames or (list(rows[0]) if rows else [])
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fieldnames, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: "" if r.get(k) is None else r[k] for k in fieldnames})


def write_json(path: Path, data: Any) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def episode_rows(records) -> list[dict]:
    rows = []
    for r in records:
        d = asdict(r)
        d["lambda"] = d.pop("lam")
        rows.append(d)
    return rows


# -- config resolution ------------------------------------------------------


def load_target(spec: str, n: int) -> QuantumState:
    """Named benchmark state or a JSON file with ``amplitudes`` (or a bare pair list)."""
    try:
        state = named_state(spec).state
    except KeyError:
        path = Path(spec)
        if not path.exists():
            raise cfgmod.ConfigError(f"target {spec!r} is neither a named state nor a file") from None
        data = json.loads(path.read_text())
        pairs = data["amplitudes"] if isinstance(data, dict) else data
        state = QuantumState.from_json(pairs, normalize=True)
    if state.n != n:
        raise cfgmod.ConfigError(f"target has {state.n} qubits but env.n = {n}")
    return state


def env_config(config: dict, reward: str | None = None, lam: int | None = None, n: int | None = None) -> EnvConfig:
    n = n or config["env.n"]
    if config["env.target"] is not None and lam is None:
        mode = FixedTarget(load_target(config["env.target"], n), config["env.max_len"])
    else:
        mode = RandomTarget(lam or config["env.lambda"])
    return EnvConfig(n, mode, clifford_t(), config["env.sfe"], reward or config["env.reward"])


def make_agent(spec: str, n: int):
    gs = clifford_t()
    if spec == "random":
        return "random", RandomAgent(gs, n)
    if spec == "oracle":
        return "oracle", OracleAgent(gs, n)
    greedy = spec.endswith(":greedy")
    path = Path(spec[: -len(":greedy")] if greedy else spec)
    if not path.exists():
        raise cfgmod.ConfigError(f"agent {spec!r}: expected 'random', 'oracle' or a checkpoint path")
    params, _ = load_checkpoint(path)
    return path.stem, PolicyAgent(params, greedy=greedy)


def run_dir(config: dict, command: str, seed: int) -> Path:
    d = cfgmod.output_dir(config) / f"{command}-{cfgmod.config_hash(config)}-s{seed}"
    d.mkdir(parents=True, exist_ok=True)
    (d / "config.txt").write_text(cfgmod.dumps({**config, "seeds": [seed]}))
    return d


# -- per-seed commands ------------------------------------------------------


def cmd_train(config: dict, seed: int, out: Path, args) -> dict:
    ecfg = env_config(config)
    pcfg = cfgmod.ppo_config(config, seed)
    run_id = out.name
    (out / "checkpoints").mkdir(exist_ok=True)
    env_echo = {"n": ecfg.n, "lambda": ecfg.lam, "L": ecfg.max_depth, "reward": ecfg.reward_kind.value}

    def on_checkpoint(step, params):
        save_checkpoint(out / "checkpoints" / f"step-{step}.json", params, pcfg, env_echo)

    params, log = train(ecfg, pcfg, run_id=run_id, on_checkpoint=on_checkpoint)
    write_csv(out / "episodes.csv", episode_rows(log), EPISODE_FIELDS)
    save_checkpoint(out / "checkpoint.json", params, pcfg, env_echo)
    return _episode_metrics(config, run_id, log, out)


def _episode_metrics(config: dict, run_id: str, log, out: Path) -> dict:
    result = {"config_hash": cfgmod.config_hash(config), "run_id": run_id, "episodes": len(log)}
    outcomes = [r.to_outcome() for r in log if r.lam]
    if outcomes:
        result.update(metric_summary(outcomes, min(100, len(outcomes))))
    write_json(out / "metrics.json", result)
    return result


def cmd_eval(config: dict, seed: int, out: Path, args) -> dict:
    ecfg = env_config(config)
    name, agent = make_agent(config["bench.agents"][0], ecfg.n)
    env = QuantumCircuitEnv(ecfg)
    log = []
    for e in range(config["bench.episodes"]):
        rng = Xoshiro256(derive_seed(seed, e))
        outcome, n_g, F, circuit = run_episode(env, agent, rng)
        log.append(
            EpisodeRecord(out.name, e, seed, ecfg.n, ecfg.lam, ecfg.max_depth, outcome.value, n_g,
                          _episode_return(ecfg, outcome, len(circuit), F), F, ";".join(circuit))
        )
    write_csv(out / "episodes.csv", episode_rows(log), EPISODE_FIELDS)
    return _episode_metrics(config, out.name, log, out)


def _episode_return(ecfg: EnvConfig, outcome, steps: int, F: float) -> float:
    # every step before the last one is a plain -1 under both reward kinds
    return -(steps - 1) + REWARDS[ecfg.reward_kind](F, steps, ecfg.max_depth, ecfg.sfe)


def _levels(config: dict):
    lv = config["bench.level"]
    return list(LEVELS.values()) if lv == "all" else [LEVELS[lv]]


def cmd_bench_levels(config: dict, seed: int, out: Path, args) -> dict:
    report = BenchReport()
    for spec in config["bench.agents"]:
        name, agent = make_agent(spec, 2)
        for level in _levels(config):
            report.extend(
                eval_random_targets(
                    agent, level, config["bench.episodes"], config["bench.max_len"], config["env.sfe"],
                    seed=derive_seed(seed, 0), agent_name=name,
                )
            )
    return _write_bench(config, report, out, args, level_plot_rows, "levels_plot.csv", "suite")


def cmd_bench_states(config: dict, seed: int, out: Path, args) -> dict:
    states = well_known_states()
    if config["bench.states"] != "all":
        wanted = [s.strip() for s in config["bench.states"].split(",")]
        states = [named_state(w) for w in wanted]
    report = BenchReport()
    for spec in config["bench.agents"]:
        name, agent = make_agent(spec, 2)
        report.extend(
            state_benchmark(
                agent, states, config["bench.episodes"], config["bench.max_len"], config["env.sfe"],
                seed=derive_seed(seed, 1), agent_name=name,
            )
        )
    return _write_bench(config, report, out, args, state_plot_rows, "states_plot.csv", "target")


def _write_bench(config, report: BenchReport, out: Path, args, plot_fn, plot_name, group_key) -> dict:
    data = report.to_dict()
    data["config_hash"] = cfgmod.config_hash(config)
    data["per_group"] = report.group(group_key)
    write_json(out / "report.json", data)
    write_csv(out / "episodes.csv", rows_as_dicts(report.rows), list(rows_as_dicts(report.rows[:1])[0]) if report.rows else ["agent"])
    if args.plot_data:
        write_csv(out / plot_name, plot_fn(report))
    overall = data["overall"]
    return {"config_hash": data["config_hash"], "n_g_mean": overall.get("n_g_mean"), "success_rate": overall.get("success_rate")}


def cmd_gen_target(config: dict, seed: int, out: Path, args) -> dict:
    if config["env.target"] is not None:
        raise cfgmod.ConfigError("gen-target needs env.lambda, not a fixed target")
    gs = clifford_t()
    n, lam = config["env.n"], config["env.lambda"]
    trace = generate_target(n, lam, gs, Xoshiro256(seed))
    data = {
        "n": n,
        "lambda": lam,
        "seed": seed,
        "restarts": trace.restarts,
        "circuit": format_circuit(trace.accepted_actions, gs, n),
        "amplitudes": trace.target.to_json(),
    }
    write_json(out / "target.json", data)
    return data


# -- whole-run commands -----------------------------------------------------


def run_multi_seed(command: str, config: dict, fn: Callable, args, metric: str) -> dict:
    """Run ``fn`` once per seed, then write a cross-seed summary JSON."""
    per_seed, failures = {}, {}
    for seed in config["seeds"]:
        out = run_dir(config, command, seed)
        try:
            per_seed[seed] = fn(config, seed, out, args)
        except (cfgmod.ConfigError, FileNotFoundError):
            raise
        except Exception as exc:  # noqa: BLE001 - recorded in the summary
            logger.error("seed %d failed: %s", seed, exc)
            failures[seed] = f"{type(exc).__name__}: {exc}"
    values = [r[metric] for r in per_seed.values() if r.get(metric) is not None]
    summary = {
        "command": command,
        "config_hash": cfgmod.config_hash(config),
        "seeds": config["seeds"],
        "metric": metric,
        "per_seed": {str(s): r.get(metric) for s, r in per_seed.items()},
        "mean": float(np.mean(values)) if values else None,
        "std": float(np.std(values)) if values else None,
        "single_seed": len(config["seeds"]) == 1,
        "partial": bool(failures),
        "failures": {str(k): v for k, v in failures.items()},
    }
    out_root = cfgmod.output_dir(config)
    out_root.mkdir(parents=True, exist_ok=True)
    write_json(out_root / f"{command}-{summary['config_hash']}-summary.json", summary)
    return summary


def cmd_oracle(config: dict, args) -> dict:
    gs = clifford_t()
    if args.state:
        target = named_state(args.state).state
    elif args.amplitudes:
        text = args.amplitudes
        data = json.loads(Path(text).read_text() if Path(text).exists() else text)
        target = QuantumState.from_json(data["amplitudes"] if isinstance(data, dict) else data, normalize=True)
    elif config["env.target"] is not None:
        target = load_target(config["env.target"], config["env.n"])
    else:
        raise cfgmod.ConfigError("oracle needs --state, --amplitudes or env.target")
    res = min_depth_search(target, gs, target.n, config["oracle.max_depth"], config["env.sfe"], dedup=config["oracle.dedup"])
    return {
        "found": res.found,
        "depth": res.min_depth,
        "circuit": format_circuit(res.circuit, gs, target.n) if res.found else None,
        "states_explored": res.states_explored,
    }


def cmd_bench_train(config: dict, args) -> dict:
    """Train one agent per (n, reward, lambda, seed) and emit reward/landscape plot data."""
    results = []
    for n in config["bench.ns"]:
        for reward in config["bench.rewards"]:
            for lam in config["bench.lambdas"]:
                for seed in config["seeds"]:
                    ecfg = env_config(config, reward=reward, lam=lam, n=n)
                    _, log = train(ecfg, cfgmod.ppo_config(config, seed))
                    outcomes = [r.to_outcome() for r in log]
                    m = metric_summary(outcomes, min(100, len(outcomes))) if outcomes else {}
                    results.append({"n": n, "reward": reward, "lambda": lam, "seed": seed, "episodes": len(log), **m})
                    logger.info("n=%d reward=%s lambda=%d seed=%d -> %s", n, reward, lam, seed, m)
    out = cfgmod.output_dir(config) / f"bench-train-{cfgmod.config_hash(config)}"
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.txt").write_text(cfgmod.dumps(config))
    write_csv(out / "runs.csv", results)
    summary = {"config_hash": cfgmod.config_hash(config), "runs": len(results)}
    if args.plot_data:
        step_rows = [r for r in results if r["reward"] == "step"]
        write_csv(out / "reward_comparison.csv", sweep_rows([r for r in results if r["n"] == config["bench.ns"][0]], "reward"))
        write_csv(out / "depth_by_qubits.csv", sweep_rows(step_rows or results, "n"))
    write_json(out / "summary.json", summary)
    return summary


# -- argument parsing -------------------------------------------------------

FLAG_KEYS = {
    "n": "env.n",
    "lam": "env.lambda",
    "target": "env.target",
    "max_len": "env.max_len",
    "sfe": "env.sfe",
    "reward": "env.reward",
    "total_steps": "ppo.total_steps",
    "learning_rate": "ppo.learning_rate",
    "level": "bench.level",
    "states": "bench.states",
    "episodes": "bench.episodes",
    "bench_max_len": "bench.max_len",
    "agent": "bench.agents",
    "max_depth": "oracle.max_depth",
    "output_dir": "output_dir",
    "seed": "seeds",
}


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="config file, or 'default'")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override any config key (JSON value)")
    common.add_argument("--seed", type=int, action="append", help="repeatable; replaces the seed list")
    common.add_argument("--output-dir")
    common.add_argument("--json", action="store_true", help="machine-readable JSON on stdout")
    common.add_argument("-v", "--verbose", action="store_true")
    common.add_argument("--n", type=int)
    common.add_argument("--lambda", dest="lam", type=int)
    common.add_argument("--target", "--target-file", dest="target", help="named state or amplitude JSON file")
    common.add_argument("--max-len", type=int)
    common.add_argument("--sfe", type=float)
    common.add_argument("--reward", choices=["step", "distance"])

    p = argparse.ArgumentParser(prog="qcsyn", description="Quantum circuit synthesis environment toolkit")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("gen-target", parents=[common], help="generate a random target state")
    t = sub.add_parser("train", parents=[common], help="train PPO agents")
    t.add_argument("--total-steps", type=int)
    t.add_argument("--learning-rate", type=float)
    e = sub.add_parser("eval", parents=[common], help="run an agent on the configured env")
    e.add_argument("--agent", action="append", help="random | oracle | checkpoint path[:greedy]")
    e.add_argument("--episodes", type=int)
    for name in ("bench-levels", "bench-states"):
        b = sub.add_parser(name, parents=[common])
        b.add_argument("--agent", action="append")
        b.add_argument("--episodes", type=int)
        b.add_argument("--bench-max-len", type=int)
        b.add_argument("--plot-data", action="store_true")
        if name == "bench-levels":
            b.add_argument("--level", choices=["all", "easy", "medium", "hard"])
        else:
            b.add_argument("--states", help="comma-separated state names, or 'all'")
    bt = sub.add_parser("bench-train", parents=[common], help="reward comparison / depth landscape sweeps")
    bt.add_argument("--total-steps", type=int)
    bt.add_argument("--learning-rate", type=float)
    bt.add_argument("--lambdas", type=_int_list)
    bt.add_argument("--ns", type=_int_list)
    bt.add_argument("--rewards", type=lambda s: s.split(","))
    bt.add_argument("--plot-data", action="store_true")
    o = sub.add_parser("oracle", parents=[common], help="brute-force minimal circuit search")
    o.add_argument("--state", help="named state")
    o.add_argument("--amplitudes", help="JSON file or inline JSON list of [re, im] pairs")
    o.add_argument("--max-depth", type=int)
    o.add_argument("--no-dedup", action="store_true")
    return p


def resolve_config(args) -> dict:
    raw = cfgmod.load(args.config)
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise cfgmod.ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        try:
            raw[key.strip()] = json.loads(value)
        except json.JSONDecodeError:
            raw[key.strip()] = value
    for attr, key in FLAG_KEYS.items():
        value = getattr(args, attr, None)
        if value is not None:
            raw[key] = value
    for attr, key in (("lambdas", "bench.lambdas"), ("ns", "bench.ns"), ("rewards", "bench.rewards")):
        if getattr(args, attr, None) is not None:
            raw[key] = getattr(args, attr)
    if getattr(args, "no_dedup", False):
        raw["oracle.dedup"] = False
    return cfgmod.validate(raw)


PER_SEED = {
    "train": (cmd_train, "trailing_lambda_mean"),
    "eval": (cmd_eval, "trailing_lambda_mean"),
    "bench-levels": (cmd_bench_levels, "n_g_mean"),
    "bench-states": (cmd_bench_states, "n_g_mean"),
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="%(levelname)s %(message)s")
    try:
        config = resolve_config(args)
        if args.command == "oracle":
            result = cmd_oracle(config, args)
        elif args.command == "gen-target":
            targets = [cmd_gen_target(config, s, run_dir(config, "gen-target", s), args) for s in config["seeds"]]
            result = targets[0] if len(targets) == 1 else targets
        elif args.command == "bench-train":
            result = cmd_bench_train(config, args)
        else:
            fn, metric = PER_SEED[args.command]
            result = run_multi_seed(args.command, config, fn, args, metric)
    except (cfgmod.ConfigError, ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.json or args.command in ("oracle", "gen-target"):
        print(json.dumps(result, indent=2, sort_keys=True))
    else:
        for k, v in result.items():
            print(f"{k}: {v}")
    return 1 if isinstance(result, dict) and result.get("partial") else 0


if __name__ == "__main__":
    sys.exit(main())

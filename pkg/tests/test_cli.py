import json
from pathlib import Path

import pytest

from qcsyn import config as cfgmod
from qcsyn.cli import main


@pytest.fixture
def outdir(tmp_path, monkeypatch):
    monkeypatch.setenv("QCSYN_OUTPUT_DIR", str(tmp_path / "runs"))
    monkeypatch.chdir(tmp_path)
    return tmp_path / "runs"


def files_under(root: Path) -> dict[str, bytes]:
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def test_oracle_named_state(outdir, capsys):
    assert main(["oracle", "--state", "bell-phi-plus"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["found"] and out["depth"] == 2 and out["circuit"] == ["H q0", "CNOT q0 q1"]


def test_gen_target_writes_json(outdir, capsys):
    assert main(["gen-target", "--lambda", "3", "--seed", "5"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["lambda"] == 3 and len(out["circuit"]) == 3
    (path,) = outdir.glob("gen-target-*-s5/target.json")
    assert json.loads(path.read_text()) == out


def test_fixed_target_and_lambda_conflict(outdir, tmp_path, capsys):
    target = tmp_path / "x.json"
    target.write_text(json.dumps([[1, 0], [0, 0], [0, 0], [0, 0]]))
    assert main(["train", "--lambda", "5", "--target", str(target)]) == 2
    assert "error" in capsys.readouterr().err
    assert not outdir.exists()


def test_unknown_config_key_is_rejected(outdir, capsys):
    assert main(["oracle", "--state", "zero", "--set", "env.colour=1"]) == 2
    with pytest.raises(cfgmod.ConfigError):
        cfgmod.validate({**cfgmod.DEFAULTS, "ppo.lr": 0.1})


def test_config_round_trip_and_default(tmp_path):
    text = cfgmod.dumps(cfgmod.DEFAULTS)
    assert cfgmod.loads(text) == cfgmod.DEFAULTS
    resolved = cfgmod.validate(cfgmod.load("default"))
    assert resolved == {**cfgmod.DEFAULTS, "env.lambda": 5}
    path = tmp_path / "c.txt"
    path.write_text(text + "\nenv.lambda = 3\n")
    loaded = cfgmod.validate(cfgmod.load(str(path)))
    assert loaded["env.lambda"] == 3
    assert cfgmod.config_hash(loaded) != cfgmod.config_hash(resolved)
    assert cfgmod.config_hash({**cfgmod.DEFAULTS, "seeds": [9]}) == cfgmod.config_hash(cfgmod.DEFAULTS)


def test_train_run_layout_and_rerun_identical(outdir, capsys):
    argv = ["train", "--lambda", "1", "--total-steps", "600", "--set", "ppo.rollout_length=200", "--seed", "3", "--json"]
    assert main(argv) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["single_seed"] and not summary["partial"]
    (run,) = outdir.glob("train-*-s3")
    for name in ("config.txt", "episodes.csv", "metrics.json", "checkpoint.json"):
        assert (run / name).exists()
    first = files_under(outdir)
    assert main(argv) == 0
    assert files_under(outdir) == first


def test_multi_seed_summary(outdir, capsys):
    assert main(["eval", "--lambda", "2", "--episodes", "20", "--seed", "1", "--seed", "2", "--json"]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert set(summary["per_seed"]) == {"1", "2"} and not summary["single_seed"]
    assert summary["mean"] is not None and summary["std"] >= 0
    assert len(list(outdir.glob("eval-*-summary.json"))) == 1


def test_eval_with_checkpoint_agent(outdir, capsys):
    main(["train", "--lambda", "1", "--total-steps", "300", "--set", "ppo.rollout_length=100", "--seed", "1"])
    (ckpt,) = outdir.glob("train-*-s1/checkpoint.json")
    assert main(["eval", "--lambda", "1", "--episodes", "5", "--agent", f"{ckpt}:greedy"]) == 0
    assert main(["eval", "--lambda", "1", "--agent", "nonsense"]) == 2


def test_bench_commands_plot_data(outdir, capsys):
    assert main(["bench-levels", "--level", "easy", "--episodes", "5", "--agent", "random", "--agent", "oracle",
                 "--plot-data"]) == 0
    (run,) = outdir.glob("bench-levels-*-s1")
    report = json.loads((run / "report.json").read_text())
    assert set(report["per_agent"]) == {"random", "oracle"}
    assert (run / "levels_plot.csv").read_text().startswith("agent,level,lambda,")
    assert main(["bench-states", "--states", "zero,bell-phi-plus", "--episodes", "3", "--agent", "oracle",
                 "--plot-data"]) == 0
    (run,) = outdir.glob("bench-states-*-s1")
    report = json.loads((run / "report.json").read_text())
    assert report["modal_circuits"]["oracle/bell-phi-plus"]["circuit"] == ["H q0", "CNOT q0 q1"]


def test_bench_train_sweep(outdir, capsys):
    argv = ["bench-train", "--lambdas", "1", "--rewards", "step,distance", "--total-steps", "200",
            "--set", "ppo.rollout_length=100", "--seed", "1", "--plot-data"]
    assert main(argv) == 0
    (run,) = outdir.glob("bench-train-*")
    lines = (run / "reward_comparison.csv").read_text().splitlines()
    assert lines[0].startswith("reward,lambda,lambda_mean") and len(lines) == 3


def test_nothing_written_outside_output_dir(outdir, tmp_path, capsys):
    main(["eval", "--lambda", "1", "--episodes", "3"])
    assert {p.name for p in tmp_path.iterdir()} == {"runs"}


def test_bad_arguments_exit_code(outdir, capsys):
    assert main(["frobnicate"]) == 2
    assert main(["oracle"]) == 2

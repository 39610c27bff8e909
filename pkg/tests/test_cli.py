import json

import numpy as np
import pytest

from recongame import fileio
from recongame.cli import EXIT_DEFENDER_WIN, EXIT_FAIL, EXIT_INVALID, EXIT_TIMEOUT, ScenarioSpec, main
from recongame.core import GameConfig
from recongame.value import barrier_b1_y


def _read(d):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir())}


@pytest.mark.parametrize("name, payoff", [("s1", 0.4688), ("s2", 0.4311), ("s3", 0.5120)])
def test_scenario_presets(tmp_path, capsys, name, payoff):
    assert main(["scenario", name, "--out", str(tmp_path)]) == 0
    out = json.loads((tmp_path / "outcome.json").read_text())
    assert out["payoff"] == pytest.approx(payoff, abs=5e-3)
    assert {"trajectory.csv", "outcome.json", "min_gap.csv", "spec.json", "plan.json"} <= set(_read(tmp_path))
    text = capsys.readouterr().out
    assert "payoff=" in text and "t_s=" in text and "t_f=" in text


def test_s2_phase_column_alternates(tmp_path):
    main(["scenario", "s2", "--out", str(tmp_path)])
    phases = [r["phase"] for r in fileio.read_trajectory(tmp_path / "trajectory.csv")]
    first = phases.index("RetreatII")
    assert "ApproachI" in phases[first:]


def test_scenario_deterministic(tmp_path):
    main(["scenario", "s1", "--out", str(tmp_path / "a")])
    main(["scenario", "s1", "--out", str(tmp_path / "b")])
    assert _read(tmp_path / "a") == _read(tmp_path / "b")


def test_spec_roundtrip(tmp_path):
    spec = ScenarioSpec("custom", (0.2, 0.3, 0.6, 1.0), alpha=1.4, defender_strategy="pure-pursuit", dt=2e-3)
    spec.save(tmp_path / "spec.json")
    back = ScenarioSpec.load(tmp_path / "spec.json")
    assert back == spec
    assert main(["scenario", "--config", str(tmp_path / "spec.json"), "--out", str(tmp_path / "a")]) == 0
    assert main(["scenario", "--config", str(tmp_path / "a" / "spec.json"), "--out", str(tmp_path / "b")]) == 0
    assert _read(tmp_path / "a") == _read(tmp_path / "b")


@pytest.mark.parametrize("content", [
    "{not json",
    json.dumps({"name": "x", "alpha": 0.8}),
    json.dumps({"name": "x", "intruder_strategy": "teleport"}),
    json.dumps({"name": "x", "initial_state": [0, 1, 2]}),
    json.dumps({"name": "x", "colour": "red"}),
])
def test_invalid_spec(tmp_path, content):
    (tmp_path / "bad.json").write_text(content)
    assert main(["scenario", "--config", str(tmp_path / "bad.json"), "--out", str(tmp_path)]) == EXIT_INVALID


def test_missing_scenario(tmp_path):
    assert main(["scenario", "--out", str(tmp_path)]) == EXIT_INVALID


def test_defender_win_start(tmp_path):
    ScenarioSpec("dw", (0.5, 2.0, 0.5, 2.1)).save(tmp_path / "dw.json")
    assert main(["scenario", "--config", str(tmp_path / "dw.json"), "--out", str(tmp_path)]) == EXIT_DEFENDER_WIN


def test_timeout(tmp_path):
    ScenarioSpec("slow", max_time=0.1).save(tmp_path / "slow.json")
    assert main(["scenario", "--config", str(tmp_path / "slow.json"), "--out", str(tmp_path / "o")]) == EXIT_TIMEOUT


def test_recon_out_env(tmp_path, monkeypatch):
    monkeypatch.setenv("RECON_OUT", str(tmp_path))
    assert main(["scenario", "s1", "--dt", "0.002"]) == 0
    assert (tmp_path / "s1" / "trajectory.csv").exists()
    assert json.loads((tmp_path / "s1" / "spec.json").read_text())["dt"] == 0.002


def test_levelsets_default(tmp_path):
    assert main(["levelsets", "--out", str(tmp_path)]) == 0
    names = set(_read(tmp_path))
    assert names == {"v1.csv", "v2.csv", "barriers_b1.csv", "barriers_b2.csv", "regions.csv"}
    xs, ys, R = fileio.read_matrix(tmp_path / "regions.csv")
    assert R.shape == (400, 400) and set(np.unique(R)) == {0, 1, 2}
    cell = np.hypot(xs[1] - xs[0], ys[1] - ys[0])
    cfg = GameConfig(alpha=1.1)
    for line in fileio.read_polylines(tmp_path / "barriers_b1.csv"):
        for x, y in line:
            assert abs(y - barrier_b1_y(x, (0.0, 0.6), cfg)) < cell


def test_levelsets_minimal(tmp_path):
    assert main(["levelsets", "--resolution", "2x2", "--out", str(tmp_path)]) == 0
    xs, ys, V = fileio.read_matrix(tmp_path / "v1.csv")
    assert V.shape == (2, 2)


@pytest.mark.parametrize("args", [["--bounds", "0,0,0,1"], ["--bounds", "1,0,0,1"], ["--resolution", "1x5"]])
def test_levelsets_degenerate(tmp_path, args):
    assert main(["levelsets", *args, "--out", str(tmp_path)]) == EXIT_INVALID


def test_bad_flag_values():
    with pytest.raises(SystemExit):
        main(["levelsets", "--resolution", "ten"])
    with pytest.raises(SystemExit):
        main(["verify", "everything"])


def test_verify_hji(tmp_path, capsys):
    assert main(["verify", "hji", "--seed", "7", "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "hji.json").read_text())
    assert rep["pass"] and rep["max_abs_residual"] < 1e-8 and rep["seed"] == 7
    assert "PASS" in capsys.readouterr().out


def test_verify_saddle_prints_ordering(tmp_path, capsys):
    assert main(["verify", "saddle", "--out", str(tmp_path)]) == 0
    assert "ordering: pure-pursuit D 0.43" in capsys.readouterr().out


def test_verify_failure_exit(tmp_path, capsys, monkeypatch):
    from recongame import cli
    from recongame.core import GameState
    from recongame.verify import VerificationReport

    bad = VerificationReport("grad", 1, 1.0, GameState.from_array([1, 2, 3, 4]), 0.5)
    monkeypatch.setattr(cli, "run_suite", lambda *a, **k: [bad])
    assert main(["verify", "grad", "--out", str(tmp_path)]) == EXIT_FAIL
    assert "worst-case input: [1, 2, 3, 4]" in capsys.readouterr().err


@pytest.mark.slow
def test_verify_all(tmp_path):
    assert main(["verify", "all", "--seed", "3", "--out", str(tmp_path)]) == 0
    assert len(list(tmp_path.glob("*.json"))) == 5

import json
import subprocess
import sys
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fitzcert import cli
from fitzcert.cli import ScenarioError, Scenario, main, parse_scenario, render_scenario, run

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def _write(tmp_path, data, name="sc.json"):
    p = tmp_path / name
    p.write_text(data if isinstance(data, str) else json.dumps(data))
    return str(p)


@pytest.mark.parametrize("path", sorted(SCENARIOS.glob("*.json")), ids=lambda p: p.stem)
def test_shipped_scenarios_run_cleanly(path, capsys):
    assert main(["--scenario", str(path), "--format", "json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["status"] == "ok" and report["disagreements"] == 0
    assert report["header"]["schema"] == "fitzcert-report/1"


@pytest.mark.parametrize("path", sorted(SCENARIOS.glob("*.json")), ids=lambda p: p.stem)
def test_render_parse_round_trip(path):
    sc = parse_scenario(path.read_text())
    assert parse_scenario(render_scenario(sc)) == sc


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["J", "ncone[0,inf]", "ncone[-1,1]", "subdiff(abs)", "subdiff(quad(0.5))"]),
       st.sampled_from(["J", "ncone[0,0]", "subdiff(ind[-inf,0])"]),
       st.lists(st.integers(-4, 4).map(float), min_size=1, max_size=4, unique=True),
       st.integers(-2, 2).map(float))
def test_generated_scenarios_round_trip(S, T, grid, p):
    sc = Scenario("sweep", {}, {"S": S, "T": T, "p": p, "ps_grid": grid}, "gen")
    assert parse_scenario(render_scenario(sc)) == sc


def test_json_output_is_deterministic(tmp_path):
    src = str(SCENARIOS / "example1_sweep.json")
    outs = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        assert main(["--scenario", src, "--format", "json", "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_text_report_contains_table(capsys):
    assert main(["--scenario", str(SCENARIOS / "example1_sweep.json")]) == 0
    out = capsys.readouterr().out
    assert "YES" in out and "(0, +inf) x R" in out


@pytest.mark.parametrize("data,path", [
    ('{"task": "sweep",\n "S": }', "line 2 column"),
    ({"S": "J"}, "task"),
    ({"task": "dance"}, "task"),
    ({"task": "range", "S": "J", "T": "J", "p": 0, "ps": "abc"}, "ps"),
    ({"task": "range", "S": "K", "T": "J", "p": 0, "ps": 0}, "S"),
    ({"task": "sweep", "S": "J", "T": "J", "bogus": 1}, "bogus"),
    ({"task": "fuzz"}, "seed"),
    ({"task": "sweep", "definitions": {"h": "cosh"}, "S": "subdiff(h)", "T": "J"},
     "definitions.h"),
])
def test_invalid_scenarios_exit_2_and_name_the_field(tmp_path, capsys, data, path):
    assert main(["--scenario", _write(tmp_path, data)]) == 2
    err = capsys.readouterr().err
    assert "scenario error" in err and path in err


def test_nonconvex_subdiff_is_a_scenario_error(tmp_path, capsys):
    sc = {"task": "subdiff", "f": "quad(-1)", "g": "abs", "ps_grid": [0]}
    assert main(["--scenario", _write(tmp_path, sc)]) == 2
    assert "f" in capsys.readouterr().err


def test_missing_file_exits_2(tmp_path):
    assert main(["--scenario", str(tmp_path / "nope.json")]) == 2


def test_disagreement_exits_1(tmp_path, monkeypatch):
    monkeypatch.setattr(cli, "run", lambda sc, cfg, seed: ({"header": {}, "status": "x"}, 1))
    monkeypatch.setattr(cli, "render_text", lambda r: "")
    assert main(["--scenario", str(SCENARIOS / "zero.json")]) == 1


def test_seed_override_changes_fuzz(tmp_path):
    sc = parse_scenario(json.dumps({"task": "fuzz", "seed": 1, "count": 5}))
    a, _ = run(sc, seed=1)
    b, _ = run(sc, seed=2)
    assert a["fuzz"] != b["fuzz"]


def test_console_entry_point_runs():
    r = subprocess.run([sys.executable, "-m", "fitzcert", "--scenario",
                        str(SCENARIOS / "zero.json"), "--format", "json"],
                       capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    assert json.loads(r.stdout)["header"]["task"] == "zero"

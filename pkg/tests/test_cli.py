import csv
import xml.etree.ElementTree as ET

import pytest

from seqreplay.cli import main

TOY = """
[experiment]
episodes = 5
seeds = 0 1
max_steps = 40
"""


@pytest.fixture
def toy_config(tmp_path):
    path = tmp_path / "toy.ini"
    path.write_text(TOY)
    return path


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_run_writes_csvs(tmp_path, toy_config):
    out = tmp_path / "out"
    assert main(["run", "--config", str(toy_config), "--out", str(out),
                 "--override", "seeds=1", "episodes=2"]) == 0
    episodes = rows(out / "sequences_episodes.csv")
    assert len(episodes) == 2
    assert list(episodes[0]) == ["seed", "episode", "eval_return", "replay_updates", "high_reward_event"]
    assert rows(out / "sequences_summary.csv")[0]["method"] == "sequences"


def test_run_is_deterministic(tmp_path, toy_config):
    for name in ("a", "b"):
        assert main(["run", "--config", str(toy_config), "--out", str(tmp_path / name)]) == 0
    assert (tmp_path / "a/sequences_episodes.csv").read_bytes() == (tmp_path / "b/sequences_episodes.csv").read_bytes()


def test_run_records_and_plays_back_schedule(tmp_path, toy_config):
    sched = tmp_path / "sched.csv"
    assert main(["run", "--config", str(toy_config), "--out", str(tmp_path / "s"), "--schedule", str(sched)]) == 0
    assert main(["run", "--config", str(toy_config), "--out", str(tmp_path / "u"), "--schedule", str(sched),
                 "--override", "method=uniform"]) == 0
    seq = [int(r["replay_updates"]) for r in rows(tmp_path / "s/sequences_episodes.csv")]
    uni = [int(r["replay_updates"]) for r in rows(tmp_path / "u/uniform_episodes.csv")]
    assert seq == uni


def test_missing_config_file(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "nope.ini")]) == 1
    assert "not found" in capsys.readouterr().err


def test_bad_override(tmp_path, capsys):
    assert main(["run", "--out", str(tmp_path), "--override", "warp=9"]) == 1
    assert "unknown config key" in capsys.readouterr().err


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 1


def test_compare(tmp_path, toy_config):
    out = tmp_path / "cmp"
    assert main(["compare", "--config", str(toy_config), "--out", str(out)]) == 0
    data = rows(out / "compare_episodes.csv")
    assert {r["method"] for r in data} == {"sequences", "uniform", "prioritized", "none"}
    per = {}
    for r in data:
        per.setdefault(r["method"], []).append((r["seed"], r["episode"], int(r["replay_updates"])))
    assert per["sequences"] == per["uniform"] == per["prioritized"]
    assert all(n == 0 for _, _, n in per["none"])
    root = ET.parse(out / "compare.svg").getroot()
    assert root.tag.endswith("svg")
    assert (out / "schedule.csv").exists()


def test_sweep(tmp_path, toy_config):
    out = tmp_path / "sw"
    assert main(["sweep", "--config", str(toy_config), "--out", str(out), "--param", "m_t",
                 "--values", "10", "1000"]) == 0
    table = rows(out / "sweep_m_t.csv")
    assert [r["m_t"] for r in table] == ["10", "1000"]


def test_plot_one_and_two_series(tmp_path, toy_config):
    main(["run", "--config", str(toy_config), "--out", str(tmp_path / "a")])
    main(["run", "--config", str(toy_config), "--out", str(tmp_path / "b"), "--override", "method=none"])
    one = tmp_path / "one.svg"
    assert main(["plot", str(tmp_path / "a/sequences_episodes.csv"), "--output", str(one)]) == 0
    ET.parse(one)
    two = tmp_path / "two.svg"
    before = (tmp_path / "b/none_episodes.csv").read_bytes()
    assert main(["plot", str(tmp_path / "a/sequences_episodes.csv"), str(tmp_path / "b/none_episodes.csv"),
                 "--output", str(two)]) == 0
    text = two.read_text()
    assert "sequences_episodes" in text and "none_episodes" in text
    assert "average secondary return" in text
    assert (tmp_path / "b/none_episodes.csv").read_bytes() == before


def test_plot_schema_errors(tmp_path, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text("seed,episode,eval_return\n")
    assert main(["plot", str(empty), "--output", str(tmp_path / "x.svg")]) == 1
    bad = tmp_path / "bad.csv"
    bad.write_text("seed,episode\n0,0\n")
    assert main(["plot", str(bad), "--output", str(tmp_path / "x.svg")]) == 1
    assert "eval_return" in capsys.readouterr().err


def test_validate_layout(tmp_path, capsys):
    assert main(["validate-layout"]) == 0
    assert "20x20" in capsys.readouterr().out
    ragged = tmp_path / "ragged.txt"
    ragged.write_text("S..\n..\n1.2\n")
    assert main(["validate-layout", str(ragged)]) == 1
    assert "line 2" in capsys.readouterr().err
    missing = tmp_path / "missing.txt"
    missing.write_text("S..\n...\n1..\n")
    assert main(["validate-layout", str(missing)]) == 1
    assert "'2'" in capsys.readouterr().err

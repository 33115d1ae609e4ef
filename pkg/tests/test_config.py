import pytest

from seqreplay.config import ExperimentConfig, apply_overrides, dump_config, load_config, parse_config
from seqreplay.core import ConfigError


def test_defaults():
    c = ExperimentConfig()
    assert (c.alpha, c.gamma, c.epsilon) == (0.3, 0.9, 0.1)
    assert (c.m_b, c.m_t, c.n_v, c.l) == (1000, 1000, 50, 50)
    assert c.eval_actions == 100 and c.replay_L_probability == 0.5
    assert (c.buffer_capacity, c.priority_exponent, c.priority_floor) == (100_000, 1.0, 1e-3)
    assert c.validate() is c


def test_empty_file_gives_defaults():
    assert parse_config("") == ExperimentConfig()


def test_sections_and_types():
    c = parse_config("""
[experiment]
method = uniform
seeds = 3 4 5
eval_stop_at_goal = yes

[learning]
alpha = 0.5  # inline comment

[replay]
budget_mode = fixed
budget = 250
""")
    assert c.method == "uniform" and c.seeds == [3, 4, 5] and c.eval_stop_at_goal is True
    assert c.alpha == 0.5 and c.budget == 250 and c.validate()


def test_seed_range_syntax():
    assert parse_config("[experiment]\nseeds = 2:5\n").seeds == [2, 3, 4]


def test_unknown_section_and_key():
    with pytest.raises(ConfigError):
        parse_config("[bogus]\nx = 1\n")
    with pytest.raises(ConfigError):
        parse_config("[learning]\nm_t = 5\n")


def test_bad_values():
    with pytest.raises(ConfigError):
        parse_config("[learning]\nalpha = fast\n")
    with pytest.raises(ConfigError):
        parse_config("[experiment]\neval_stop_at_goal = maybe\n")


def test_overrides_dotted_and_bare():
    c = apply_overrides(ExperimentConfig(), ["learning.alpha=0.2", "m_t=10", "seeds=1"])
    assert c.alpha == 0.2 and c.m_t == 10 and c.seeds == [1]
    with pytest.raises(ConfigError):
        apply_overrides(ExperimentConfig(), ["replay.alpha=0.2"])
    with pytest.raises(ConfigError):
        apply_overrides(ExperimentConfig(), ["nonsense=1"])
    with pytest.raises(ConfigError):
        apply_overrides(ExperimentConfig(), ["alpha"])


@pytest.mark.parametrize("changes", [
    {"method": "magic"}, {"env": "maze"}, {"epsilon": 1.5}, {"gamma": 1.0}, {"n_v": 60},
    {"episodes": 0}, {"seeds": []}, {"tau": 0.0}, {"junction_mode": "both"},
    {"method": "uniform"},  # baselines need a finite budget
    {"replay_L_probability": -0.1}, {"budget_mode": "fixed", "budget": -1},
])
def test_validation_errors(changes):
    with pytest.raises(ConfigError):
        ExperimentConfig().replace(**changes).validate()


def test_relative_paths_resolve_against_config_dir(tmp_path):
    (tmp_path / "exp.ini").write_text("[grid]\nlayout = maps/a.txt\n")
    c = load_config(tmp_path / "exp.ini")
    assert c.layout == str(tmp_path / "maps/a.txt")


def test_dump_roundtrip():
    c = ExperimentConfig(seeds=[1, 2], method="prioritized", budget_mode="fixed", layout=None)
    assert parse_config(dump_config(c)) == c

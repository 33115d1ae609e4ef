"""Experiment configuration and the INI-style config file.

Every key has a default, so an empty file runs the navigation demo. Sections
group keys by concern; keys are unique across sections so dotted and bare
override keys (``learning.alpha=0.5`` or ``alpha=0.5``) both work.

    [experiment]
    method = sequences
    env = grid
    episodes = 400
    seeds = 0 1 2

    [learning]
    alpha = 0.3
"""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .core import ConfigError

METHODS = ("none", "uniform", "prioritized", "sequences")
ENVS = ("grid", "car")
BUDGET_MODES = ("unlimited", "fixed", "schedule")

SECTIONS: dict[str, tuple[str, ...]] = {
    "experiment": ("method", "env", "episodes", "seeds", "eval_actions", "eval_rollouts",
                   "eval_stop_at_goal", "max_steps", "methods"),
    "learning": ("alpha", "gamma", "epsilon"),
    "sequences": ("m_b", "m_t", "n_v", "tau", "l", "threshold", "junction_mode",
                  "replay_L_probability"),
    "replay": ("budget_mode", "budget", "schedule_path", "buffer_capacity", "priority_exponent",
               "priority_floor"),
    "grid": ("layout", "move_noise", "goal_reward", "bump_penalty", "living_penalty"),
    "car": ("x_min", "x_max", "v_max", "n_x", "n_v_bins", "force_gain", "gravity_gain",
            "car_goal_reward", "car_living_penalty"),
}


@dataclass
class ExperimentConfig:
    method: str = "sequences"
    env: str = "grid"
    episodes: int = 400
    seeds: list[int] = field(default_factory=lambda: list(range(10)))
    eval_actions: int = 100
    eval_rollouts: int = 1
    eval_stop_at_goal: bool = False
    max_steps: int | None = None  # None: the environment's own cap
    methods: list[str] = field(default_factory=lambda: ["sequences", "uniform", "prioritized", "none"])

    alpha: float = 0.3
    gamma: float = 0.9
    epsilon: float = 0.1

    m_b: int = 1000
    m_t: int = 1000
    n_v: int = 50
    tau: float = 2.0
    l: int = 50
    threshold: float = 100.0
    junction_mode: str = "behavior"
    replay_L_probability: float = 0.5

    budget_mode: str = "unlimited"
    budget: int = 1000
    schedule_path: str | None = None
    buffer_capacity: int = 100_000
    priority_exponent: float = 1.0
    priority_floor: float = 1e-3

    layout: str | None = None
    move_noise: float = 0.2
    goal_reward: float = 100.0
    bump_penalty: float = -100.0
    living_penalty: float = -10.0

    x_min: float = -1.5
    x_max: float = 0.6
    v_max: float = 0.07
    n_x: int = 120
    n_v_bins: int = 100
    force_gain: float = 0.001
    gravity_gain: float = 0.0025
    car_goal_reward: float = 100.0
    car_living_penalty: float = -1.0

    def validate(self) -> "ExperimentConfig":
        problems = []
        if self.method not in METHODS:
            problems.append(f"method must be one of {METHODS}, got {self.method!r}")
        for m in self.methods:
            if m not in METHODS:
                problems.append(f"methods entry {m!r} is not one of {METHODS}")
        if self.env not in ENVS:
            problems.append(f"env must be one of {ENVS}, got {self.env!r}")
        if self.budget_mode not in BUDGET_MODES:
            problems.append(f"budget_mode must be one of {BUDGET_MODES}, got {self.budget_mode!r}")
        if self.junction_mode not in ("behavior", "target"):
            problems.append(f"junction_mode must be behavior or target, got {self.junction_mode!r}")
        for name in ("epsilon", "replay_L_probability", "move_noise"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                problems.append(f"{name} must lie in [0, 1]")
        if not 0.0 <= self.alpha <= 1.0:
            problems.append("alpha must lie in [0, 1]")
        if not 0.0 <= self.gamma < 1.0:
            problems.append("gamma must lie in [0, 1)")
        for name in ("episodes", "eval_actions", "eval_rollouts", "m_b", "m_t", "n_v", "l",
                     "buffer_capacity", "n_x", "n_v_bins"):
            if getattr(self, name) < 1:
                problems.append(f"{name} must be >= 1")
        if not self.seeds:
            problems.append("seeds must not be empty")
        if self.n_v > self.l:
            problems.append(f"n_v ({self.n_v}) must not exceed l ({self.l})")
        if self.tau <= 0:
            problems.append("tau must be > 0")
        if self.budget_mode == "fixed" and self.budget < 0:
            problems.append("budget must be >= 0")
        if self.method in ("uniform", "prioritized") and self.budget_mode == "unlimited":
            problems.append(f"method {self.method} needs budget_mode fixed or schedule")
        if problems:
            raise ConfigError("; ".join(problems))
        return self

    def replace(self, **changes: Any) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)


_FIELDS = {f.name: f for f in dataclasses.fields(ExperimentConfig)}


def _coerce(name: str, raw: str) -> Any:
    default = getattr(ExperimentConfig(), name)
    text = raw.strip()
    if name in ("seeds", "methods"):
        items = text.replace(",", " ").split()
        if name == "seeds":
            if len(items) == 1 and ":" in items[0]:
                lo, hi = items[0].split(":")
                return list(range(int(lo), int(hi)))
            return [int(v) for v in items]
        return items
    if name in ("layout", "schedule_path", "max_steps"):
        if text.lower() in ("", "none"):
            return None
        return int(text) if name == "max_steps" else text
    if isinstance(default, bool):
        if text.lower() in ("1", "true", "yes", "on"):
            return True
        if text.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{name}: expected a boolean, got {raw!r}")
    try:
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
    except ValueError as exc:
        raise ConfigError(f"{name}: cannot parse {raw!r}") from exc
    return text


def _resolve_key(key: str) -> str:
    section, _, name = key.rpartition(".")
    if name not in _FIELDS:
        raise ConfigError(f"unknown config key {key!r}")
    if section and name not in SECTIONS.get(section, ()):
        raise ConfigError(f"key {name!r} does not belong to section [{section}]")
    return name


def apply_overrides(config: ExperimentConfig, overrides: list[str]) -> ExperimentConfig:
    changes = {}
    for item in overrides:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        name = _resolve_key(key.strip())
        changes[name] = _coerce(name, value)
    return config.replace(**changes)


def parse_config(text: str, base_dir: Path | None = None) -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str  # keys are case-sensitive (replay_L_probability)
    parser.read_string(text)
    changes = {}
    for section in parser.sections():
        if section not in SECTIONS:
            raise ConfigError(f"unknown config section [{section}]")
        for key, value in parser.items(section):
            if key not in SECTIONS[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            changes[key] = _coerce(key, value)
    if base_dir is not None:
        for key in ("layout", "schedule_path"):
            if changes.get(key) and not Path(changes[key]).is_absolute():
                changes[key] = str(base_dir / changes[key])
    return ExperimentConfig().replace(**changes)


def load_config(path: str | Path, overrides: list[str] | None = None) -> ExperimentConfig:
    path = Path(path)
    config = parse_config(path.read_text(), base_dir=path.parent)
    if overrides:
        config = apply_overrides(config, overrides)
    return config.validate()


def dump_config(config: ExperimentConfig) -> str:
    lines = []
    for section, keys in SECTIONS.items():
        lines.append(f"[{section}]")
        for key in keys:
            value = getattr(config, key)
            if isinstance(value, list):
                value = " ".join(str(v) for v in value)
            lines.append(f"{key} = {'none' if value is None else value}")
        lines.append("")
    return "\n".join(lines)

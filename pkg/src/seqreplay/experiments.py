"""Training and evaluation protocol.

The behavior policy is epsilon-greedy on the primary task. Every step also
updates the secondary task off-policy and feeds the secondary view of the step
into the sequence window and the baseline buffers. Replay for the secondary
task happens once, at the end of each episode, under that episode's budget.
"""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Sequence

import numpy as np

from .config import ExperimentConfig
from .core import ConfigError, QTable, epsilon_greedy, greedy_action, q_update
from .envs import GridWorld, MountainCar, load_layout
from .replay import (UNLIMITED, PrioritizedBuffer, ReplayBudget, Schedule, UniformBuffer,
                     prioritized_replay, replay_libraries, uniform_replay)
from .seqlib import (SequenceLibrary, SequenceWindow, accepts, capture_on_high_reward,
                     consider_for_library, push_step)
from .virtual import VirtualLibrary, rebuild_virtual_library

log = logging.getLogger(__name__)

EPISODE_COLUMNS = ["seed", "episode", "eval_return", "replay_updates", "high_reward_event"]
SUMMARY_COLUMNS = ["method", "env", "m_b", "m_t", "n_v", "episodes", "seeds", "G_e", "G_e_stderr", "rho"]


def make_env(config: ExperimentConfig) -> GridWorld | MountainCar:
    if config.env == "grid":
        params = dict(move_noise=config.move_noise, goal_reward=config.goal_reward,
                      bump_penalty=config.bump_penalty, living_penalty=config.living_penalty)
        if config.max_steps is not None:
            params["max_steps"] = config.max_steps
        return load_layout(config.layout, **params)
    params = dict(x_min=config.x_min, x_max=config.x_max, v_max=config.v_max, n_x=config.n_x,
                  n_v=config.n_v_bins, force_gain=config.force_gain, gravity_gain=config.gravity_gain,
                  goal_reward=config.car_goal_reward, living_penalty=config.car_living_penalty)
    if config.max_steps is not None:
        params["max_steps"] = config.max_steps
    return MountainCar(**params)


@dataclass
class Learner:
    """Everything one run mutates."""

    q_primary: QTable
    q_secondary: QTable
    window: SequenceWindow
    library: SequenceLibrary
    virtual: VirtualLibrary
    uniform: UniformBuffer | None = None
    prioritized: PrioritizedBuffer | None = None

    @classmethod
    def create(cls, config: ExperimentConfig, num_states: int, num_actions: int) -> "Learner":
        def table() -> QTable:
            return QTable(num_states, num_actions, config.alpha, config.gamma)

        return cls(
            q_primary=table(),
            q_secondary=table(),
            window=SequenceWindow(config.m_b),
            library=SequenceLibrary(config.l, config.tau),
            virtual=VirtualLibrary(config.n_v),
            uniform=UniformBuffer(config.buffer_capacity) if config.method == "uniform" else None,
            prioritized=(PrioritizedBuffer(config.buffer_capacity, config.priority_exponent,
                                           config.priority_floor)
                         if config.method == "prioritized" else None),
        )


@dataclass
class EpisodeStats:
    steps: int
    replay_updates: int
    high_reward_event: bool
    library_accepted: int


@dataclass
class RunRecord:
    seed: int
    eval_returns: list[float] = field(default_factory=list)
    replay_updates: list[int] = field(default_factory=list)
    high_reward_events: list[bool] = field(default_factory=list)
    steps: list[int] = field(default_factory=list)

    @property
    def G_e(self) -> float:
        return float(np.mean(self.eval_returns))

    @property
    def rho(self) -> float:
        return float(np.mean(self.high_reward_events))


def run_episode(config: ExperimentConfig, env, learner: Learner, rng: np.random.Generator,
                allotment: int = UNLIMITED, episode: int = 0) -> EpisodeStats:
    qp, qs, window = learner.q_primary, learner.q_secondary, learner.window
    eps = config.epsilon
    capture = config.method == "sequences"
    s = env.start_state
    event = False
    accepted = 0
    steps = 0
    for steps in range(1, env.max_steps + 1):
        a = epsilon_greedy(qp, s, eps, rng)
        out = env.step(s, a, rng)
        s2 = out.next_state
        q_update(qp, s, a, out.reward_primary, s2, out.terminal_primary)
        delta = q_update(qs, s, a, out.reward_secondary, s2, out.terminal_secondary)
        t = out.transition(s, a)
        push_step(window, t, delta)
        if learner.uniform is not None:
            learner.uniform.add(t)
        if learner.prioritized is not None:
            learner.prioritized.add(t)
        if out.reward_secondary >= config.threshold:
            event = True
            if capture:
                # score the window first; rejected captures never need building
                w_new = window.max_abs_td(config.m_t)
                if accepts(w_new, learner.library.scores, learner.library.tau):
                    candidate = capture_on_high_reward(window, config.m_t, config.threshold, episode)
                    consider_for_library(learner.library, candidate, w_new)
                    accepted += 1
        s = s2
        if out.terminal_primary:
            break

    budget = ReplayBudget(allotment)
    if config.method == "sequences":
        rebuild_virtual_library(learner.virtual, window.as_sequence(created_at=episode),
                                learner.library, config.junction_mode)
        replay_libraries(qs, learner.virtual, learner.library, budget, config.replay_L_probability, rng)
    elif config.method == "uniform":
        uniform_replay(qs, learner.uniform, budget, rng)
    elif config.method == "prioritized":
        prioritized_replay(qs, learner.prioritized, budget, rng)
    window.clear()
    return EpisodeStats(steps, budget.spent, event, accepted)


def evaluate_secondary(q_secondary: QTable, env, rng: np.random.Generator, eval_actions: int = 100,
                       stop_at_goal: bool = False) -> float:
    """Greedy secondary-task rollout from a uniformly drawn non-goal state; no learning."""
    starts = env.eval_states()
    s = int(starts[rng.integers(len(starts))])
    total = 0.0
    for _ in range(eval_actions):
        a = greedy_action(q_secondary, s, rng)
        out = env.step(s, a, rng)
        total += out.reward_secondary
        if stop_at_goal and out.terminal_secondary:
            break
        s = out.next_state
    return total


def _allotment(config: ExperimentConfig, schedule: Schedule | None, episode: int, seed: int) -> int:
    if config.method == "none":
        return 0
    if config.budget_mode == "fixed":
        return config.budget
    if config.budget_mode == "schedule":
        if schedule is None:
            raise ConfigError("budget_mode=schedule but no schedule was loaded")
        return schedule.allotment(episode, seed)
    return UNLIMITED


def run_seed(config: ExperimentConfig, seed: int, schedule: Schedule | None = None) -> RunRecord:
    env = make_env(config)
    learn_seq, eval_seq = np.random.SeedSequence(seed).spawn(2)
    rng = np.random.default_rng(learn_seq)
    eval_rng = np.random.default_rng(eval_seq)
    learner = Learner.create(config, env.num_states, env.num_actions)
    record = RunRecord(seed)
    for episode in range(config.episodes):
        stats = run_episode(config, env, learner, rng, _allotment(config, schedule, episode, seed), episode)
        returns = [evaluate_secondary(learner.q_secondary, env, eval_rng, config.eval_actions,
                                      config.eval_stop_at_goal)
                   for _ in range(config.eval_rollouts)]
        record.eval_returns.append(float(np.mean(returns)))
        record.replay_updates.append(stats.replay_updates)
        record.high_reward_events.append(stats.high_reward_event)
        record.steps.append(stats.steps)
    return record


def _run_seed_args(args):
    return run_seed(*args)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list[RunRecord]

    @property
    def curve(self) -> np.ndarray:
        return np.mean([r.eval_returns for r in self.records], axis=0)

    @property
    def curve_stderr(self) -> np.ndarray:
        data = np.array([r.eval_returns for r in self.records])
        if len(data) < 2:
            return np.zeros(data.shape[1])
        return data.std(axis=0, ddof=1) / math.sqrt(len(data))

    @property
    def G_e(self) -> float:
        return float(np.mean([r.G_e for r in self.records]))

    @property
    def G_e_stderr(self) -> float:
        values = [r.G_e for r in self.records]
        if len(values) < 2:
            return 0.0
        return float(np.std(values, ddof=1) / math.sqrt(len(values)))

    @property
    def rho(self) -> float:
        return float(np.mean([r.rho for r in self.records]))

    def schedule(self) -> Schedule:
        return Schedule.from_rows((r.seed, ep, n) for r in self.records
                                  for ep, n in enumerate(r.replay_updates))

    def summary_row(self) -> dict:
        c = self.config
        return {"method": c.method, "env": c.env, "m_b": c.m_b, "m_t": c.m_t, "n_v": c.n_v,
                "episodes": c.episodes, "seeds": len(self.records), "G_e": self.G_e,
                "G_e_stderr": self.G_e_stderr, "rho": self.rho}


def run_experiment(config: ExperimentConfig, schedule: Schedule | None = None,
                   jobs: int = 1) -> ExperimentResult:
    config.validate()
    if config.budget_mode == "schedule" and schedule is None:
        if not config.schedule_path:
            raise ConfigError("budget_mode=schedule needs a schedule or schedule_path")
        schedule = Schedule.read(config.schedule_path)
    tasks = [(config, seed, schedule) for seed in config.seeds]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_seed_args, tasks))
    else:
        records = [_run_seed_args(t) for t in tasks]
    result = ExperimentResult(config, records)
    log.info("%s/%s: G_e=%.1f +- %.1f rho=%.4f", config.env, config.method, result.G_e,
             result.G_e_stderr, result.rho)
    return result


def sweep(config: ExperimentConfig, parameter: str, values: Sequence[int],
          jobs: int = 1) -> list[tuple[int, ExperimentResult]]:
    if parameter not in ("m_b", "m_t", "n_v"):
        raise ConfigError(f"sweep parameter must be one of m_b, m_t, n_v, got {parameter!r}")
    if not values:
        raise ConfigError("sweep needs at least one value")
    rows = []
    for value in values:
        changes = {parameter: value}
        if parameter == "n_v" and value > config.l:
            changes["l"] = value
        rows.append((value, run_experiment(config.replace(**changes), jobs=jobs)))
    return rows


def write_episode_csv(results: Iterable[ExperimentResult], fh: IO[str], with_method: bool = False) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow((["method"] if with_method else []) + EPISODE_COLUMNS)
    for result in results:
        for record in result.records:
            rows = zip(record.eval_returns, record.replay_updates, record.high_reward_events)
            for ep, (ret, n, event) in enumerate(rows):
                row = [record.seed, ep, repr(ret), n, int(event)]
                writer.writerow(([result.config.method] if with_method else []) + row)


def write_summary_csv(rows: Iterable[dict], fh: IO[str], extra: Sequence[str] = ()) -> None:
    writer = csv.DictWriter(fh, fieldnames=list(extra) + SUMMARY_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})


def save_result(result: ExperimentResult, out_dir: Path, stem: str = "run") -> tuple[Path, Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    episodes = out_dir / f"{stem}_episodes.csv"
    summary = out_dir / f"{stem}_summary.csv"
    with open(episodes, "w", newline="") as fh:
        write_episode_csv([result], fh)
    with open(summary, "w", newline="") as fh:
        write_summary_csv([result.summary_row()], fh)
    return episodes, summary

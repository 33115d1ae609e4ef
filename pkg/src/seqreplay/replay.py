"""Replay under a per-episode update budget.

Sequence replay walks each stored sequence from its last step back to its
first. The uniform and proportional-prioritized single-transition samplers are
the baselines; all three draw from the same budget so comparisons can be made
at an equal number of Q-updates.
"""

from __future__ import annotations

import csv
import sys
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from . import _kernels
from .core import ConfigError, QTable, Transition
from .seqlib import SECONDARY, SequenceLibrary, TransitionSequence
from .virtual import VirtualLibrary

UNLIMITED = sys.maxsize


@dataclass
class ReplayBudget:
    allotted: int = UNLIMITED
    spent: int = 0

    @property
    def remaining(self) -> int:
        return self.allotted - self.spent

    def charge(self, n: int) -> None:
        if n > self.remaining:
            raise ValueError(f"charging {n} updates exceeds the remaining budget {self.remaining}")
        self.spent += n


class UniformBuffer:
    """FIFO ring of single transitions (one task's reward view)."""

    def __init__(self, capacity: int = 100_000, task: int = SECONDARY):
        if capacity < 1:
            raise ConfigError(f"buffer capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self.task = task
        self.states = np.zeros(capacity, dtype=np.int64)
        self.actions = np.zeros(capacity, dtype=np.int64)
        self.rewards = np.zeros(capacity, dtype=np.float64)
        self.next_states = np.zeros(capacity, dtype=np.int64)
        self.terminals = np.zeros(capacity, dtype=np.bool_)
        self.size = 0
        self._next = 0

    def __len__(self) -> int:
        return self.size

    def add(self, t: Transition) -> int:
        i = self._next
        self.states[i] = t.state
        self.actions[i] = t.action
        self.rewards[i] = t.rewards[self.task]
        self.next_states[i] = t.next_state
        self.terminals[i] = t.terminal[self.task]
        self._next = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)
        return i

    def columns(self) -> tuple[np.ndarray, ...]:
        n = self.size
        return (self.states[:n], self.actions[:n], self.rewards[:n],
                self.next_states[:n], self.terminals[:n])


class PrioritizedBuffer(UniformBuffer):
    """Ring of transitions sampled proportionally to priority ** exponent."""

    def __init__(self, capacity: int = 100_000, priority_exponent: float = 1.0,
                 priority_floor: float = 1e-3, task: int = SECONDARY):
        super().__init__(capacity, task)
        if priority_exponent < 0:
            raise ConfigError(f"priority_exponent must be >= 0, got {priority_exponent}")
        if priority_floor <= 0:
            raise ConfigError(f"priority_floor must be > 0, got {priority_floor}")
        self.priority_exponent = priority_exponent
        self.priority_floor = priority_floor
        self.priorities = np.zeros(capacity, dtype=np.float64)
        self._max_priority = 1.0

    def add(self, t: Transition, priority: float | None = None) -> int:
        i = super().add(t)
        self.priorities[i] = self._max_priority if priority is None else max(priority, self.priority_floor)
        return i

    def refresh_max(self) -> None:
        # refreshed after each replay pass, not on every insert
        if self.size:
            self._max_priority = float(self.priorities[: self.size].max())

    def probabilities(self) -> np.ndarray:
        weights = self.priorities[: self.size] ** self.priority_exponent
        return weights / weights.sum()


def replay_sequence(q: QTable, seq: TransitionSequence, budget: ReplayBudget,
                    log: list[int] | None = None) -> int:
    """Replay ``seq`` from its last step to its first, stopping when the budget runs out."""
    limit = min(len(seq), budget.remaining)
    if limit <= 0:
        return 0
    done = _kernels.replay_reverse(q.values, *seq.arrays(), q.alpha, q.gamma, limit)
    budget.charge(done)
    if log is not None:
        last = len(seq) - 1
        log.extend(range(last, last - done, -1))
    return done


def replay_libraries(q: QTable, lv: VirtualLibrary, lib: SequenceLibrary, budget: ReplayBudget,
                     replay_L_probability: float, rng: np.random.Generator,
                     log: list[int] | None = None) -> int:
    """Replay every virtual sequence, then each library sequence with the given probability."""
    if not 0.0 <= replay_L_probability <= 1.0:
        raise ConfigError(f"replay_L_probability must lie in [0, 1], got {replay_L_probability}")
    total = 0
    for seq in lv.sequences:
        total += replay_sequence(q, seq, budget, log)
    if replay_L_probability > 0.0 and lib.sequences:
        # draw every coin up front so rng consumption does not depend on the budget
        coins = rng.random(len(lib.sequences)) < replay_L_probability
        for seq, chosen in zip(lib.sequences, coins):
            if chosen:
                total += replay_sequence(q, seq, budget, log)
    return total


def uniform_replay(q: QTable, buf: UniformBuffer, budget: ReplayBudget, rng: np.random.Generator,
                   picked: list[int] | None = None) -> int:
    n = budget.remaining if buf.size else 0
    if n <= 0:
        return 0
    if budget.allotted == UNLIMITED:
        raise ConfigError("uniform replay needs a finite budget")
    order = rng.integers(0, buf.size, size=n)
    done = _kernels.replay_indices(q.values, order, *buf.columns(), q.alpha, q.gamma)
    budget.charge(done)
    if picked is not None:
        picked.extend(int(i) for i in order)
    return done


def prioritized_replay(q: QTable, buf: PrioritizedBuffer, budget: ReplayBudget,
                       rng: np.random.Generator, picked: list[int] | None = None) -> int:
    n = budget.remaining if buf.size else 0
    if n <= 0:
        return 0
    if budget.allotted == UNLIMITED:
        raise ConfigError("prioritized replay needs a finite budget")
    size = buf.size
    tree, leaf0 = _kernels.build_tree(buf.priorities[:size] ** buf.priority_exponent)
    uniforms = rng.random(n)
    out = np.zeros(n, dtype=np.int64)
    done = _kernels.replay_prioritized(q.values, tree, leaf0, size, buf.priorities, uniforms,
                                       buf.priority_exponent, buf.priority_floor, *buf.columns(),
                                       q.alpha, q.gamma, out)
    budget.charge(done)
    buf.refresh_max()
    if picked is not None:
        picked.extend(int(i) for i in out)
    return done


class Schedule:
    """Per-episode replay update counts, optionally keyed by seed.

    File format: CSV with columns ``episode,update_count`` and an optional
    leading ``seed`` column when counts differ per seed.
    """

    def __init__(self, counts: dict[tuple[int | None, int], int] | None = None):
        self.counts: dict[tuple[int | None, int], int] = dict(counts or {})

    def record(self, episode: int, count: int, seed: int | None = None) -> None:
        self.counts[(seed, episode)] = count

    def allotment(self, episode: int, seed: int | None = None) -> int:
        if (seed, episode) in self.counts:
            return self.counts[(seed, episode)]
        if (None, episode) in self.counts:
            return self.counts[(None, episode)]
        raise KeyError(f"schedule has no entry for seed={seed} episode={episode}")

    def total(self, seed: int | None = None) -> int:
        return sum(c for (sd, _), c in self.counts.items() if sd == seed)

    def seeds(self) -> list[int | None]:
        return sorted({sd for sd, _ in self.counts}, key=lambda s: (s is not None, s))

    def write(self, path: str | Path) -> None:
        keyed = any(sd is not None for sd, _ in self.counts)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["seed", "episode", "update_count"] if keyed else ["episode", "update_count"])
            for (sd, ep), c in sorted(self.counts.items(), key=lambda kv: (kv[0][0] or 0, kv[0][1])):
                writer.writerow([sd, ep, c] if keyed else [ep, c])

    @classmethod
    def read(cls, path: str | Path) -> "Schedule":
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            fields = reader.fieldnames or []
            missing = {"episode", "update_count"} - set(fields)
            if missing:
                raise ConfigError(f"schedule {path} lacks column(s): {', '.join(sorted(missing))}")
            counts: dict[tuple[int | None, int], int] = {}
            for row in reader:
                seed = int(row["seed"]) if row.get("seed") not in (None, "") else None
                counts[(seed, int(row["episode"]))] = int(row["update_count"])
        return cls(counts)

    @classmethod
    def from_rows(cls, rows: Iterable[tuple[int | None, int, int]]) -> "Schedule":
        counts: dict[tuple[int | None, int], int] = defaultdict(int)
        for seed, episode, count in rows:
            counts[(seed, episode)] = count
        return cls(dict(counts))

"""Recent-transition window, high-reward sequence capture and the replay library.

Sequences carry the secondary-task view of each step: reward, terminal flag and
the TD error observed when the step happened.
"""

from __future__ import annotations

import csv
from collections import deque
from itertools import islice
from dataclasses import dataclass, field
from typing import IO, Iterable

import numpy as np

from .core import ConfigError, ContractError, Transition

SECONDARY = 1


@dataclass
class TransitionSequence:
    """Ordered (state, action, reward) triads plus their successors.

    ``junction`` marks a splice point in a virtual sequence; the contiguity check
    is not applied between ``junction`` and ``junction + 1``.
    """

    states: list[int]
    actions: list[int]
    rewards: list[float]
    next_states: list[int]
    terminals: list[bool]
    td_errors: list[float] | None = None
    created_at: int = 0
    junction: int | None = None
    _arrays: tuple | None = field(default=None, init=False, repr=False, compare=False)
    _first_seen: dict | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        n = len(self.states)
        if n < 1:
            raise ContractError("a transition sequence needs at least one triad")
        lengths = {len(self.actions), len(self.rewards), len(self.next_states), len(self.terminals)}
        if self.td_errors is not None:
            lengths.add(len(self.td_errors))
        if lengths != {n}:
            raise ContractError("parallel lists of a transition sequence differ in length")

    def __len__(self) -> int:
        return len(self.states)

    @property
    def triads(self) -> list[tuple[int, int, float]]:
        return list(zip(self.states, self.actions, self.rewards))

    def is_contiguous(self) -> bool:
        for j in range(len(self) - 1):
            if j == self.junction:
                continue
            if self.next_states[j] != self.states[j + 1]:
                return False
        return True

    def arrays(self) -> tuple[np.ndarray, ...]:
        """(states, actions, rewards, next_states, terminals) as numpy arrays, cached."""
        if self._arrays is None:
            self._arrays = (
                np.asarray(self.states, dtype=np.int64),
                np.asarray(self.actions, dtype=np.int64),
                np.asarray(self.rewards, dtype=np.float64),
                np.asarray(self.next_states, dtype=np.int64),
                np.asarray(self.terminals, dtype=np.bool_),
            )
        return self._arrays

    def first_positions(self) -> dict[int, int]:
        """Earliest index of each state among all but the last triad, cached."""
        if self._first_seen is None:
            seen: dict[int, int] = {}
            for j, s in enumerate(self.states[:-1]):
                seen.setdefault(s, j)
            self._first_seen = seen
        return self._first_seen


def max_abs_td(seq: TransitionSequence) -> float:
    if seq.td_errors is None:
        raise ContractError("sequence carries no TD errors")
    return max(abs(d) for d in seq.td_errors)


class SequenceWindow:
    """The latest ``capacity`` transitions of the current episode (secondary view).

    Stored column-wise: states, actions, rewards, next states, terminals, TD errors.
    """

    def __init__(self, capacity: int, task: int = SECONDARY):
        if capacity < 1:
            raise ConfigError(f"window capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self.task = task
        self.columns: tuple[deque, ...] = tuple(deque(maxlen=capacity) for _ in range(6))
        self._abs_td: deque[float] = deque(maxlen=capacity)

    def __len__(self) -> int:
        return len(self._abs_td)

    @property
    def buffer(self) -> list[tuple]:
        return list(zip(*self.columns))

    @property
    def last_reward(self) -> float:
        return self.columns[2][-1]

    def clear(self) -> None:
        for col in self.columns:
            col.clear()
        self._abs_td.clear()

    def max_abs_td(self, last: int | None = None) -> float:
        """Largest |TD error| among the newest ``last`` steps, without building a sequence."""
        if not self._abs_td:
            raise ContractError("empty window")
        return max(islice(self._abs_td, self._start(last), None))

    def _start(self, last: int | None) -> int:
        n = len(self._abs_td)
        return 0 if last is None or last >= n else n - last

    def as_sequence(self, last: int | None = None, created_at: int = 0) -> TransitionSequence | None:
        if not self._abs_td:
            return None
        i = self._start(last)
        s, a, r, s2, term, delta = (list(islice(col, i, None)) for col in self.columns)
        return TransitionSequence(s, a, r, s2, term, delta, created_at=created_at)


def push_step(window: SequenceWindow, t: Transition, delta: float) -> None:
    task = window.task
    s, a, r, s2, term, d = window.columns
    s.append(t.state)
    a.append(t.action)
    r.append(t.rewards[task])
    s2.append(t.next_state)
    term.append(t.terminal[task])
    d.append(delta)
    window._abs_td.append(abs(delta))


def capture_on_high_reward(window: SequenceWindow, m_t: int, threshold: float,
                           created_at: int = 0) -> TransitionSequence | None:
    """Return the newest ``m_t`` steps if the newest reward reaches ``threshold``."""
    if m_t < 1:
        raise ConfigError(f"m_t must be >= 1, got {m_t}")
    if not len(window) or window.last_reward < threshold:
        return None
    return window.as_sequence(last=m_t, created_at=created_at)


class SequenceLibrary:
    """Bounded, tau-gated store of high-TD-error sequences, oldest first."""

    def __init__(self, capacity: int = 50, tau: float = 1.0):
        if capacity < 1:
            raise ConfigError(f"library capacity must be >= 1, got {capacity}")
        if tau <= 0:
            raise ConfigError(f"tau must be > 0, got {tau}")
        self.capacity = capacity
        self.tau = tau
        self.sequences: list[TransitionSequence] = []
        self._scores: list[float] = []

    def __len__(self) -> int:
        return len(self.sequences)

    def __iter__(self):
        return iter(self.sequences)

    @property
    def scores(self) -> list[float]:
        """max |TD error| of each stored sequence, aligned with ``sequences``."""
        return self._scores


def accepts(w_new: float, stored: Iterable[float], tau: float) -> bool:
    """The library gate: strict ``w_new * tau > max(stored)``; empty store accepts."""
    stored = list(stored)
    if not stored:
        return True
    return w_new * tau > max(stored)


def consider_for_library(lib: SequenceLibrary, candidate: TransitionSequence,
                         w_new: float | None = None) -> bool:
    """Gate ``candidate`` into ``lib``; ``w_new`` may carry its precomputed max |TD error|."""
    if w_new is None:
        w_new = max_abs_td(candidate)
    if not accepts(w_new, lib._scores, lib.tau):
        return False
    lib.sequences.append(candidate)
    lib._scores.append(w_new)
    if len(lib.sequences) > lib.capacity:
        drop = len(lib.sequences) - lib.capacity
        del lib.sequences[:drop]
        del lib._scores[:drop]
    return True


def dump_library_csv(lib: SequenceLibrary, fh: IO[str], episode: int, header: bool = False) -> None:
    writer = csv.writer(fh)
    if header:
        writer.writerow(["episode", "length", "W"])
    for seq, w in zip(lib.sequences, lib._scores):
        writer.writerow([episode, len(seq), repr(w)])

"""Tabular Q-learning primitives.

    Q(s, a) <- Q(s, a) + alpha * [r + gamma * max_a' Q(s', a') - Q(s, a)]

The bootstrap term is dropped when the transition ends in an absorbing goal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class ContractError(ValueError):
    """Raised when an operation is called with arguments outside its domain."""


class ConfigError(ValueError):
    """Raised for invalid experiment or learner parameters."""


@dataclass(frozen=True)
class Transition:
    """One environment step.

    ``rewards`` and ``terminal`` hold one entry per task, primary first.
    """

    state: int
    action: int
    rewards: tuple[float, ...]
    next_state: int
    terminal: tuple[bool, ...]


@dataclass
class QTable:
    num_states: int
    num_actions: int
    alpha: float = 0.3
    gamma: float = 0.9
    values: np.ndarray = field(default=None, repr=False)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.num_states < 1 or self.num_actions < 1:
            raise ConfigError("QTable needs at least one state and one action")
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must lie in [0, 1], got {self.alpha}")
        if not 0.0 <= self.gamma < 1.0:
            raise ConfigError(f"gamma must lie in [0, 1), got {self.gamma}")
        shape = (self.num_states, self.num_actions)
        if self.values is None:
            self.values = np.zeros(shape, dtype=np.float64)
        else:
            self.values = np.array(self.values, dtype=np.float64)
            if self.values.shape != shape:
                raise ConfigError(f"values shape {self.values.shape} != {shape}")

    def copy(self) -> "QTable":
        return QTable(self.num_states, self.num_actions, self.alpha, self.gamma, self.values.copy())

    def _check(self, s: int, a: int, s_next: int | None = None) -> None:
        if not 0 <= s < self.num_states:
            raise ContractError(f"state {s} out of range [0, {self.num_states})")
        if not 0 <= a < self.num_actions:
            raise ContractError(f"action {a} out of range [0, {self.num_actions})")
        if s_next is not None and not 0 <= s_next < self.num_states:
            raise ContractError(f"next state {s_next} out of range [0, {self.num_states})")


def td_error(q: QTable, s: int, a: int, r: float, s_next: int, terminal: bool) -> float:
    q._check(s, a, s_next)
    values = q.values
    bootstrap = 0.0 if terminal else max(values[s_next].tolist())
    return r + q.gamma * bootstrap - float(values[s, a])


def q_update(q: QTable, s: int, a: int, r: float, s_next: int, terminal: bool) -> float:
    """Apply one Q-learning step in place and return the TD error used."""
    delta = td_error(q, s, a, r, s_next, terminal)
    q.values[s, a] += q.alpha * delta
    return delta


def _argmax_random(row: np.ndarray, rng: np.random.Generator) -> int:
    # plain lists beat numpy for rows of a handful of actions
    vals = row.tolist()
    top = max(vals)
    best = [i for i, v in enumerate(vals) if v == top]
    if len(best) == 1:
        return best[0]
    return best[int(rng.integers(len(best)))]


def greedy_action(q: QTable, s: int, rng: np.random.Generator) -> int:
    """Argmax over Q(s, .) with uniform random tie-breaking."""
    if not 0 <= s < q.num_states:
        raise ContractError(f"state {s} out of range [0, {q.num_states})")
    return _argmax_random(q.values[s], rng)


def epsilon_greedy(q: QTable, s: int, epsilon: float, rng: np.random.Generator) -> int:
    if not 0.0 <= epsilon <= 1.0:
        raise ConfigError(f"epsilon must lie in [0, 1], got {epsilon}")
    # epsilon == 0 must not consume a draw so it stays identical to greedy_action
    if epsilon > 0.0 and rng.random() < epsilon:
        if not 0 <= s < q.num_states:
            raise ContractError(f"state {s} out of range [0, {q.num_states})")
        return int(rng.integers(q.num_actions))
    return greedy_action(q, s, rng)


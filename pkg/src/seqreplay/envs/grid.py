"""Noisy navigation grid with a primary and a secondary goal cell.

Layout text uses ``.`` free, ``#`` obstacle, ``S`` start, ``1`` primary goal and
``2`` secondary goal. State ids are ``row * width + col``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from ..core import ContractError
from .base import StepOutcome

# (d_row, d_col); row grows downward
MOVES = (
    (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1),
    (0, 0),
)
ACTION_NAMES = ("N", "NE", "E", "SE", "S", "SW", "W", "NW", "hold")
HOLD = 8
DEVIATIONS = tuple((dr, dc) for dr in (-1, 0, 1) for dc in (-1, 0, 1) if (dr, dc) != (0, 0))


class LayoutError(ValueError):
    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


@dataclass
class GridWorld:
    width: int
    height: int
    obstacles: np.ndarray  # bool, shape (height, width)
    start: tuple[int, int]
    goal_primary: tuple[int, int]
    goal_secondary: tuple[int, int]
    move_noise: float = 0.2
    goal_reward: float = 100.0
    bump_penalty: float = -100.0
    living_penalty: float = -10.0
    max_steps: int = 500
    warnings: list[str] = field(default_factory=list)

    num_actions = len(MOVES)

    def __post_init__(self) -> None:
        self.obstacles = np.asarray(self.obstacles, dtype=bool)
        if self.obstacles.shape != (self.height, self.width):
            raise LayoutError([f"obstacle map shape {self.obstacles.shape} != {(self.height, self.width)}"])
        for name in ("start", "goal_primary", "goal_secondary"):
            r, c = getattr(self, name)
            if not self.free(r, c):
                raise LayoutError([f"{name} {(r, c)} is not a free cell"])
        self._blocked = self.obstacles.ravel().tolist()
        self._p1 = self.encode(*self.goal_primary)
        self._p2 = self.encode(*self.goal_secondary)

    @property
    def num_states(self) -> int:
        return self.width * self.height

    @property
    def start_state(self) -> int:
        return self.encode(*self.start)

    def encode(self, row: int, col: int) -> int:
        return row * self.width + col

    def decode(self, s: int) -> tuple[int, int]:
        return divmod(s, self.width)

    def free(self, row: int, col: int) -> bool:
        return 0 <= row < self.height and 0 <= col < self.width and not self.obstacles[row, col]

    def is_goal(self, s: int, task: int) -> bool:
        return s == (self._p1 if task == 0 else self._p2)

    def eval_states(self) -> np.ndarray:
        cells = np.flatnonzero(~self.obstacles.ravel())
        return cells[(cells != self._p1) & (cells != self._p2)]

    def step(self, s: int, a: int, rng: np.random.Generator) -> StepOutcome:
        return grid_step(self, s, a, rng)

    def summary(self) -> str:
        return (f"{self.width}x{self.height} grid, start {self.start}, P1 {self.goal_primary}, "
                f"P2 {self.goal_secondary}, {int(self.obstacles.sum())} obstacles")


def grid_step(env: GridWorld, s: int, a: int, rng: np.random.Generator) -> StepOutcome:
    """One noisy move; bumping into an obstacle or the border leaves the agent in place."""
    if not 0 <= s < env.num_states or env._blocked[s]:
        raise ContractError(f"state {s} is not a free cell")
    if not 0 <= a < len(MOVES):
        raise ContractError(f"action {a} out of range [0, {len(MOVES)})")
    row, col = divmod(s, env.width)
    dr, dc = MOVES[a]
    if env.move_noise > 0.0 and rng.random() < env.move_noise:
        er, ec = DEVIATIONS[rng.integers(len(DEVIATIONS))]
        dr += er
        dc += ec
    r2, c2 = row + dr, col + dc
    if not (0 <= r2 < env.height and 0 <= c2 < env.width) or env._blocked[r2 * env.width + c2]:
        return StepOutcome(s, env.bump_penalty, env.bump_penalty, False, False)
    s2 = r2 * env.width + c2
    hit1 = s2 == env._p1
    hit2 = s2 == env._p2
    return StepOutcome(
        s2,
        env.goal_reward if hit1 else env.living_penalty,
        env.goal_reward if hit2 else env.living_penalty,
        hit1,
        hit2,
    )


def _blocked_sides(obstacles: np.ndarray, row: int, col: int) -> int:
    h, w = obstacles.shape
    blocked = 0
    for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
        r, c = row + dr, col + dc
        if not (0 <= r < h and 0 <= c < w) or obstacles[r, c]:
            blocked += 1
    return blocked


def parse_layout(text: str, **params) -> GridWorld:
    """Build a GridWorld from layout text, reporting every problem at once."""
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    errors: list[str] = []
    if not lines:
        raise LayoutError(["layout is empty"])
    width = len(lines[0])
    markers: dict[str, list[tuple[int, int]]] = {"S": [], "1": [], "2": []}
    obstacles = np.zeros((len(lines), width), dtype=bool)
    for r, line in enumerate(lines):
        if len(line) != width:
            errors.append(f"line {r + 1}: width {len(line)} differs from first line width {width}")
        for c, ch in enumerate(line):
            if ch == "#":
                if c < width:
                    obstacles[r, c] = True
            elif ch in markers:
                markers[ch].append((r, c))
            elif ch != ".":
                errors.append(f"line {r + 1}, column {c + 1}: unknown character {ch!r}")
    names = {"S": "start", "1": "primary goal", "2": "secondary goal"}
    for ch, found in markers.items():
        if not found:
            errors.append(f"missing {names[ch]} marker '{ch}'")
        elif len(found) > 1:
            where = ", ".join(f"line {r + 1} column {c + 1}" for r, c in found)
            errors.append(f"duplicate {names[ch]} marker '{ch}' at {where}")
    if errors:
        raise LayoutError(errors)
    warnings = []
    p2 = markers["2"][0]
    if _blocked_sides(obstacles, *p2) != 3:
        warnings.append(f"secondary goal at line {p2[0] + 1} column {p2[1] + 1} is not walled on exactly three sides")
    return GridWorld(width, len(lines), obstacles, markers["S"][0], markers["1"][0], p2,
                     warnings=warnings, **params)


def default_layout_text() -> str:
    return resources.files("seqreplay.envs").joinpath("layouts/default.txt").read_text()


def load_layout(path: str | Path | None = None, **params) -> GridWorld:
    text = default_layout_text() if path is None else Path(path).read_text()
    return parse_layout(text, **params)

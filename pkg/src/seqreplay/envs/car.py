"""Discretized mountain car on the hill y = exp(-x/2) * sin(4x).

The primary goal is the right peak and the secondary goal the higher, steeper
left peak. Position and velocity are binned into a 120 x 100 grid; a step
decodes the current cell to a uniformly drawn point inside it, applies the
continuous update and rebins, so sub-cell motion is kept in expectation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .base import StepOutcome

PUSH_LEFT, COAST, PUSH_RIGHT = 0, 1, 2


def hill(x: float) -> float:
    return math.exp(-0.5 * x) * math.sin(4.0 * x)


def hill_slope(x: float) -> float:
    return math.exp(-0.5 * x) * (4.0 * math.cos(4.0 * x) - 0.5 * math.sin(4.0 * x))


def extremum(k: int) -> float:
    """k-th stationary point of the hill: tan(4x) = 8."""
    return (math.atan(8.0) + k * math.pi) / 4.0


@dataclass
class MountainCar:
    x_min: float = -1.5
    x_max: float = 0.6
    v_max: float = 0.07
    n_x: int = 120
    n_v: int = 100
    force_gain: float = 0.001
    gravity_gain: float = 0.0025
    goal_primary_x: float = extremum(0)  # right peak, ~0.3616
    goal_secondary_x: float = extremum(-2)  # left peak, ~-1.2092
    goal_reward: float = 100.0
    living_penalty: float = -1.0
    max_steps: int = 1000

    num_actions = 3

    def __post_init__(self) -> None:
        self._dx = (self.x_max - self.x_min) / self.n_x
        self._dv = 2.0 * self.v_max / self.n_v
        self._p1_bin = self.x_bin(self.goal_primary_x)
        self._p2_bin = self.x_bin(self.goal_secondary_x)

    @property
    def num_states(self) -> int:
        return self.n_x * self.n_v

    @property
    def trough(self) -> float:
        return extremum(-1)

    @property
    def start_state(self) -> int:
        return self.encode(self.x_bin(self.trough), self.v_bin(0.0))

    def x_bin(self, x: float) -> int:
        return min(self.n_x - 1, max(0, int((x - self.x_min) / self._dx)))

    def v_bin(self, v: float) -> int:
        return min(self.n_v - 1, max(0, int((v + self.v_max) / self._dv)))

    def encode(self, xb: int, vb: int) -> int:
        return xb * self.n_v + vb

    def decode(self, s: int) -> tuple[int, int]:
        return divmod(s, self.n_v)

    def cell_bounds(self, s: int) -> tuple[float, float, float, float]:
        xb, vb = self.decode(s)
        x0 = self.x_min + xb * self._dx
        v0 = -self.v_max + vb * self._dv
        return x0, x0 + self._dx, v0, v0 + self._dv

    def is_goal(self, s: int, task: int) -> bool:
        xb = s // self.n_v
        return xb >= self._p1_bin if task == 0 else xb <= self._p2_bin

    def eval_states(self) -> np.ndarray:
        xb = np.arange(self.num_states) // self.n_v
        return np.flatnonzero((xb < self._p1_bin) & (xb > self._p2_bin))

    def step(self, s: int, a: int, rng: np.random.Generator) -> StepOutcome:
        return car_step(self, s, a, rng)


def car_dynamics(env: MountainCar, x: float, v: float, u: int) -> tuple[float, float]:
    """Continuous update for thrust ``u`` in {-1, 0, +1}; hitting a wall stops the car."""
    slope = hill_slope(x)
    sin_theta = slope / math.sqrt(1.0 + slope * slope)
    v2 = v + env.force_gain * u - env.gravity_gain * sin_theta
    v2 = min(env.v_max, max(-env.v_max, v2))
    x2 = x + v2
    if x2 <= env.x_min:
        x2, v2 = env.x_min, 0.0
    elif x2 >= env.x_max:
        x2, v2 = env.x_max, 0.0
    return x2, v2


def car_step(env: MountainCar, s: int, a: int, rng: np.random.Generator) -> StepOutcome:
    x_lo, x_hi, v_lo, v_hi = env.cell_bounds(s)
    jitter = rng.random(2)
    x = x_lo + jitter[0] * (x_hi - x_lo)
    v = v_lo + jitter[1] * (v_hi - v_lo)
    x2, v2 = car_dynamics(env, x, v, a - 1)
    xb = env.x_bin(x2)
    s2 = env.encode(xb, env.v_bin(v2))
    hit1 = xb >= env._p1_bin
    hit2 = xb <= env._p2_bin
    return StepOutcome(
        s2,
        env.goal_reward if hit1 else env.living_penalty,
        env.goal_reward if hit2 else env.living_penalty,
        hit1,
        hit2,
    )

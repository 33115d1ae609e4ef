"""Discrete benchmark environments sharing one step contract.

Every environment exposes ``num_states``, ``num_actions``, ``start_state``,
``eval_states`` (valid non-goal states) and ``step(s, a, rng) -> StepOutcome``.
Both task rewards are emitted on every step; the primary task comes first.
"""

from .base import StepOutcome
from .car import MountainCar, car_dynamics, car_step
from .grid import GridWorld, LayoutError, default_layout_text, grid_step, load_layout, parse_layout

__all__ = [
    "GridWorld",
    "LayoutError",
    "MountainCar",
    "StepOutcome",
    "car_dynamics",
    "car_step",
    "default_layout_text",
    "grid_step",
    "load_layout",
    "parse_layout",
]

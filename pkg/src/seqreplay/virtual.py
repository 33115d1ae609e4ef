"""Virtual transition sequences: splice the recent window onto stored sequences.

A virtual sequence keeps the window's steps up to a shared state and continues
with the stored sequence's steps after that state, so value from the stored
high-reward tail flows back into states the stored sequence never visited.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from typing import IO

import numpy as np

from .core import ConfigError, ContractError
from .seqlib import SequenceLibrary, TransitionSequence, max_abs_td


class JunctionMode(str, Enum):
    BEHAVIOR = "behavior"  # junction triad taken from the window
    TARGET = "target"  # junction triad taken from the stored sequence


@dataclass(frozen=True)
class Junction:
    b_index: int
    t_index: int
    state: int


class VirtualLibrary:
    def __init__(self, capacity: int = 50):
        if capacity < 1:
            raise ConfigError(f"virtual library capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self.sequences: list[TransitionSequence] = []
        self.junctions: list[tuple[int, Junction]] = []

    def __len__(self) -> int:
        return len(self.sequences)

    def __iter__(self):
        return iter(self.sequences)


def find_junction(theta_b: TransitionSequence, theta_t: TransitionSequence) -> Junction | None:
    """Latest window position whose state also occurs in ``theta_t`` before its last step.

    Among matches at that window position the earliest ``theta_t`` position wins,
    which gives the longest stored suffix.
    """
    first_seen = theta_t.first_positions()
    if not first_seen:
        return None
    for i in range(len(theta_b) - 1, -1, -1):
        j = first_seen.get(theta_b.states[i])
        if j is not None:
            return Junction(i, j, theta_b.states[i])
    return None


def splice(theta_b: TransitionSequence, theta_t: TransitionSequence, junction: Junction,
           junction_mode: JunctionMode | str = JunctionMode.BEHAVIOR) -> TransitionSequence:
    mode = JunctionMode(junction_mode)
    i, j = junction.b_index, junction.t_index
    if not (0 <= i < len(theta_b) and 0 <= j < len(theta_t) - 1):
        raise ContractError(f"junction {junction} out of range")
    if theta_b.states[i] != junction.state or theta_t.states[j] != junction.state:
        raise ContractError(f"junction {junction} does not join equal states")

    states = theta_b.states[: i + 1] + theta_t.states[j + 1:]
    actions = theta_b.actions[: i + 1] + theta_t.actions[j + 1:]
    rewards = theta_b.rewards[: i + 1] + theta_t.rewards[j + 1:]
    # the junction step bootstraps from the spliced successor
    next_states = theta_b.next_states[:i] + theta_t.next_states[j:]
    terminals = theta_b.terminals[:i] + theta_t.terminals[j:]
    td_errors = None
    if theta_b.td_errors is not None and theta_t.td_errors is not None:
        td_errors = theta_b.td_errors[: i + 1] + theta_t.td_errors[j + 1:]
    if mode is JunctionMode.TARGET:
        actions[i] = theta_t.actions[j]
        rewards[i] = theta_t.rewards[j]
        if td_errors is not None:
            td_errors[i] = theta_t.td_errors[j]  # type: ignore[index]
    out = TransitionSequence(states, actions, rewards, next_states, terminals, td_errors,
                             created_at=theta_b.created_at, junction=i)
    # numpy views for the replay kernel, assembled from the parents' cached arrays
    bs, ba, br, bn, bt = theta_b.arrays()
    ts, ta, tr, tn, tt = theta_t.arrays()
    arrays = (
        np.concatenate((bs[: i + 1], ts[j + 1:])),
        np.concatenate((ba[: i + 1], ta[j + 1:])),
        np.concatenate((br[: i + 1], tr[j + 1:])),
        np.concatenate((bn[:i], tn[j:])),
        np.concatenate((bt[:i], tt[j:])),
    )
    if mode is JunctionMode.TARGET:
        arrays[1][i] = ta[j]
        arrays[2][i] = tr[j]
    out._arrays = arrays
    return out


def rebuild_virtual_library(lv: VirtualLibrary, theta_b: TransitionSequence | None,
                            lib: SequenceLibrary,
                            junction_mode: JunctionMode | str = JunctionMode.BEHAVIOR) -> int:
    """Replace the contents of ``lv`` with one splice per intersecting library entry."""
    built: list[tuple[TransitionSequence, int, Junction]] = []
    if theta_b is not None:
        for k, theta_t in enumerate(lib.sequences):
            junction = find_junction(theta_b, theta_t)
            if junction is not None:
                built.append((splice(theta_b, theta_t, junction, junction_mode), k, junction))
    if len(built) > lv.capacity:
        # stable sort keeps library order among equal scores
        built = sorted(built, key=lambda item: -max_abs_td(item[0]))[: lv.capacity]
    lv.sequences = [seq for seq, _, _ in built]
    lv.junctions = [(k, junction) for _, k, junction in built]
    return len(lv.sequences)


def dump_junctions_csv(lv: VirtualLibrary, fh: IO[str], episode: int, header: bool = False) -> None:
    writer = csv.writer(fh)
    if header:
        writer.writerow(["episode", "library_index", "b_index", "t_index"])
    for k, junction in lv.junctions:
        writer.writerow([episode, k, junction.b_index, junction.t_index])

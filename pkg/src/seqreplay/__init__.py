"""Tabular off-policy Q-learning with replay of selected and spliced transition sequences."""

from .config import ExperimentConfig, load_config
from .core import ConfigError, ContractError, QTable, Transition, q_update, td_error
from .experiments import ExperimentResult, run_experiment, sweep
from .replay import ReplayBudget, Schedule
from .seqlib import SequenceLibrary, SequenceWindow, TransitionSequence
from .virtual import JunctionMode, VirtualLibrary

__all__ = [
    "ConfigError", "ContractError", "ExperimentConfig", "ExperimentResult", "JunctionMode", "QTable",
    "ReplayBudget", "Schedule", "SequenceLibrary", "SequenceWindow", "Transition", "TransitionSequence",
    "VirtualLibrary", "load_config", "q_update", "run_experiment", "sweep", "td_error",
]
__version__ = "0.1.0"

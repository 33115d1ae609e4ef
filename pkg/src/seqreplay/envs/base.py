from __future__ import annotations

from dataclasses import dataclass

from ..core import Transition


@dataclass(frozen=True)
class StepOutcome:
    next_state: int
    reward_primary: float
    reward_secondary: float
    terminal_primary: bool
    terminal_secondary: bool

    def transition(self, state: int, action: int) -> Transition:
        return Transition(state, action, (self.reward_primary, self.reward_secondary),
                          self.next_state, (self.terminal_primary, self.terminal_secondary))

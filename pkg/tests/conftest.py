import pytest

from seqreplay.seqlib import TransitionSequence


def make_seq(states, td_errors=None, actions=None, rewards=None, next_states=None, terminals=None,
             junction=None):
    """Contiguous sequence over ``states``; the last step leaves to a state outside ``states`` unless given."""
    n = len(states)
    if next_states is None:
        next_states = list(states[1:]) + [max(states) + 1]
    return TransitionSequence(
        list(states),
        list(actions) if actions is not None else [0] * n,
        list(rewards) if rewards is not None else [0.0] * n,
        list(next_states),
        list(terminals) if terminals is not None else [False] * n,
        list(td_errors) if td_errors is not None else [0.0] * n,
        junction=junction,
    )


@pytest.fixture
def seq_factory():
    return make_seq


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion for the terminal summary."""

    def record(label: str, ok: bool, detail: str) -> bool:
        line = f"{label}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        ACCEPTANCE_LINES.append(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

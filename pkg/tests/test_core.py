import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seqreplay.core import (ConfigError, ContractError, QTable, epsilon_greedy, greedy_action,
                            q_update, td_error)


def oracle_td(q_sa, r, next_row, terminal, gamma):
    boot = 0.0 if terminal else max(next_row)
    return r + gamma * boot - q_sa


def test_td_error_zero_table():
    q = QTable(4, 3, alpha=0.3, gamma=0.9)
    assert td_error(q, 0, 1, -10.0, 2, False) == -10.0


def test_td_error_self_consistent_value_is_zero():
    q = QTable(4, 3, alpha=0.3, gamma=0.9)
    q.values[2] = [1.0, 4.0, 2.0]
    q.values[0, 1] = 1.0 + 0.9 * 4.0
    assert td_error(q, 0, 1, 1.0, 2, False) == pytest.approx(0.0, abs=1e-12)


def test_td_error_hand_value():
    q = QTable(4, 3, gamma=0.9)
    q.values[0, 0] = 2.0
    q.values[1] = [5.0, -1.0, 3.0]
    assert td_error(q, 0, 0, 1.0, 1, False) == pytest.approx(3.5)


def test_td_error_terminal_ignores_next_row():
    q = QTable(3, 2, gamma=0.9)
    base = td_error(q, 0, 0, 5.0, 1, True)
    q.values[1] = [1e6, -1e6]
    assert td_error(q, 0, 0, 5.0, 1, True) == base == 5.0


@pytest.mark.parametrize("args", [(4, 0, 0.0, 0), (0, 3, 0.0, 0), (0, 0, 0.0, 9), (-1, 0, 0.0, 0)])
def test_index_errors(args):
    q = QTable(4, 3)
    s, a, r, s2 = args
    with pytest.raises(ContractError):
        td_error(q, s, a, r, s2, False)
    with pytest.raises(ContractError):
        q_update(q, s, a, r, s2, False)


def test_q_update_alpha_zero_leaves_table():
    q = QTable(3, 2, alpha=0.0, gamma=0.9)
    q.values[1] = [2.0, 1.0]
    before = q.values.copy()
    delta = q_update(q, 0, 1, 1.0, 1, False)
    assert delta == pytest.approx(1.0 + 0.9 * 2.0)
    np.testing.assert_array_equal(q.values, before)


def test_q_update_one_step():
    q = QTable(3, 2, alpha=0.3, gamma=0.9)
    q_update(q, 0, 1, -10.0, 1, False)
    assert q.values[0, 1] == pytest.approx(-3.0)


def test_q_update_terminal_iterates():
    q = QTable(2, 1, alpha=0.3, gamma=0.9)
    q_update(q, 0, 0, 100.0, 1, True)
    assert q.values[0, 0] == pytest.approx(30.0)
    q_update(q, 0, 0, 100.0, 1, True)
    assert q.values[0, 0] == pytest.approx(51.0)


@settings(max_examples=200, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    s=st.integers(0, 5), a=st.integers(0, 3), s2=st.integers(0, 5),
    r=st.floats(-100, 100), terminal=st.booleans(),
    alpha=st.floats(0.0, 1.0), gamma=st.floats(0.0, 0.99),
)
def test_q_update_changes_exactly_one_cell(seed, s, a, s2, r, terminal, alpha, gamma):
    rng = np.random.default_rng(seed)
    q = QTable(6, 4, alpha=alpha, gamma=gamma, values=rng.normal(0, 10, (6, 4)))
    before = q.values.copy()
    expected = oracle_td(before[s, a], r, list(before[s2]), terminal, gamma)
    delta = q_update(q, s, a, r, s2, terminal)
    assert delta == pytest.approx(expected, abs=1e-9)
    changed = np.argwhere(q.values != before)
    assert len(changed) <= 1
    assert q.values[s, a] - before[s, a] == pytest.approx(alpha * delta, abs=1e-9)


@given(alpha=st.floats(0.05, 1.0), r=st.floats(-100, 100))
def test_terminal_update_converges_to_reward(alpha, r):
    q = QTable(2, 1, alpha=alpha, gamma=0.9)
    errors = []
    for _ in range(400):
        q_update(q, 0, 0, r, 1, True)
        errors.append(abs(q.values[0, 0] - r))
    assert errors[-1] <= abs(r) * (1 - alpha) ** 400 + 1e-9
    assert all(b <= a + 1e-12 for a, b in zip(errors, errors[1:]))


def test_greedy_unique_argmax():
    q = QTable(1, 3, values=[[1.0, 5.0, 2.0]])
    rng = np.random.default_rng(0)
    assert {greedy_action(q, 0, rng) for _ in range(50)} == {1}


def test_greedy_full_tie_is_uniform():
    q = QTable(1, 3)
    rng = np.random.default_rng(1)
    counts = np.bincount([greedy_action(q, 0, rng) for _ in range(9000)], minlength=3)
    # binomial(9000, 1/3): sd ~ 44.7, allow 5 sd
    assert np.all(np.abs(counts - 3000) < 5 * 44.7)


def test_greedy_two_way_tie():
    q = QTable(1, 3, values=[[4.0, 4.0, 1.0]])
    rng = np.random.default_rng(2)
    counts = np.bincount([greedy_action(q, 0, rng) for _ in range(10_000)], minlength=3)
    assert counts[2] == 0
    # binomial(10000, 0.5): sd = 50
    assert abs(counts[0] - 5000) < 4 * 50


@given(shift=st.floats(-1e3, 1e3), seed=st.integers(0, 1000))
def test_greedy_invariant_under_row_shift(shift, seed):
    row = np.array([0.5, 2.0, -1.0, 1.5])
    a = greedy_action(QTable(1, 4, values=[row]), 0, np.random.default_rng(seed))
    b = greedy_action(QTable(1, 4, values=[row + shift]), 0, np.random.default_rng(seed))
    assert a == b == 1


def test_epsilon_zero_matches_greedy():
    q = QTable(2, 4, values=np.zeros((2, 4)))
    r1, r2 = np.random.default_rng(5), np.random.default_rng(5)
    assert [epsilon_greedy(q, 0, 0.0, r1) for _ in range(200)] == [greedy_action(q, 0, r2) for _ in range(200)]


def test_epsilon_one_is_uniform():
    q = QTable(1, 3, values=[[9.0, 0.0, 0.0]])
    rng = np.random.default_rng(3)
    counts = np.bincount([epsilon_greedy(q, 0, 1.0, rng) for _ in range(9000)], minlength=3)
    assert np.all(np.abs(counts - 3000) < 5 * 44.7)


def test_epsilon_point_one_frequency():
    q = QTable(1, 3, values=[[9.0, 0.0, 0.0]])
    rng = np.random.default_rng(4)
    n = 30_000
    hits = sum(epsilon_greedy(q, 0, 0.1, rng) == 0 for _ in range(n))
    p = 0.9 + 0.1 / 3
    sd = np.sqrt(n * p * (1 - p))
    assert abs(hits - n * p) < 4 * sd


@pytest.mark.parametrize("eps", [-0.1, 1.5])
def test_epsilon_out_of_range(eps):
    with pytest.raises(ConfigError):
        epsilon_greedy(QTable(1, 2), 0, eps, np.random.default_rng(0))


def test_qtable_shape_and_params():
    q = QTable(5, 2)
    assert q.values.shape == (5, 2) and not q.values.any()
    with pytest.raises(ConfigError):
        QTable(5, 2, gamma=1.0)
    with pytest.raises(ConfigError):
        QTable(5, 2, values=np.zeros((2, 5)))

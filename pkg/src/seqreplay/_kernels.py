"""Compiled inner loops for replay. Each loop applies the same update as core.q_update."""

import numba
import numpy as np


@numba.njit(cache=True)
def _update(values, s, a, r, s2, term, alpha, gamma):
    boot = 0.0
    if not term:
        boot = values[s2, 0]
        for k in range(1, values.shape[1]):
            if values[s2, k] > boot:
                boot = values[s2, k]
    delta = r + gamma * boot - values[s, a]
    values[s, a] += alpha * delta
    return delta


@numba.njit(cache=True)
def replay_reverse(values, states, actions, rewards, next_states, terminals, alpha, gamma, limit):
    n = states.shape[0]
    count = 0
    j = n - 1
    while j >= 0 and count < limit:
        _update(values, states[j], actions[j], rewards[j], next_states[j], terminals[j], alpha, gamma)
        count += 1
        j -= 1
    return count


@numba.njit(cache=True)
def replay_indices(values, order, states, actions, rewards, next_states, terminals, alpha, gamma):
    for k in range(order.shape[0]):
        i = order[k]
        _update(values, states[i], actions[i], rewards[i], next_states[i], terminals[i], alpha, gamma)
    return order.shape[0]


@numba.njit(cache=True)
def _tree_set(tree, leaf0, i, value):
    node = leaf0 + i
    tree[node] = value
    node //= 2
    while node >= 1:
        tree[node] = tree[2 * node] + tree[2 * node + 1]
        node //= 2


@numba.njit(cache=True)
def _tree_find(tree, leaf0, size, u):
    node = 1
    while node < leaf0:
        left = 2 * node
        if u < tree[left] or tree[left + 1] <= 0.0:
            node = left
        else:
            u -= tree[left]
            node = left + 1
    i = node - leaf0
    if i >= size:
        i = size - 1
    return i


@numba.njit(cache=True)
def replay_prioritized(values, tree, leaf0, size, priorities, uniforms, exponent, floor,
                       states, actions, rewards, next_states, terminals, alpha, gamma, picked):
    for k in range(uniforms.shape[0]):
        i = _tree_find(tree, leaf0, size, uniforms[k] * tree[1])
        picked[k] = i
        delta = _update(values, states[i], actions[i], rewards[i], next_states[i], terminals[i],
                        alpha, gamma)
        p = abs(delta) + floor
        priorities[i] = p
        _tree_set(tree, leaf0, i, p ** exponent)
    return uniforms.shape[0]


def build_tree(leaves: np.ndarray) -> tuple[np.ndarray, int]:
    """Sum tree over ``leaves`` stored heap-style; returns (tree, index of first leaf)."""
    n = max(1, len(leaves))
    leaf0 = 1 << (n - 1).bit_length()
    tree = np.zeros(2 * leaf0, dtype=np.float64)
    tree[leaf0:leaf0 + len(leaves)] = leaves
    level = leaf0
    while level > 1:
        tree[level // 2:level] = tree[level:2 * level:2] + tree[level + 1:2 * level:2]
        level //= 2
    return tree, leaf0

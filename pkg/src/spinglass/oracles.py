"""Independently coded naive reference implementations.

Straight scalar loops, kept deliberately free of the vectorized code paths
they are used to cross-check.  Only intended for small n.
"""

from __future__ import annotations

import math

import numpy as np

from .bp import Couplings, MessageSet
from .models import SbmInstance


def naive_amp_step(
    v_current: np.ndarray, v_previous: np.ndarray, observation: np.ndarray, lam: float
) -> np.ndarray:
    """One corrected AMP step as explicit double loops."""
    n = v_current.size
    f_cur = [math.tanh(lam * v_current[i]) for i in range(n)]
    f_prev = [math.tanh(lam * v_previous[i]) for i in range(n)]
    norm_sq = sum(f * f for f in f_cur)
    b_t = lam * (1.0 - norm_sq / n)
    out = np.zeros(n)
    for i in range(n):
        acc = 0.0
        for j in range(n):
            acc += observation[i, j] * f_cur[j]
        out[i] = acc - b_t * f_prev[i]
    return out


def naive_bp_full_step(
    graph: SbmInstance,
    messages: MessageSet,
    beliefs: np.ndarray,
    couplings: Couplings,
) -> tuple[dict[tuple[int, int], float], np.ndarray]:
    """One full BP sweep with explicit non-neighbor enumeration (O(n^2))."""
    n = graph.n
    adj = [set() for _ in range(n)]
    for u, v in graph.edges:
        adj[u].add(int(v))
        adj[v].add(int(u))
    m_in = messages.as_dict()

    def nonedge_sum(u: int, exclude: set[int]) -> float:
        acc = 0.0
        for w in range(n):
            if w == u or w in adj[u] or w in exclude:
                continue
            acc += math.atanh(couplings.theta_minus * beliefs[w])
        return acc

    new_messages: dict[tuple[int, int], float] = {}
    for (u, v) in m_in:
        acc = 0.0
        for w in adj[u]:
            if w == v:
                continue
            acc += math.atanh(couplings.theta_plus * m_in[(w, u)])
        acc += nonedge_sum(u, {v})
        new_messages[(u, v)] = math.tanh(acc)
    new_beliefs = np.zeros(n)
    for u in range(n):
        acc = 0.0
        for w in adj[u]:
            acc += math.atanh(couplings.theta_plus * m_in[(w, u)])
        acc += nonedge_sum(u, set())
        new_beliefs[u] = math.tanh(acc)
    return new_messages, new_beliefs

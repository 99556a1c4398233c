"""Seeded random instances for property tests, acceptance runs and demos."""

from __future__ import annotations

import numpy as np

from .model import SinglePeriodGame, WeightSystem
from .solver import QuittingGame
from .stopping import EventTree, Node


def random_weights(rng: np.random.Generator, m: int, total: float) -> WeightSystem:
    """Generators drawn uniformly on the simplex, scaled to sum to ``total``."""
    a = rng.dirichlet(np.ones(m)) * total
    if total == 1.0:
        # pin the sum so the saturated regime is exact up to rounding
        a[-1] = 1.0 - a[:-1].sum()
    return WeightSystem(a)


def random_single_game(
    rng: np.random.Generator, m: int, total: float, low: float = -10.0, high: float = 10.0
) -> SinglePeriodGame:
    w = random_weights(rng, m, total)
    return SinglePeriodGame(w, rng.uniform(low, high, m), rng.uniform(low, high, m))


def random_quitting_game(rng: np.random.Generator, m: int, T: int, total: float) -> QuittingGame:
    return QuittingGame(rng.uniform(-10, 10, (T + 1, m)), random_weights(rng, m, total))


def random_tree(rng: np.random.Generator, m: int, depth: int, max_branching: int = 2) -> EventTree:
    """Tree of the given depth; each internal node has 1..max_branching children."""
    nodes = []
    counter = 0

    def grow(t: int) -> int:
        nonlocal counter
        nid = counter
        counter += 1
        X = rng.uniform(-10, 10, m)
        if t == depth:
            nodes.append(Node(nid, t, X))
            return nid
        n_children = int(rng.integers(1, max_branching + 1))
        probs = rng.dirichlet(np.ones(n_children))
        kids = tuple((grow(t + 1), float(p)) for p in probs)
        nodes.append(Node(nid, t, X, kids))
        return nid

    root = grow(0)
    return EventTree(nodes, root)

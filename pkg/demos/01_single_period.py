"""
Single-period games and the orthant projection
==============================================

Every player either exercises (takes X_k) or waits (takes P_k, shifted by
its share of what the exercisers took away). The value of the game is the
projection of P onto the orthant {x >= X}.
"""

from __future__ import annotations

import itertools

import numpy as np

from dynkin import OrthantSpec, SinglePeriodGame, WeightSystem, payoff_single, project_orthant, solve_single
from dynkin.oracle import analyze_single

np.set_printoptions(precision=4, suppress=True)

# two players, a quarter of the wealth attributed to each
g = SinglePeriodGame(WeightSystem([0.25, 0.25]), X=[0, 0], P=[-1, 3])

# all four profiles (0 = exercise, 1 = wait)
for s in itertools.product((0, 1), repeat=2):
    print(s, payoff_single(g, s))

# player 1 is better off exercising than waiting for -1; once it does,
# player 2 absorbs a third of the difference: 3 - 1/3 = 8/3
res = solve_single(g)
print("value", res.value, "exercisers", [k + 1 for k in res.exercisers])

# the brute-force report agrees
rep = analyze_single(g)
print("maximin", rep.maximin, "minimax", rep.minimax, "optimal", rep.optimal)

# a larger random game: the active set is found by one-at-a-time elimination
rng = np.random.default_rng(4)
a = rng.dirichlet(np.ones(5)) * 0.8
X, P = rng.uniform(-5, 5, 5), rng.uniform(-5, 5, 5)
value, active = project_orthant(P, OrthantSpec(X), WeightSystem(a))
print("X    ", X)
print("P    ", P)
print("value", value, "active", [k + 1 for k in range(5) if active >> k & 1])

# constant-sum weights conserve total wealth whenever the exercise
# payoffs do not already exceed it
g = SinglePeriodGame(WeightSystem([0.5, 0.5]), X=[0, -2], P=[3, -3])
res = solve_single(g)
print("saturated value", res.value, "total", res.value.sum())

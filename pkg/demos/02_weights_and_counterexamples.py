"""
When weights stop being competitive
===================================

Weights of the form w_k(E) = a_k / (1 - sum_E a) with a > 0 and sum(a) <= 1
make every game weakly unilaterally competitive, and every such game has a
pure optimal equilibrium. This script breaks each condition in turn.
"""

from __future__ import annotations

import numpy as np

from dynkin.model import mask_of
from dynkin.oracle import (
    RawWeightGame,
    RawWeightTable,
    analyze_single,
    check_weight_form,
    search_wuc_witness,
)

# generators summing to more than one: a = [0.6, 0.6]
table = RawWeightTable.from_generators([0.6, 0.6])
rep = analyze_single(RawWeightGame(table, [0, 0], [1, -1]))
for prof in [(0, 0), (0, 1), (1, 0), (1, 1)]:
    print(prof, rep.payoff(prof))
print("pure Nash:", rep.nash or "none")
print("maximin", rep.maximin, "minimax", rep.minimax)

# the fit recovers generators straight from a table
print("fit:", check_weight_form(RawWeightTable.from_generators([0.25, 0.25, 0.25])))

# two players: any positive table is competitive, even one with no fit
odd = RawWeightTable(2, {(mask_of([1]), 0): 2.0, (mask_of([0]), 1): 0.5})
print("fit:", check_weight_form(odd))
print("witness:", search_wuc_witness(odd, np.random.default_rng(0), trials=500))

# three players: bend one weight and a random search finds a game where a
# unilateral move shifts the mover and a bystander in the same direction
weights = dict(RawWeightTable.from_generators([0.25, 0.25, 0.25]).weights)
weights[mask_of([1, 2]), 0] = 1.5
bent = RawWeightTable(3, weights)
print("fit:", check_weight_form(bent))
X, P, (k, l, s, s2) = search_wuc_witness(bent, np.random.default_rng(0), trials=500)
print(f"player {k + 1} moves {s} -> {s2}; player {l + 1}'s payoff moves the same way")

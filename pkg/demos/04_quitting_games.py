"""
Quitting games
==============

A quitting player leaves with its current payoff and the rest play on. The
value comes from a single-period game: best early payoff against the
terminal one.
"""

from __future__ import annotations

from dynkin import QuittingGame, WeightSystem, quitting_payoff, solve_quitting, solve_quitting_subgame_perfect
from dynkin.oracle import StochasticQuittingGame, verify_quitting

q = QuittingGame([[5, 0], [3, 1], [4, 2]], WeightSystem([0.25, 0.25]))
res = solve_quitting(q)
print("value", res.value, "times", res.equilibrium)
print("replayed", quitting_payoff(q, res.equilibrium))

check = verify_quitting(q, res.equilibrium)
print("saddle check:", check.candidate_optimal)

# the perfect-information table re-solves every subgame, including the
# ones reached only after a mistake
sp = solve_quitting_subgame_perfect(q)
for (t, history), acts in sp.table().items():
    shown = ["-" if h is None else h for h in history]
    print(f"t={t} departed={shown} quits={ {k + 1: a for k, a in acts.items()} }")

# if the state is revealed only after the first period, pure equilibria
# can disappear
stochastic = StochasticQuittingGame(
    WeightSystem([1 / 3] * 3),
    [2.1, 3.5, -50],
    [(0.5, [[-50, -50, -5.05], [0, 5, -5]]), (0.5, [[4, -50, -50], [0, 5, -5]])],
)
print("stochastic pure Nash:", verify_quitting(stochastic).report.nash or "none")

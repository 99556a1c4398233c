"""
Stopping games on event trees
=============================

Backward induction: each node projects the expected value of its children
onto its own exercise orthant. A player stops at the first node where its
value meets its exercise payoff.
"""

from __future__ import annotations

import numpy as np

from dynkin import (
    EventTree,
    Node,
    WeightSystem,
    equilibrium_stopping,
    evaluate_stopping_profile,
    value_process,
)
from dynkin.oracle import analyze_stopping, verify_stopping_equilibrium

np.set_printoptions(precision=4, suppress=True)

w = WeightSystem([0.2, 0.3, 0.4])
tree = EventTree(
    [
        Node("r", 0, [1, 2, 0], (("up", 0.4), ("down", 0.6))),
        Node("up", 1, [3, -1, 1], (("uu", 0.5), ("ud", 0.5))),
        Node("down", 1, [-2, 1, 2], (("dd", 1.0),)),
        Node("uu", 2, [4, 0, -3]),
        Node("ud", 2, [0, 2, 1]),
        Node("dd", 2, [-1, 3, 5]),
    ],
    "r",
)

vp = value_process(tree, w)
for nid in tree.order:
    print(f"{nid:>4}  X={tree.nodes[nid].X}  U={vp[nid]}")

tau = equilibrium_stopping(tree, vp)
for k, nodes in enumerate(tau.stops):
    print(f"player {k + 1} stops at", sorted(n for n in nodes if n in tree.internal))

# following tau reproduces the root value, and no deviation pays
print("V(tau) =", evaluate_stopping_profile(tree, w, tau, vp))
print("optimal equilibrium:", verify_stopping_equilibrium(tree, w, tau, vp=vp))

# settling non-exercisers against the terminal payoff instead of the
# continuation value loses the saddle property
chain = EventTree.chain([[-1, -1, 0], [-2, -2, 4], [0, 0, 0]])
rep = analyze_stopping(chain, WeightSystem([1 / 3] * 3), variant="natural")
print("natural variant:", len(rep.nash), "Nash profiles,", len(rep.nash_payoffs()), "outcomes,",
      len(rep.optimal), "optimal")
for v in rep.nash_payoffs():
    print("  outcome", v)

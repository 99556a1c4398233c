"""
The constant-sum limit
======================

With sum(a) = 1 the weighted norm degenerates. One way to define the
projection is to add a penalty (sum x - sum P)^2 / eps and let eps go to
zero. The solver uses the exact limit; here a generic bounded
least-squares minimizer approaches it at rate eps.
"""

from __future__ import annotations

import numpy as np

from dynkin import OrthantSpec, penalized_projection, project_orthant
from dynkin.sampling import random_single_game

rng = np.random.default_rng(11)
g = random_single_game(rng, 4, 1.0)
O = OrthantSpec(g.X)
exact, _ = project_orthant(g.P, O, g.weights)
print("a    ", g.weights.a.round(4))
print("limit", exact.round(6))
for eps in (1e-4, 1e-5, 1e-6, 1e-7, 1e-8):
    gap = np.abs(penalized_projection(g.P, O, g.weights, eps) - exact).max()
    print(f"eps={eps:.0e}  max gap {gap:.2e}")

# the gap is roughly eps * D / min(a): small generators amplify it

"""Weighted inner product, hyperplane and orthant projections.

In the strict regime (``sum(a) < 1``) payoff space carries the inner product

    <x, y> = sum_i x_i y_i / a_i + (sum_i x_i)(sum_i y_i) / (1 - sum_i a_i)

and the payoff of any exercise set is the orthogonal projection of ``P`` onto
the hyperplane fixing the exercisers at ``X``. The value of the game is the
projection of ``P`` onto the orthant ``{x : x >= X}``. In the saturated
regime the norm degenerates; projections there are limits of the penalized
norm obtained by moving ``eps`` of weight onto an extra coordinate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import lsq_linear

from .model import WeightSystem, full_mask, hyperplane_payoff

MAX_EXHAUSTIVE_PLAYERS = 20


@dataclass(frozen=True, eq=False)
class OrthantSpec:
    """The orthant ``{x : x_i >= lower_bounds_i}``."""

    lower_bounds: np.ndarray

    def __init__(self, lower_bounds):
        arr = np.array(lower_bounds, dtype=float).reshape(-1)
        arr.flags.writeable = False
        object.__setattr__(self, "lower_bounds", arr)

    @property
    def m(self) -> int:
        return self.lower_bounds.size

    def contains(self, x, tol: float) -> bool:
        return bool(np.all(np.asarray(x) >= self.lower_bounds - tol))


def _as_orthant(O) -> OrthantSpec:
    return O if isinstance(O, OrthantSpec) else OrthantSpec(O)


def inner_product(x, y, w: WeightSystem) -> float:
    if w.saturated:
        raise ValueError("the weighted inner product does not exist when sum(a) = 1")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (w.m,) or y.shape != (w.m,):
        raise ValueError(f"vectors must have length {w.m}")
    return float(np.sum(x * y / w.a) + x.sum() * y.sum() / (1.0 - w.total))


def norm(x, w: WeightSystem) -> float:
    return float(np.sqrt(inner_product(x, x, w)))


def project_hyperplane(P, E: int, X, w: WeightSystem) -> np.ndarray:
    """Projection of ``P`` onto ``{x : x_i = X_i for i in E}``.

    Computed in closed form; it coincides with the payoff vector of the
    profile whose exercise set is ``E``.
    """
    return hyperplane_payoff(P, E, X, w)


def project_orthant(
    P,
    O,
    w: WeightSystem,
    order: Sequence[int] | None = None,
    tol: float | None = None,
) -> tuple[np.ndarray, int]:
    """Project ``P`` onto the orthant ``O``; returns ``(value, active_set)``.

    Players are eliminated one at a time: while a remaining player has a
    reduced terminal payoff at or below its bound, it joins the active set
    and the game is reduced to the others. ``order`` is a priority list for
    picking among several candidates (lowest index first by default).
    """
    O = _as_orthant(O)
    P = np.asarray(P, dtype=float)
    X = O.lower_bounds
    m = w.m
    if P.shape != (m,) or O.m != m:
        raise ValueError(f"P and the orthant must have length {m}")
    tol = w.tol if tol is None else tol
    priority = list(range(m)) if order is None else [int(k) for k in order]
    if sorted(priority) != list(range(m)):
        raise ValueError("order must be a permutation of the players")

    full = full_mask(m)
    if w.saturated and X.sum() > P.sum() + tol:
        return X.copy(), full

    E = 0
    current = P.copy()
    while E != full:
        pick = next(
            (k for k in priority if not E >> k & 1 and current[k] <= X[k] + tol),
            None,
        )
        if pick is None:
            break
        E |= 1 << pick
        current = hyperplane_payoff(P, E, X, w)
    return current, E


def _squared_distance(d: np.ndarray, w: WeightSystem) -> float:
    if w.saturated:
        return float(np.sum(d * d / w.a))
    return inner_product(d, d, w)


def project_orthant_exhaustive(P, O, w: WeightSystem, tol: float | None = None) -> np.ndarray:
    """Brute-force projection onto ``O`` over all ``2**m`` hyperplanes.

    Keeps the feasible hyperplane projections and returns the closest one.
    In the saturated regime only candidates on the constant-sum plane
    compete; if none is feasible the result is ``X``.
    """
    O = _as_orthant(O)
    P = np.asarray(P, dtype=float)
    X = O.lower_bounds
    m = w.m
    if m > MAX_EXHAUSTIVE_PLAYERS:
        raise ValueError(f"exhaustive projection is limited to {MAX_EXHAUSTIVE_PLAYERS} players")
    tol = w.tol if tol is None else tol
    total = P.sum()
    scale = max(1.0, float(np.abs(P).sum()), float(np.abs(X).sum()))

    best = None
    best_key = None
    for size in range(m + 1):
        for E_members in itertools.combinations(range(m), size):
            E = sum(1 << k for k in E_members)
            cand = project_hyperplane(P, E, X, w)
            if not O.contains(cand, tol):
                continue
            if w.saturated and abs(cand.sum() - total) > tol * scale:
                continue
            dist = _squared_distance(cand - P, w)
            # ties go to the smaller set, then lexicographic order
            if best is None or dist < best_key - tol:
                best, best_key = cand, dist
    if best is None:
        return X.copy()
    return best


def penalized_projection(P, O, w: WeightSystem, eps: float = 1e-6) -> np.ndarray:
    """Numerical projection onto ``O`` under the ``eps``-penalized norm.

    Minimizes ``sum_i (x_i - P_i)^2 / (a_i - eps/m) + (sum x - sum P)^2 / eps``
    subject to ``x >= X`` with a bounded least-squares solver. As ``eps``
    shrinks this approaches the saturated-regime projection.
    """
    O = _as_orthant(O)
    P = np.asarray(P, dtype=float)
    m = w.m
    c = w.a - eps / m
    if np.any(c <= 0):
        raise ValueError("eps is too large for these weights")
    A = np.vstack([np.diag(1.0 / np.sqrt(c)), np.ones((1, m)) / np.sqrt(eps)])
    b = np.concatenate([P / np.sqrt(c), [P.sum() / np.sqrt(eps)]])
    res = lsq_linear(A, b, bounds=(O.lower_bounds, np.inf), method="bvls", tol=1e-14)
    return res.x

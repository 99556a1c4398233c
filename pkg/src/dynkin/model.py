"""Core game types and the single-period payoff rule.

Players are indexed from 0 in code (player ``k`` here is player ``k + 1`` in
the usual mathematical write-up). An exercise set is an ``int`` bitmask:
bit ``k`` is set when player ``k`` exercises. A strategy profile is a tuple
of 0/1 decisions where ``0`` means *exercise* and ``1`` means *wait*.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

TOL = 1e-9
MAX_PLAYERS = 62

STRICT = "strict"
SATURATED = "saturated"


def mask_of(players: Iterable[int]) -> int:
    mask = 0
    for k in players:
        mask |= 1 << int(k)
    return mask


def members(mask: int, m: int) -> list[int]:
    return [k for k in range(m) if mask >> k & 1]


def full_mask(m: int) -> int:
    return (1 << m) - 1


def exercise_set(s: Sequence[int]) -> int:
    """Bitmask of the players exercising (``s_k == 0``) under profile ``s``."""
    return mask_of(k for k, sk in enumerate(s) if sk == 0)


def profile_from_mask(mask: int, m: int) -> tuple[int, ...]:
    return tuple(0 if mask >> k & 1 else 1 for k in range(m))


def _frozen(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim > 1:
        raise ValueError(f"{name} must be a vector")
    arr = arr.reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class WeightSystem:
    """Weight generators ``a_1..a_m`` with ``a_k > 0`` and ``sum(a) <= 1``.

    The regime is *saturated* (constant-sum) when ``sum(a)`` is within ``tol``
    of one and *strict* otherwise.
    """

    a: np.ndarray
    tol: float = TOL

    def __init__(self, a, tol: float = TOL):
        arr = _frozen(a, "a")
        if arr.size < 1:
            raise ValueError("a weight system needs at least one player")
        if arr.size > MAX_PLAYERS:
            raise ValueError(f"at most {MAX_PLAYERS} players are supported")
        if np.any(arr <= 0):
            raise ValueError("weight generators must satisfy a_k > 0")
        total = float(arr.sum())
        if total > 1 + tol:
            raise ValueError(
                f"weight generators must satisfy sum(a) <= 1, got sum(a) = {total!r}"
            )
        object.__setattr__(self, "a", arr)
        object.__setattr__(self, "tol", float(tol))

    @property
    def m(self) -> int:
        return self.a.size

    @property
    def total(self) -> float:
        return float(self.a.sum())

    @property
    def regime(self) -> str:
        return SATURATED if abs(self.total - 1.0) <= self.tol else STRICT

    @property
    def saturated(self) -> bool:
        return self.regime == SATURATED

    def denominator(self, E: int) -> float:
        """``1 - sum_{i in E} a_i``.

        In the saturated regime this is evaluated as the sum over the players
        outside ``E``, which is the same number without the cancellation.
        """
        if self.saturated:
            return float(sum(self.a[i] for i in range(self.m) if not E >> i & 1))
        return 1.0 - float(sum(self.a[i] for i in range(self.m) if E >> i & 1))

    def __repr__(self) -> str:
        return f"WeightSystem(a={self.a.tolist()!r}, regime={self.regime!r})"


def weight(w: WeightSystem, E: int, k: int) -> float:
    """Redistribution weight ``w_k(E) = a_k / (1 - sum_{i in E} a_i)``.

    ``E`` may be empty (the weight is then ``a_k``) but must not contain
    ``k`` and must not be the full player set.
    """
    if E >> k & 1:
        raise ValueError(f"player {k} is in the exercise set")
    if E == full_mask(w.m):
        raise ValueError("the exercise set must be a proper subset of the players")
    return float(w.a[k]) / w.denominator(E)


@dataclass(frozen=True, eq=False)
class SinglePeriodGame:
    weights: WeightSystem
    X: np.ndarray
    P: np.ndarray

    def __init__(self, weights: WeightSystem, X, P):
        if not isinstance(weights, WeightSystem):
            weights = WeightSystem(weights)
        X = _frozen(X, "X")
        P = _frozen(P, "P")
        if not (X.size == P.size == weights.m):
            raise ValueError(
                f"X, P and a must have the same length, got {X.size}, {P.size}, {weights.m}"
            )
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "P", P)

    @property
    def m(self) -> int:
        return self.weights.m

    @property
    def tol(self) -> float:
        return self.weights.tol

    def __repr__(self) -> str:
        return (
            f"SinglePeriodGame(a={self.weights.a.tolist()}, "
            f"X={self.X.tolist()}, P={self.P.tolist()})"
        )


def exercise_difference(g: SinglePeriodGame, E: int) -> float:
    """``D = sum_{i in E} (X_i - P_i)``; zero for the empty set."""
    return float(sum(g.X[i] - g.P[i] for i in range(g.m) if E >> i & 1))


def hyperplane_payoff(P, E: int, X, w: WeightSystem) -> np.ndarray:
    """Payoff vector when exactly the players in ``E`` exercise.

    Exercisers receive ``X_i``; everyone else receives
    ``P_k - w_k(E) * sum_{i in E}(X_i - P_i)``.
    """
    P = np.asarray(P, dtype=float)
    X = np.asarray(X, dtype=float)
    m = w.m
    if E == 0:
        return P.copy()
    if E == full_mask(m):
        return X.copy()
    D = 0.0
    for i in range(m):
        if E >> i & 1:
            D += X[i] - P[i]
    denom = w.denominator(E)
    V = np.empty(m)
    for k in range(m):
        if E >> k & 1:
            V[k] = X[k]
        else:
            V[k] = P[k] - w.a[k] / denom * D
    return V


def payoff_single(g: SinglePeriodGame, s: Sequence[int]) -> np.ndarray:
    if len(s) != g.m:
        raise ValueError(f"profile has {len(s)} entries for {g.m} players")
    if any(sk not in (0, 1) for sk in s):
        raise ValueError("profile entries must be 0 (exercise) or 1 (wait)")
    return hyperplane_payoff(g.P, exercise_set(s), g.X, g.weights)


def subgame_reduce(g: SinglePeriodGame, E: int) -> SinglePeriodGame:
    """Game among the players outside ``E`` once everyone in ``E`` has exercised.

    The remaining players keep their order. Their terminal payoffs absorb the
    exercise difference of ``E`` and their generators become ``w_k(E)``.
    """
    full = full_mask(g.m)
    if E == 0 or E == full or E & ~full:
        raise ValueError("E must be a non-empty proper subset of the players")
    rest = [k for k in range(g.m) if not E >> k & 1]
    V = hyperplane_payoff(g.P, E, g.X, g.weights)
    a_rest = [weight(g.weights, E, k) for k in rest]
    return SinglePeriodGame(
        WeightSystem(a_rest, tol=g.tol), g.X[rest], V[rest]
    )

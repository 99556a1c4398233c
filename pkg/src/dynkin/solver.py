"""Values and optimal equilibria of single-period and quitting games."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .geometry import OrthantSpec, project_hyperplane, project_orthant
from .model import (
    SinglePeriodGame,
    WeightSystem,
    mask_of,
    profile_from_mask,
    subgame_reduce,
)


@dataclass(frozen=True, eq=False)
class SolveResult:
    value: np.ndarray
    equilibrium: tuple[int, ...]
    active_set: int

    @property
    def exercisers(self) -> list[int]:
        return [k for k in range(self.value.size) if self.active_set >> k & 1]


def solve_single(g: SinglePeriodGame) -> SolveResult:
    """Value of a single-period game and an optimal equilibrium attaining it.

    The equilibrium exercises exactly the players whose coordinate of the
    value sits on its exercise payoff.
    """
    value, E = project_orthant(g.P, OrthantSpec(g.X), g.weights)
    return SolveResult(value, profile_from_mask(E, g.m), E)


@dataclass(frozen=True)
class Scenario:
    probability: float
    X: np.ndarray
    P: np.ndarray


@dataclass(frozen=True, eq=False)
class ScenarioSet:
    """Finitely many equally-informative states of the world."""

    scenarios: tuple[Scenario, ...]
    tol: float = 1e-9

    def __init__(self, scenarios, tol: float = 1e-9):
        items = []
        for sc in scenarios:
            if isinstance(sc, Scenario):
                p, X, P = sc.probability, sc.X, sc.P
            else:
                p, X, P = sc
            X = np.array(X, dtype=float).reshape(-1)
            P = np.array(P, dtype=float).reshape(-1)
            items.append(Scenario(float(p), X, P))
        if not items:
            raise ValueError("a scenario set needs at least one scenario")
        m = items[0].X.size
        for sc in items:
            if sc.probability < 0:
                raise ValueError("scenario probabilities must be non-negative")
            if sc.X.size != m or sc.P.size != m:
                raise ValueError("all scenario vectors must have the same length")
        total = sum(sc.probability for sc in items)
        if abs(total - 1.0) > tol:
            raise ValueError(f"scenario probabilities must sum to 1, got {total!r}")
        object.__setattr__(self, "scenarios", tuple(items))
        object.__setattr__(self, "tol", tol)

    @property
    def m(self) -> int:
        return self.scenarios[0].X.size

    def expected_X(self) -> np.ndarray:
        return sum(sc.probability * sc.X for sc in self.scenarios)

    def expected_P(self) -> np.ndarray:
        return sum(sc.probability * sc.P for sc in self.scenarios)


def solve_single_stochastic(sc: ScenarioSet, w: WeightSystem) -> SolveResult:
    # payoffs are linear in (X, P), so only the expectations matter
    if sc.m != w.m:
        raise ValueError(f"scenarios have {sc.m} players but the weights have {w.m}")
    return solve_single(SinglePeriodGame(w, sc.expected_X(), sc.expected_P()))


@dataclass(frozen=True, eq=False)
class QuittingGame:
    """Deterministic quitting game; ``X[t, k]`` is player ``k``'s payoff for quitting at ``t``.

    Row ``T`` holds the terminal payoffs of players who never quit.
    """

    X: np.ndarray
    weights: WeightSystem

    def __init__(self, X, weights: WeightSystem):
        if not isinstance(weights, WeightSystem):
            weights = WeightSystem(weights)
        arr = np.array(X, dtype=float)
        if arr.ndim != 2 or arr.shape[0] < 2:
            raise ValueError("X must be a (T+1) x m matrix with T >= 1")
        if arr.shape[1] != weights.m:
            raise ValueError(f"X has {arr.shape[1]} columns for {weights.m} players")
        if not np.all(np.isfinite(arr)):
            raise ValueError("X must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "X", arr)
        object.__setattr__(self, "weights", weights)

    @property
    def T(self) -> int:
        return self.X.shape[0] - 1

    @property
    def m(self) -> int:
        return self.X.shape[1]

    def reduced_game(self) -> SinglePeriodGame:
        """Single-period game: best early quit against the terminal payoff."""
        return SinglePeriodGame(self.weights, self.X[:-1].max(axis=0), self.X[-1])


def quitting_payoff(q: QuittingGame, s: Sequence[int]) -> np.ndarray:
    """Payoffs when player ``k`` quits at time ``s[k]`` (``s[k] == T`` means never)."""
    T, m = q.T, q.m
    if len(s) != m:
        raise ValueError(f"profile has {len(s)} entries for {m} players")
    times = [int(t) for t in s]
    if any(t < 0 or t > T for t in times):
        raise ValueError(f"quitting times must lie in [0, {T}]")
    E = mask_of(k for k in range(m) if times[k] < T)
    quit_values = np.array([q.X[times[k], k] for k in range(m)])
    return project_hyperplane(q.X[T], E, quit_values, q.weights)


def solve_quitting(q: QuittingGame) -> SolveResult:
    """Value of a quitting game and quitting times attaining it.

    Every player in the active set quits at the first time its running
    maximum is reached; everyone else waits until ``T``.
    """
    g = q.reduced_game()
    value, E = project_orthant(g.P, OrthantSpec(g.X), g.weights)
    times = []
    for k in range(q.m):
        if E >> k & 1:
            times.append(int(np.flatnonzero(q.X[:-1, k] >= g.X[k])[0]))
        else:
            times.append(q.T)
    return SolveResult(value, tuple(times), E)


MAX_SUBGAME_PERFECT = 10


@dataclass(eq=False)
class SubgamePerfectStrategy:
    """Perfect-information quitting strategy, re-solved in every subgame.

    A history is a length-``m`` tuple holding each departed player's
    quitting time and ``None`` for players still in the game. ``actions``
    returns, for each remaining player, whether it quits now.
    """

    game: QuittingGame
    _cache: dict = field(default_factory=dict, repr=False)

    def subgame(self, t: int, history: Sequence[int | None]):
        """Remaining players and the reduced single-period game at ``(t, history)``."""
        q = self.game
        rest = [k for k in range(q.m) if history[k] is None]
        departed = mask_of(k for k in range(q.m) if history[k] is not None)
        if not rest or t >= q.T:
            return rest, None
        running_max = q.X[t : q.T].max(axis=0)
        if departed:
            quit_values = np.array(
                [q.X[history[k], k] if history[k] is not None else 0.0 for k in range(q.m)]
            )
            g = SinglePeriodGame(q.weights, quit_values, q.X[q.T])
            sub = subgame_reduce(g, departed)
            return rest, SinglePeriodGame(sub.weights, running_max[rest], sub.P)
        return rest, SinglePeriodGame(q.weights, running_max, q.X[q.T])

    def actions(self, t: int, history: Sequence[int | None]) -> dict[int, bool]:
        key = (t, tuple(history))
        if key not in self._cache:
            self._cache[key] = self._actions(t, key[1])
        return self._cache[key]

    def _actions(self, t: int, history: tuple) -> dict[int, bool]:
        q = self.game
        rest, g = self.subgame(t, history)
        if g is None:
            return {k: False for k in rest}
        value, _ = project_orthant(g.P, OrthantSpec(g.X), g.weights)
        return {k: bool(value[j] <= q.X[t, k] + q.weights.tol) for j, k in enumerate(rest)}

    def play(self, overrides: dict[int, int] | None = None) -> tuple[int, ...]:
        """Quitting times when everyone follows the table except ``overrides``.

        ``overrides`` maps a player to a fixed quitting time it uses no
        matter what it observes.
        """
        q = self.game
        overrides = overrides or {}
        history: list[int | None] = [None] * q.m
        for t in range(q.T):
            acts = self.actions(t, history)
            for k in list(acts):
                quits = overrides[k] == t if k in overrides else acts[k]
                if quits:
                    history[k] = t
        return tuple(q.T if h is None else h for h in history)

    def histories(self, t: int) -> Iterator[tuple]:
        """All histories that can be observed at time ``t``."""
        choices = [None] + list(range(t))
        yield from itertools.product(choices, repeat=self.game.m)

    def table(self) -> dict[tuple[int, tuple], dict[int, bool]]:
        return {
            (t, h): self.actions(t, h)
            for t in range(self.game.T)
            for h in self.histories(t)
        }


def solve_quitting_subgame_perfect(q: QuittingGame) -> SubgamePerfectStrategy:
    if q.m > MAX_SUBGAME_PERFECT or q.T > MAX_SUBGAME_PERFECT:
        raise ValueError(
            f"subgame-perfect tables are limited to {MAX_SUBGAME_PERFECT} players and periods"
        )
    return SubgamePerfectStrategy(q)

"""Brute-force ground truth for every solver in the package.

Everything here enumerates strategy profiles directly and never calls the
projection code, so agreement with the solvers is an independent check.
Raw weight tables bypass the weight-system invariants so that the games
used in the weight-characterization results can be built at all.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .model import TOL, SinglePeriodGame, WeightSystem, full_mask, members
from .solver import QuittingGame, quitting_payoff
from .stopping import (
    EventTree,
    StoppingRule,
    ValueProcess,
    evaluate_natural_variant,
    evaluate_stopping_profile,
    stopping_rule,
    stopping_strategies,
    value_process,
)

MAX_ANALYZE_PLAYERS = 15
MAX_WUC_PLAYERS = 10
MAX_STOPPING_PLAYERS = 3
MAX_STOPPING_INTERNAL = 8
MAX_QUITTING_PROFILES = 10**6


class InstanceTooLarge(ValueError):
    """The instance exceeds what exhaustive enumeration is allowed to visit."""


class RawWeightTable:
    """Arbitrary weights ``w_k(E)`` for non-empty proper ``E`` and ``k`` outside ``E``."""

    def __init__(self, m: int, weights: dict[tuple[int, int], float]):
        self.m = int(m)
        self.weights = {(int(E), int(k)): float(v) for (E, k), v in weights.items()}
        full = full_mask(self.m)
        for E in range(1, full):
            for k in range(self.m):
                if not E >> k & 1 and (E, k) not in self.weights:
                    raise ValueError(
                        f"missing weight for player {k + 1} and exercise set "
                        f"{[i + 1 for i in members(E, self.m)]}"
                    )

    @classmethod
    def from_generators(cls, a: Sequence[float]) -> "RawWeightTable":
        """Table of ``a_k / (1 - sum_E a)`` with no constraint on ``a``.

        Each generator is read as the shortest decimal that prints as it
        (``0.6`` means 3/5) and the ratio is rounded once, so decimal inputs
        give correctly rounded weights.
        """
        exact = [x if isinstance(x, Fraction) else Fraction(repr(float(x))) for x in a]
        m = len(exact)
        table = {}
        for E in range(1, full_mask(m)):
            denom = 1 - sum(exact[i] for i in range(m) if E >> i & 1)
            if denom == 0:
                raise ValueError(f"1 - sum(a) vanishes on exercise set {[i + 1 for i in members(E, m)]}")
            for k in range(m):
                if not E >> k & 1:
                    table[E, k] = float(exact[k] / denom)
        return cls(m, table)

    def __getitem__(self, key: tuple[int, int]) -> float:
        return self.weights[key]


@dataclass(frozen=True, eq=False)
class RawWeightGame:
    table: RawWeightTable
    X: np.ndarray
    P: np.ndarray

    def __init__(self, table: RawWeightTable, X, P):
        X = np.array(X, dtype=float).reshape(-1)
        P = np.array(P, dtype=float).reshape(-1)
        if not (X.size == P.size == table.m):
            raise ValueError("X, P and the weight table must agree on the player count")
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "P", P)

    @property
    def m(self) -> int:
        return self.table.m


def _weight_lookup(g) -> Callable[[int, int], float]:
    if isinstance(g, RawWeightGame):
        return lambda E, k: g.table[E, k]
    a = g.weights.a
    # brute force uses the defining formula, not the library's saturated shortcut
    return lambda E, k: a[k] / (1.0 - sum(a[i] for i in range(g.m) if E >> i & 1))


def payoff_by_mask(g) -> np.ndarray:
    """``table[E]`` is the payoff vector when exactly the players in ``E`` exercise."""
    m = g.m
    X, P = np.asarray(g.X), np.asarray(g.P)
    w = _weight_lookup(g)
    full = full_mask(m)
    out = np.empty((1 << m, m))
    for E in range(1 << m):
        if E == 0:
            out[E] = P
            continue
        if E == full:
            out[E] = X
            continue
        D = sum(X[i] - P[i] for i in range(m) if E >> i & 1)
        for k in range(m):
            out[E, k] = X[k] if E >> k & 1 else P[k] - w(E, k) * D
    return out


@dataclass(eq=False)
class EquilibriumReport:
    """Exhaustive analysis of a finite game in normal form.

    ``payoffs[i_1, ..., i_m, k]`` is player ``k``'s payoff when each player
    ``j`` uses ``strategies[j][i_j]``. Profiles in ``nash`` and ``optimal``
    are tuples of strategies, sorted by strategy index.
    """

    strategies: list[list]
    payoffs: np.ndarray
    nash: list[tuple]
    optimal: list[tuple]
    maximin: np.ndarray
    minimax: np.ndarray
    tol: float

    @property
    def m(self) -> int:
        return self.payoffs.shape[-1]

    def index(self, profile: Sequence) -> tuple[int, ...]:
        return tuple(self.strategies[k].index(s) for k, s in enumerate(profile))

    def payoff(self, profile: Sequence) -> np.ndarray:
        return self.payoffs[self.index(profile)]

    def nash_payoffs(self) -> list[np.ndarray]:
        """Distinct payoff vectors over the Nash profiles (equal within ``tol``)."""
        distinct: list[np.ndarray] = []
        for prof in self.nash:
            v = self.payoff(prof)
            if not any(np.all(np.abs(v - u) <= self.tol) for u in distinct):
                distinct.append(v)
        return distinct

    def is_nash(self, profile: Sequence) -> bool:
        return tuple(profile) in set(self.nash)

    def is_optimal(self, profile: Sequence) -> bool:
        return tuple(profile) in set(self.optimal)


def analyze_table(strategies: Sequence[Sequence], payoffs: np.ndarray, tol: float = TOL) -> EquilibriumReport:
    """Nash and optimal equilibria, maximin and minimax of a payoff table."""
    m = payoffs.shape[-1]
    nash = np.ones(payoffs.shape[:-1], dtype=bool)
    optimal = np.ones(payoffs.shape[:-1], dtype=bool)
    maximin = np.empty(m)
    minimax = np.empty(m)
    for k in range(m):
        Vk = payoffs[..., k]
        best_reply = Vk.max(axis=k, keepdims=True)
        others = tuple(j for j in range(m) if j != k)
        guarantee = Vk.min(axis=others, keepdims=True) if others else Vk
        nash &= Vk >= best_reply - tol
        optimal &= guarantee >= Vk - tol
        maximin[k] = guarantee.max()
        minimax[k] = best_reply.min()
    optimal &= nash
    strategies = [list(s) for s in strategies]

    def label(idx) -> tuple:
        return tuple(strategies[j][i] for j, i in enumerate(idx))

    return EquilibriumReport(
        strategies=strategies,
        payoffs=payoffs,
        nash=[label(i) for i in np.argwhere(nash)],
        optimal=[label(i) for i in np.argwhere(optimal)],
        maximin=maximin,
        minimax=minimax,
        tol=tol,
    )


def analyze_profiles(strategies: Sequence[Sequence], payoff_fn, m: int, tol: float = TOL) -> EquilibriumReport:
    """Tabulate ``payoff_fn(profile)`` over every profile, then analyze it."""
    shape = tuple(len(s) for s in strategies)
    payoffs = np.empty(shape + (m,))
    for idx in itertools.product(*(range(n) for n in shape)):
        payoffs[idx] = payoff_fn(tuple(strategies[j][i] for j, i in enumerate(idx)))
    return analyze_table(strategies, payoffs, tol)


def analyze_single(g, tol: float = TOL) -> EquilibriumReport:
    """Exhaustive report for a single-period game (weight system or raw table).

    Strategies are ``1`` (wait) and ``0`` (exercise), as in a profile tuple.
    """
    m = g.m
    if m > MAX_ANALYZE_PLAYERS:
        raise InstanceTooLarge(f"exhaustive analysis is limited to {MAX_ANALYZE_PLAYERS} players")
    by_mask = payoff_by_mask(g)
    # axis k holds s_k in {0, 1}; s_k == 0 means bit k of the exercise set is set
    payoffs = np.empty((2,) * m + (m,))
    for E in range(1 << m):
        idx = tuple(0 if E >> k & 1 else 1 for k in range(m))
        payoffs[idx] = by_mask[E]
    return analyze_table([[0, 1]] * m, payoffs, tol)


@dataclass(frozen=True)
class WucResult:
    holds: bool
    witness: tuple | None = None

    def __bool__(self) -> bool:
        return self.holds


def check_wuc(g, tol: float = TOL) -> WucResult:
    """Check weak unilateral competitiveness over every unilateral deviation.

    A witness is ``(k, l, s, s_prime)``: player ``k`` moves from profile
    ``s`` to ``s_prime`` and player ``l``'s payoff moves the wrong way.
    """
    m = g.m
    if m > MAX_WUC_PLAYERS:
        raise InstanceTooLarge(f"WUC checking is limited to {MAX_WUC_PLAYERS} players")
    V = payoff_by_mask(g)
    for k in range(m):
        bit = 1 << k
        waits = np.array([E for E in range(1 << m) if not E & bit], dtype=np.int64)
        exer = waits | bit
        dk = V[waits, k] - V[exer, k]
        for l in range(m):
            if l == k:
                continue
            dl = V[waits, l] - V[exer, l]
            bad = ((dk > tol) & (dl > tol)) | ((dk < -tol) & (dl < -tol)) | (
                (np.abs(dk) <= tol) & (np.abs(dl) > tol)
            )
            if bad.any():
                j = int(np.flatnonzero(bad)[0])
                s = tuple(0 if waits[j] >> i & 1 else 1 for i in range(m))
                s2 = tuple(0 if exer[j] >> i & 1 else 1 for i in range(m))
                if dk[j] < -tol:
                    s, s2 = s2, s
                return WucResult(False, (k, l, s, s2))
    return WucResult(True)


def search_wuc_witness(table: RawWeightTable, rng: np.random.Generator, trials: int = 2000, tol: float = TOL):
    """Look for ``X, P`` making the raw-weight game fail WUC.

    Returns ``(X, P, witness)`` or ``None`` when every trial passed.
    """
    for _ in range(trials):
        X = rng.uniform(-10, 10, table.m)
        P = rng.uniform(-10, 10, table.m)
        res = check_wuc(RawWeightGame(table, X, P), tol)
        if not res:
            return X, P, res.witness
    return None


def check_weight_form(t: RawWeightTable, tol: float = TOL) -> np.ndarray | None:
    """Recover generators ``a`` with ``w_k(E) = a_k / (1 - sum_E a)``, if any exist.

    The table must be positive and satisfy the chaining identity
    ``w_i(E + j) (1 - w_j(E)) = w_i(E)``. Returns ``None`` when no valid
    generator vector reproduces the table (and for a single player, where
    the table is empty).
    """
    m = t.m
    if m < 2:
        return None
    if any(v <= 0 for v in t.weights.values()):
        return None
    full = full_mask(m)

    def close(x: float, y: float) -> bool:
        return abs(x - y) <= tol * max(1.0, abs(x), abs(y))

    for E in range(1, full):
        if bin(E).count("1") > m - 2:
            continue
        for i in range(m):
            for j in range(m):
                if i == j or E >> i & 1 or E >> j & 1:
                    continue
                if not close(t[E | 1 << j, i] * (1.0 - t[E, j]), t[E, i]):
                    return None

    # a_i + w_i({j}) a_j = w_i({j}) for every ordered pair
    rows, rhs = [], []
    for i in range(m):
        for j in range(m):
            if i != j:
                u = t[1 << j, i]
                row = np.zeros(m)
                row[i] = 1.0
                row[j] = u
                rows.append(row)
                rhs.append(u)
    a, *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
    if np.any(a <= 0) or np.any(a.sum() - a >= 1):
        return None
    for (E, k), v in t.weights.items():
        denom = 1.0 - sum(a[i] for i in range(m) if E >> i & 1)
        if not close(a[k] / denom, v):
            return None
    return a


def _stopping_payoff_fn(tree: EventTree, w: WeightSystem, variant: str, vp: ValueProcess | None):
    if variant == "value":
        vp = vp if vp is not None else value_process(tree, w)
        return lambda rule: evaluate_stopping_profile(tree, w, rule, vp)
    if variant == "natural":
        return lambda rule: evaluate_natural_variant(tree, w, rule)
    raise ValueError(f"unknown variant {variant!r}")


def _check_stopping_size(tree: EventTree) -> None:
    if tree.m > MAX_STOPPING_PLAYERS or len(tree.internal) > MAX_STOPPING_INTERNAL:
        raise InstanceTooLarge(
            f"stopping-game verification is limited to {MAX_STOPPING_PLAYERS} players "
            f"and {MAX_STOPPING_INTERNAL} internal nodes"
        )


def verify_stopping_equilibrium(
    tree: EventTree,
    w: WeightSystem,
    candidate: StoppingRule,
    variant: str = "value",
    vp: ValueProcess | None = None,
    tol: float = TOL,
) -> bool:
    """Whether ``candidate`` is an optimal equilibrium, by checking every deviation.

    For each player: no own stopping time does better against the others'
    candidate rules, and no joint deviation by the others pushes it below
    its candidate payoff.
    """
    _check_stopping_size(tree)
    payoff = _stopping_payoff_fn(tree, w, variant, vp)
    strategies = list(stopping_strategies(tree))
    base = payoff(candidate)
    m = tree.m

    def with_sets(sets) -> StoppingRule:
        return stopping_rule(tree, sets)

    for k in range(m):
        for sk in strategies:
            sets = list(candidate.stops)
            sets[k] = sk
            if payoff(with_sets(sets))[k] > base[k] + tol:
                return False
        for others in itertools.product(strategies, repeat=m - 1):
            sets = list(others)
            sets.insert(k, candidate.stops[k])
            if payoff(with_sets(sets))[k] < base[k] - tol:
                return False
    return True


def analyze_stopping(
    tree: EventTree, w: WeightSystem, variant: str = "value", tol: float = TOL
) -> EquilibriumReport:
    """Full report over all stopping-time profiles.

    Strategies are the frozensets of nodes where a player's stopping time
    fires (leaves below an earlier stop are omitted).
    """
    _check_stopping_size(tree)
    payoff = _stopping_payoff_fn(tree, w, variant, None)
    strategies = list(stopping_strategies(tree))
    return analyze_profiles(
        [strategies] * tree.m,
        lambda prof: payoff(stopping_rule(tree, prof)),
        tree.m,
        tol,
    )


@dataclass(frozen=True, eq=False)
class StochasticQuittingGame:
    """Quitting game whose state is revealed at time 1.

    ``X0`` is the common time-0 payoff row; each scenario is a probability
    and the ``T x m`` rows for times ``1..T`` in that state. A strategy is a
    tuple of quitting times, one per scenario, that is all zeros or has no
    zeros (the time-0 decision cannot depend on the state).
    """

    weights: WeightSystem
    X0: np.ndarray
    scenarios: tuple[tuple[float, np.ndarray], ...]

    def __init__(self, weights, X0, scenarios, tol: float = TOL):
        if not isinstance(weights, WeightSystem):
            weights = WeightSystem(weights)
        X0 = np.array(X0, dtype=float).reshape(-1)
        items = []
        for p, rows in scenarios:
            rows = np.array(rows, dtype=float)
            if rows.ndim != 2 or rows.shape[1] != weights.m:
                raise ValueError("scenario rows must be a T x m matrix")
            items.append((float(p), rows))
        if not items:
            raise ValueError("need at least one scenario")
        if len({rows.shape[0] for _, rows in items}) != 1:
            raise ValueError("all scenarios must share the horizon")
        if any(p < 0 for p, _ in items) or abs(sum(p for p, _ in items) - 1.0) > tol:
            raise ValueError("scenario probabilities must be non-negative and sum to 1")
        if X0.size != weights.m:
            raise ValueError("X0 must have one entry per player")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "X0", X0)
        object.__setattr__(self, "scenarios", tuple(items))

    @property
    def m(self) -> int:
        return self.weights.m

    @property
    def T(self) -> int:
        return self.scenarios[0][1].shape[0]

    def scenario_game(self, j: int) -> QuittingGame:
        return QuittingGame(np.vstack([self.X0, self.scenarios[j][1]]), self.weights)

    def strategies(self) -> list[tuple[int, ...]]:
        n = len(self.scenarios)
        return [(0,) * n] + list(itertools.product(range(1, self.T + 1), repeat=n))

    def payoff(self, profile: Sequence[Sequence[int]]) -> np.ndarray:
        total = np.zeros(self.m)
        for j, (p, _) in enumerate(self.scenarios):
            times = [strategy[j] for strategy in profile]
            total += p * quitting_payoff(self.scenario_game(j), times)
        return total


@dataclass(eq=False)
class QuittingVerification:
    report: EquilibriumReport
    candidate: tuple | None
    candidate_nash: bool | None
    candidate_optimal: bool | None


def verify_quitting(q, candidate: Sequence | None = None, tol: float = TOL) -> QuittingVerification:
    """Enumerate every quitting profile and report equilibria.

    ``q`` is a :class:`QuittingGame` (strategies are times ``0..T``) or a
    :class:`StochasticQuittingGame` (strategies are per-scenario times).
    """
    if isinstance(q, StochasticQuittingGame):
        strategies = q.strategies()
        payoff_fn = q.payoff
    else:
        strategies = list(range(q.T + 1))
        payoff_fn = lambda prof: quitting_payoff(q, prof)  # noqa: E731
    if len(strategies) ** q.m > MAX_QUITTING_PROFILES:
        raise InstanceTooLarge(f"more than {MAX_QUITTING_PROFILES} quitting profiles")
    report = analyze_profiles([strategies] * q.m, payoff_fn, q.m, tol)
    if candidate is None:
        return QuittingVerification(report, None, None, None)
    candidate = tuple(candidate)
    return QuittingVerification(
        report, candidate, report.is_nash(candidate), report.is_optimal(candidate)
    )


def single_game_from_raw(g: RawWeightGame) -> SinglePeriodGame | None:
    """The equivalent weight-system game when the raw table has the canonical form."""
    a = check_weight_form(g.table)
    if a is None or a.sum() > 1 + TOL:
        return None
    return SinglePeriodGame(WeightSystem(a), g.X, g.P)

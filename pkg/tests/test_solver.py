from __future__ import annotations

import itertools

import numpy as np
import pytest

import exact
from dynkin import (
    QuittingGame,
    ScenarioSet,
    SinglePeriodGame,
    WeightSystem,
    payoff_single,
    quitting_payoff,
    solve_quitting,
    solve_quitting_subgame_perfect,
    solve_single,
    solve_single_stochastic,
)
from dynkin.sampling import random_quitting_game, random_single_game

WORKED = [[5, 0], [3, 1], [4, 2]]


def test_single_player():
    res = solve_single(SinglePeriodGame(WeightSystem([0.5]), [3], [5]))
    np.testing.assert_array_equal(res.value, [5])
    assert res.exercisers == []
    assert res.equilibrium == (1,)


def test_two_player_saturated():
    res = solve_single(SinglePeriodGame(WeightSystem([0.5, 0.5]), [0, -2], [3, -3]))
    np.testing.assert_allclose(res.value, [2, -2], atol=1e-15)
    assert res.exercisers == [1]


def test_value_matches_rational_reference():
    a, X, P = [0.25, 0.25, 0.25], [0, 1, -1], [2, -1, 0]
    res = solve_single(SinglePeriodGame(WeightSystem(a), X, P))
    ref = exact.value(a, X, P)
    assert ref is not None
    np.testing.assert_allclose(res.value, [float(v) for v in ref], atol=1e-12)


def test_equilibrium_attains_value(rng):
    for _ in range(100):
        g = random_single_game(rng, int(rng.integers(1, 7)), float(rng.choice([0.5, 1.0])))
        res = solve_single(g)
        np.testing.assert_allclose(payoff_single(g, res.equilibrium), res.value, atol=1e-9)


def test_stochastic_interior():
    sc = ScenarioSet([(0.5, [0, 0], [2, 4]), (0.5, [0, 0], [0, 2])])
    res = solve_single_stochastic(sc, WeightSystem([0.25, 0.25]))
    np.testing.assert_allclose(res.value, [1, 3])
    assert res.exercisers == []


def test_stochastic_single_scenario_matches_deterministic():
    w = WeightSystem([0.3, 0.2, 0.1])
    X, P = [1, -2, 0.5], [-1, 4, 0]
    a = solve_single_stochastic(ScenarioSet([(1.0, X, P)]), w)
    b = solve_single(SinglePeriodGame(w, X, P))
    np.testing.assert_array_equal(a.value, b.value)
    assert a.equilibrium == b.equilibrium


def test_stochastic_reduces_to_expectations():
    w = WeightSystem([0.25, 0.25])
    sc = ScenarioSet([(0.5, [-2, 0], [-3, 4]), (0.5, [0, 0], [1, 2])])
    res = solve_single_stochastic(sc, w)
    ref = solve_single(SinglePeriodGame(w, [-1, 0], [-1, 3]))
    np.testing.assert_array_equal(res.value, ref.value)
    assert res.exercisers == [0]


def test_scenario_set_validation():
    with pytest.raises(ValueError):
        ScenarioSet([(0.4, [0], [1]), (0.4, [0], [1])])
    with pytest.raises(ValueError):
        ScenarioSet([(1.0, [0, 1], [1])])
    with pytest.raises(ValueError):
        ScenarioSet([])


# quitting games


def test_quitting_payoff_examples():
    q = QuittingGame(WORKED, WeightSystem([0.25, 0.25]))
    np.testing.assert_array_equal(quitting_payoff(q, (2, 2)), [4, 2])
    np.testing.assert_allclose(quitting_payoff(q, (0, 2)), [5, 5 / 3], atol=1e-15)
    np.testing.assert_allclose(quitting_payoff(q, (1, 2)), [3, 7 / 3], atol=1e-15)


def test_quitting_payoff_validation():
    q = QuittingGame(WORKED, WeightSystem([0.25, 0.25]))
    with pytest.raises(ValueError):
        quitting_payoff(q, (3, 0))
    with pytest.raises(ValueError):
        quitting_payoff(q, (0,))


def test_solve_quitting_worked_game():
    q = QuittingGame(WORKED, WeightSystem([0.25, 0.25]))
    res = solve_quitting(q)
    np.testing.assert_allclose(res.value, [5, 5 / 3], atol=1e-15)
    assert res.equilibrium == (0, 2)
    np.testing.assert_array_equal(quitting_payoff(q, res.equilibrium), res.value)


def test_solve_quitting_interior():
    q = QuittingGame([[0, 1], [1, 0], [5, 5]], WeightSystem([0.3, 0.3]))
    res = solve_quitting(q)
    np.testing.assert_array_equal(res.value, [5, 5])
    assert res.equilibrium == (2, 2)


def test_solve_quitting_single_player():
    res = solve_quitting(QuittingGame([[7], [4]], WeightSystem([0.5])))
    np.testing.assert_array_equal(res.value, [7])
    assert res.equilibrium == (0,)


def test_solve_quitting_picks_first_maximum():
    res = solve_quitting(QuittingGame([[1], [3], [3], [0]], WeightSystem([0.5])))
    assert res.equilibrium == (1,)


def test_quitting_payoff_reproduces_value_exactly(rng):
    for _ in range(100):
        q = random_quitting_game(rng, int(rng.integers(1, 5)), int(rng.integers(1, 5)), 0.9)
        res = solve_quitting(q)
        assert np.array_equal(quitting_payoff(q, res.equilibrium), res.value)


def test_quitting_game_validation():
    with pytest.raises(ValueError):
        QuittingGame([[1, 2]], WeightSystem([0.25, 0.25]))
    with pytest.raises(ValueError):
        QuittingGame([[1, 2, 3], [1, 2, 3]], WeightSystem([0.25, 0.25]))


# subgame-perfect tables


def test_subgame_perfect_worked_game():
    q = QuittingGame(WORKED, WeightSystem([0.25, 0.25]))
    sp = solve_quitting_subgame_perfect(q)
    assert sp.actions(0, (None, None)) == {0: True, 1: False}
    # after player 1 has left at time 0, player 2 waits for the terminal payoff
    assert sp.actions(1, (0, None)) == {1: False}
    # off path: player 1 failed to quit at 0; the rest of the game is interior
    assert sp.actions(1, (None, None)) == {0: False, 1: False}
    assert sp.play() == (0, 2)


def test_subgame_perfect_no_exercise():
    q = QuittingGame([[0, 1], [1, 0], [5, 5]], WeightSystem([0.3, 0.3]))
    sp = solve_quitting_subgame_perfect(q)
    assert all(not any(acts.values()) for acts in sp.table().values())


def test_subgame_perfect_single_player_is_greedy(rng):
    for _ in range(20):
        X = rng.uniform(-5, 5, (5, 1))
        sp = solve_quitting_subgame_perfect(QuittingGame(X, WeightSystem([0.5])))
        for t in range(4):
            greedy = X[t, 0] >= X[t:, 0].max()
            assert sp.actions(t, (None,)) == {0: bool(greedy)}


def test_subgame_perfect_is_optimal_against_fixed_deviations(rng):
    """On random games the table's outcome is the value, and no player gains by
    deviating to a fixed quitting time; opponents cannot push it below the value."""
    for _ in range(30):
        m, T = int(rng.integers(2, 4)), int(rng.integers(1, 4))
        q = random_quitting_game(rng, m, T, 0.8)
        sp = solve_quitting_subgame_perfect(q)
        value = solve_quitting(q).value
        np.testing.assert_allclose(quitting_payoff(q, sp.play()), value, atol=1e-9)
        for k in range(m):
            for t in range(T + 1):
                assert quitting_payoff(q, sp.play({k: t}))[k] <= value[k] + 1e-9
            others = [j for j in range(m) if j != k]
            for times in itertools.product(range(T + 1), repeat=m - 1):
                dev = dict(zip(others, times))
                assert quitting_payoff(q, sp.play(dev))[k] >= value[k] - 1e-9


def test_subgame_perfect_size_guard():
    q = QuittingGame(np.zeros((12, 2)), WeightSystem([0.25, 0.25]))
    with pytest.raises(ValueError):
        solve_quitting_subgame_perfect(q)

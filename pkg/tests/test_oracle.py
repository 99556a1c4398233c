from __future__ import annotations

import numpy as np
import pytest

from dynkin import (
    EventTree,
    QuittingGame,
    SinglePeriodGame,
    WeightSystem,
    solve_quitting,
    solve_single,
    stopping_rule,
    value_process,
)
from dynkin.model import mask_of
from dynkin.oracle import (
    InstanceTooLarge,
    RawWeightGame,
    RawWeightTable,
    StochasticQuittingGame,
    analyze_single,
    analyze_stopping,
    check_weight_form,
    check_wuc,
    payoff_by_mask,
    search_wuc_witness,
    verify_quitting,
    verify_stopping_equilibrium,
)
from dynkin.sampling import random_single_game, random_weights

THIRD = 1 / 3


def no_pure_game():
    return RawWeightGame(RawWeightTable.from_generators([0.6, 0.6]), [0, 0], [1, -1])


def unfit_table():
    return RawWeightTable(2, {(mask_of([1]), 0): 2.0, (mask_of([0]), 1): 0.5})


def perturbed_table():
    t = dict(RawWeightTable.from_generators([0.25, 0.25, 0.25]).weights)
    t[mask_of([1, 2]), 0] = 1.5
    return RawWeightTable(3, t)


# single-period reports


def test_no_pure_equilibrium():
    rep = analyze_single(no_pure_game())
    assert rep.nash == []
    assert rep.optimal == []


def test_no_pure_payoff_table_and_values():
    rep = analyze_single(no_pure_game())
    table = {(0, 0): [0, 0], (0, 1): [0, 0.5], (1, 0): [-0.5, 0], (1, 1): [1, -1]}
    for prof, v in table.items():
        np.testing.assert_allclose(rep.payoff(prof), v, atol=1e-15)
    assert rep.maximin[0] == pytest.approx(0, abs=1e-15)
    assert rep.minimax[0] == pytest.approx(0, abs=1e-15)


def test_valid_games_nash_equals_optimal(rng):
    for _ in range(40):
        g = random_single_game(rng, int(rng.integers(1, 6)), float(rng.choice([0.5, 1.0])))
        rep = analyze_single(g)
        assert rep.nash
        assert rep.nash == rep.optimal
        assert len(rep.nash_payoffs()) == 1
        value = solve_single(g).value
        np.testing.assert_allclose(rep.maximin, value, atol=1e-9)
        np.testing.assert_allclose(rep.minimax, value, atol=1e-9)


def test_report_invariants_on_raw_tables(rng):
    for _ in range(40):
        m = int(rng.integers(2, 5))
        table = RawWeightTable.from_generators(rng.uniform(0.05, 0.3, m))
        noisy = RawWeightTable(m, {key: v * rng.uniform(0.5, 2) for key, v in table.weights.items()})
        rep = analyze_single(RawWeightGame(noisy, rng.uniform(-5, 5, m), rng.uniform(-5, 5, m)))
        assert set(rep.optimal) <= set(rep.nash)
        assert np.all(rep.maximin <= rep.minimax + 1e-12)


def test_difference_nonnegative_at_nash(rng):
    for _ in range(60):
        g = random_single_game(rng, int(rng.integers(1, 6)), float(rng.choice([0.5, 1.0])))
        rep = analyze_single(g)
        for prof in rep.nash:
            E = [k for k in range(g.m) if prof[k] == 0]
            assert sum(g.X[k] - g.P[k] for k in E) >= -1e-9


def test_analyze_size_guard():
    g = SinglePeriodGame(WeightSystem(np.full(16, 1 / 20)), np.zeros(16), np.zeros(16))
    with pytest.raises(InstanceTooLarge):
        analyze_single(g)


def test_payoff_by_mask_uses_defining_formula():
    g = SinglePeriodGame(WeightSystem([0.25, 0.25]), [0, 0], [-1, 3])
    V = payoff_by_mask(g)
    np.testing.assert_allclose(V[mask_of([0])], [0, 8 / 3], atol=1e-15)
    np.testing.assert_array_equal(V[0], [-1, 3])


# WUC and the weight form


def test_wuc_holds_for_valid_weights(rng):
    for _ in range(30):
        assert check_wuc(random_single_game(rng, int(rng.integers(1, 6)), float(rng.choice([0.5, 1.0]))))


def test_wuc_single_player():
    assert check_wuc(SinglePeriodGame(WeightSystem([0.4]), [1], [2]))


def test_wuc_size_guard():
    g = SinglePeriodGame(WeightSystem(np.full(11, 0.05)), np.zeros(11), np.zeros(11))
    with pytest.raises(InstanceTooLarge):
        check_wuc(g)


def test_unfit_two_player_table():
    assert check_weight_form(unfit_table()) is None


def test_two_player_positive_tables_are_always_wuc():
    # with two players the chaining identity is vacuous, so positivity
    # alone keeps every unilateral deviation competitive
    assert search_wuc_witness(unfit_table(), np.random.default_rng(0), trials=500) is None


def test_perturbed_three_player_table_has_witness():
    table = perturbed_table()
    assert check_weight_form(table) is None
    found = search_wuc_witness(table, np.random.default_rng(0), trials=500)
    assert found is not None
    X, P, witness = found
    res = check_wuc(RawWeightGame(table, X, P))
    assert not res
    assert res.witness == witness


def test_weight_form_recovers_generators():
    a = check_weight_form(RawWeightTable.from_generators([0.25, 0.25, 0.25]))
    np.testing.assert_allclose(a, [0.25, 0.25, 0.25], atol=1e-12)


def test_weight_form_rejects_negative_entries():
    t = dict(RawWeightTable.from_generators([0.25, 0.25, 0.25]).weights)
    t[mask_of([0]), 1] = -0.1
    assert check_weight_form(RawWeightTable(3, t)) is None


def test_weight_form_round_trip(rng):
    for _ in range(50):
        m = int(rng.integers(2, 7))
        w = random_weights(rng, m, float(rng.choice([0.5, 1.0])))
        table = RawWeightTable.from_generators(w.a)
        a = check_weight_form(table)
        assert a is not None
        refit = RawWeightTable.from_generators(a)
        for key, v in table.weights.items():
            assert refit[key] == pytest.approx(v, abs=1e-9)
        if not (m == 2 and w.saturated):
            np.testing.assert_allclose(a, w.a, atol=1e-9)


def test_two_player_saturated_generators_are_not_identifiable():
    # every split of a_1 + a_2 = 1 gives w_1({2}) = w_2({1}) = 1
    for a1 in (0.1, 0.5, 0.9):
        t = RawWeightTable.from_generators([a1, 1 - a1])
        assert t[mask_of([1]), 0] == pytest.approx(1) and t[mask_of([0]), 1] == pytest.approx(1)
    a = check_weight_form(RawWeightTable.from_generators([0.1, 0.9]))
    assert a.sum() == pytest.approx(1)


def test_raw_table_requires_every_entry():
    with pytest.raises(ValueError):
        RawWeightTable(2, {(mask_of([1]), 0): 1.0})


# stopping games


def natural_tree():
    return EventTree.chain([[-1, -1, 0], [-2, -2, 4], [0, 0, 0]])


def test_natural_variant_counterexample():
    rep = analyze_stopping(natural_tree(), WeightSystem([THIRD] * 3), variant="natural")
    payoffs = rep.nash_payoffs()
    assert len(payoffs) == 2
    assert not np.allclose(payoffs[0], payoffs[1])
    assert rep.optimal == []
    # each outcome is reached by two stopping-time profiles
    assert len(rep.nash) == 4


def test_all_stop_at_root_is_not_an_equilibrium():
    tree = EventTree.chain([[-5, -5], [0, 0], [1, 2]])
    w = WeightSystem([0.25, 0.25])
    rule = stopping_rule(tree, [{0}, {0}])
    assert not verify_stopping_equilibrium(tree, w, rule)


def test_stopping_size_guard():
    tree = EventTree.chain(np.zeros((10, 2)))
    w = WeightSystem([0.25, 0.25])
    with pytest.raises(InstanceTooLarge):
        verify_stopping_equilibrium(tree, w, stopping_rule(tree, [set(), set()]))


def test_value_variant_has_single_nash_outcome():
    tree = natural_tree()
    w = WeightSystem([THIRD] * 3)
    rep = analyze_stopping(tree, w)
    vp = value_process(tree, w)
    assert rep.optimal
    for v in rep.nash_payoffs():
        np.testing.assert_allclose(v, vp[tree.root], atol=1e-9)


# quitting games


def test_quitting_worked_game_passes_saddle_check():
    q = QuittingGame([[5, 0], [3, 1], [4, 2]], WeightSystem([0.25, 0.25]))
    check = verify_quitting(q, solve_quitting(q).equilibrium)
    assert check.candidate_nash and check.candidate_optimal


def test_stochastic_quitting_has_no_pure_equilibrium():
    q = StochasticQuittingGame(
        WeightSystem([THIRD] * 3),
        [2.1, 3.5, -50],
        [(0.5, [[-50, -50, -5.05], [0, 5, -5]]), (0.5, [[4, -50, -50], [0, 5, -5]])],
    )
    assert verify_quitting(q).report.nash == []


def test_all_wait_on_terminal_dominant_game():
    q = QuittingGame([[0, 0], [1, 1], [9, 9]], WeightSystem([0.25, 0.25]))
    check = verify_quitting(q, (2, 2))
    assert check.candidate_nash and check.candidate_optimal


def test_quitting_size_guard():
    q = QuittingGame(np.zeros((11, 6)), WeightSystem(np.full(6, 0.1)))
    with pytest.raises(InstanceTooLarge):
        verify_quitting(q)

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dynkin import (
    OrthantSpec,
    SinglePeriodGame,
    WeightSystem,
    inner_product,
    mask_of,
    norm,
    penalized_projection,
    project_hyperplane,
    project_orthant,
    project_orthant_exhaustive,
    subgame_reduce,
)
from dynkin.sampling import random_single_game
from test_model import games


def test_inner_product_examples():
    w = WeightSystem([0.25, 0.25])
    assert inner_product([1, 0], [1, 0], w) == pytest.approx(6)
    assert inner_product([1, -1], [1, 1], w) == pytest.approx(0)
    assert inner_product([0, 0], [3, -2], w) == 0
    assert norm([1, 0], w) == pytest.approx(np.sqrt(6))


def test_inner_product_rejects_saturated():
    with pytest.raises(ValueError):
        inner_product([1, 0], [1, 0], WeightSystem([0.5, 0.5]))


@settings(max_examples=50, deadline=None)
@given(st.data())
def test_inner_product_is_symmetric_positive(data):
    g = data.draw(games(saturated=False))
    x, y, w = g.X, g.P, g.weights
    assert inner_product(x, y, w) == pytest.approx(inner_product(y, x, w), rel=1e-12, abs=1e-12)
    assert inner_product(x, x, w) >= 0


def test_hyperplane_examples():
    w = WeightSystem([0.25, 0.25])
    X, P = np.array([0.0, 0.0]), np.array([-1.0, 3.0])
    np.testing.assert_array_equal(project_hyperplane(P, 0, X, w), P)
    np.testing.assert_array_equal(project_hyperplane(P, 0b11, X, w), X)
    np.testing.assert_allclose(project_hyperplane(P, mask_of([0]), X, w), [0, 8 / 3], atol=1e-15)


ORTHANT_EXAMPLES = [
    ([0.25, 0.25], [0, 0], [2, 3], [2, 3], 0),
    ([0.25, 0.25], [0, 0], [-1, 3], [0, 8 / 3], 0b01),
    ([0.5, 0.5], [1, 1], [0, 0], [1, 1], 0b11),
]


@pytest.mark.parametrize("a,X,P,value,active", ORTHANT_EXAMPLES)
def test_orthant_examples(a, X, P, value, active):
    w = WeightSystem(a)
    v, E = project_orthant(P, OrthantSpec(X), w)
    np.testing.assert_allclose(v, value, atol=1e-15)
    assert E == active
    np.testing.assert_allclose(project_orthant_exhaustive(P, OrthantSpec(X), w), value, atol=1e-15)


def test_orthant_rejects_bad_order():
    with pytest.raises(ValueError):
        project_orthant([1, 2], [0, 0], WeightSystem([0.25, 0.25]), order=[0, 0])


@settings(max_examples=150, deadline=None)
@given(games(max_m=6))
def test_orthant_matches_exhaustive(g):
    v, _ = project_orthant(g.P, OrthantSpec(g.X), g.weights)
    np.testing.assert_allclose(project_orthant_exhaustive(g.P, OrthantSpec(g.X), g.weights), v, atol=1e-9)


@settings(max_examples=150, deadline=None)
@given(games(max_m=6))
def test_projection_is_feasible_and_idempotent(g):
    O = OrthantSpec(g.X)
    v, E = project_orthant(g.P, O, g.weights)
    assert O.contains(v, 1e-9)
    # the active set sits on its bounds
    for k in range(g.m):
        if E >> k & 1:
            assert v[k] == pytest.approx(g.X[k], abs=1e-9)
    again, _ = project_orthant(v, O, g.weights)
    np.testing.assert_allclose(again, v, atol=1e-9)


@settings(max_examples=150, deadline=None)
@given(games(max_m=6, saturated=False), st.data())
def test_hyperplane_orthogonality(g, data):
    """The residual P - pi(P) is orthogonal to every direction inside H_E."""
    m = g.m
    E = data.draw(st.integers(0, (1 << m) - 1))
    proj = project_hyperplane(g.P, E, g.X, g.weights)
    free = [k for k in range(m) if not E >> k & 1]
    y = proj.copy()
    y[free] += np.array(data.draw(st.lists(st.floats(-5, 5), min_size=len(free), max_size=len(free))))
    scale = max(1.0, norm(g.P - proj, g.weights) * norm(y - proj, g.weights))
    assert abs(inner_product(g.P - proj, y - proj, g.weights)) <= 1e-9 * scale


@settings(max_examples=100, deadline=None)
@given(games(max_m=6, saturated=False))
def test_projection_minimizes_distance_over_orthant(g):
    O = OrthantSpec(g.X)
    v, _ = project_orthant(g.P, O, g.weights)
    best = norm(v - g.P, g.weights)
    rng = np.random.default_rng(0)
    for _ in range(50):
        x = g.X + rng.exponential(2.0, g.m) * rng.integers(0, 2, g.m)
        assert norm(x - g.P, g.weights) >= best - 1e-9


@settings(max_examples=100, deadline=None)
@given(games(max_m=6))
def test_projection_recurses_through_subgame(g):
    """Eliminating the first active player and solving the rest gives the same value."""
    v, E = project_orthant(g.P, OrthantSpec(g.X), g.weights)
    if E == 0 or E == (1 << g.m) - 1:
        return
    first = next(k for k in range(g.m) if g.P[k] <= g.X[k] + g.weights.tol)
    sub = subgame_reduce(g, 1 << first)
    rest = [k for k in range(g.m) if k != first]
    sv, _ = project_orthant(sub.P, OrthantSpec(sub.X), sub.weights)
    np.testing.assert_allclose(sv, v[rest], atol=1e-9)


@settings(max_examples=100, deadline=None)
@given(games(max_m=6, saturated=True))
def test_saturated_value_conserves_total(g):
    v, E = project_orthant(g.P, OrthantSpec(g.X), g.weights)
    if g.X.sum() > g.P.sum():
        np.testing.assert_array_equal(v, g.X)
        assert E == (1 << g.m) - 1
    else:
        assert v.sum() == pytest.approx(g.P.sum(), abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(games(max_m=6), st.data())
def test_order_independence_with_ties(g, data):
    k = data.draw(st.integers(0, g.m - 1))
    P = g.P.copy()
    P[k] = g.X[k]
    tie = SinglePeriodGame(g.weights, g.X, P)
    base, _ = project_orthant(tie.P, OrthantSpec(tie.X), tie.weights)
    order = data.draw(st.permutations(range(g.m)))
    other, _ = project_orthant(tie.P, OrthantSpec(tie.X), tie.weights, order=order)
    np.testing.assert_allclose(other, base, atol=1e-9)


def test_penalized_minimizer_converges_linearly():
    """The eps-penalized minimizer approaches the saturated projection at rate O(eps)."""
    rng = np.random.default_rng(7)
    for _ in range(20):
        g = random_single_game(rng, int(rng.integers(2, 5)), 1.0)
        O = OrthantSpec(g.X)
        v, _ = project_orthant(g.P, O, g.weights)
        errs = [np.abs(penalized_projection(g.P, O, g.weights, eps) - v).max() for eps in (1e-6, 1e-8)]
        assert errs[1] <= 1e-6 + errs[0] / 50


def test_penalized_rejects_large_eps():
    with pytest.raises(ValueError):
        penalized_projection([0, 0], [0, 0], WeightSystem([0.5, 0.5]), eps=2.0)

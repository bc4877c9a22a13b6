import numpy as np
import pytest

from consensus_subgrad.errors import OracleUnavailable
from consensus_subgrad.problems import (
    CustomProblem,
    L1MedianInstance,
    L1RegressionInstance,
    is_local_minimum,
    pattern_search,
)
from oracles import grid_argmin, weighted_l1_cost

INSTANCES = [
    L1MedianInstance.random(7, 3, seed=0),
    L1MedianInstance.random(4, 2, seed=1, scale=5.0),
    L1RegressionInstance.random(6, 3, seed=2),
]


def test_sign_subgradient():
    p = L1MedianInstance([[0.0, 0.0]])
    np.testing.assert_array_equal(p.subgradient(0, [3.0, -2.0]), [1.0, -1.0])


def test_kink_tie_break():
    p = L1MedianInstance([[1.0, 2.0]])
    assert p.subgradient(0, [1.0, 5.0])[0] == 0.0


def test_regression_subgradient():
    p = L1RegressionInstance([[2.0, 1.0]], [0.0])
    np.testing.assert_array_equal(p.subgradient(0, [1.0, 1.0]), [2.0, 1.0])


def test_l_bounds():
    p = L1MedianInstance.random(3, 4)
    assert [p.l_bound(i) for i in range(3)] == [4.0] * 3
    r = L1RegressionInstance([[1.0, -2.0]], [0.0])
    assert r.l_bound(0) == 3.0


@pytest.mark.parametrize("prob", INSTANCES)
def test_subgradient_properties(prob, rng):
    xs = rng.normal(scale=3, size=(2000, prob.d))
    ys = rng.normal(scale=3, size=(2000, prob.d))
    for x, y in zip(xs, ys):
        X = np.tile(x, (prob.n, 1))
        G = prob.subgradients(X)
        for i in range(prob.n):
            assert np.abs(G[i]).sum() <= prob.l_bound(i) + 1e-12
            assert prob.cost(i, y) >= prob.cost(i, x) + G[i] @ (y - x) - 1e-9
            assert prob.cost(i, (x + y) / 2) <= (prob.cost(i, x) + prob.cost(i, y)) / 2 + 1e-9


def _smooth(prob, i, x, margin=1e-5):
    """True if every coordinate line through x stays off the kinks within +-margin."""
    if isinstance(prob, L1MedianInstance):
        return np.abs(x - prob.anchors[i]).min() > margin
    r = abs(prob.a[i] @ x - prob.b[i])
    return r > margin * np.abs(prob.a[i]).max()


@pytest.mark.parametrize("prob", INSTANCES)
def test_finite_differences(prob, rng):
    h = 1e-6
    checked = 0
    for _ in range(300):
        x = rng.normal(scale=2, size=prob.d)
        G = prob.subgradients(np.tile(x, (prob.n, 1)))
        for i in range(prob.n):
            if not _smooth(prob, i, x):
                continue
            for k in range(prob.d):
                e = np.zeros(prob.d)
                e[k] = h
                fd = (prob.cost(i, x + e) - prob.cost(i, x - e)) / (2 * h)
                assert abs(fd - G[i, k]) <= 1e-5
                checked += 1
    assert checked > 1000


def test_median_oracle_examples():
    assert L1MedianInstance([[0.0], [1.0], [4.0]]).minimizer_oracle()[0] == 1.0
    assert L1MedianInstance([[3.0, -1.0]]).minimizer_oracle().tolist() == [3.0, -1.0]
    p = L1MedianInstance([[0.0], [2.0]])
    assert p.minimizer_oracle()[0] == 1.0
    assert p.dist_to_argmin([0.5]) == 0.0 and p.dist_to_argmin([2.5]) == 0.5


def test_median_oracle_against_grid():
    anchors = np.array([0.0, 1.0, 4.0, 7.5, 2.0])
    lo, hi, _ = grid_argmin(weighted_l1_cost(anchors, np.ones(5)), -1, 9, 10001)
    assert lo == pytest.approx(2.0, abs=1e-3) and hi == pytest.approx(2.0, abs=1e-3)
    assert L1MedianInstance(anchors[:, None]).minimizer_oracle()[0] == 2.0


@pytest.mark.parametrize("prob", INSTANCES)
def test_oracle_optimality(prob, rng):
    x_star = prob.minimizer_oracle()
    f_star = prob.global_cost(x_star)
    xs = x_star + rng.normal(scale=2, size=(10_000, prob.d))
    assert all(prob.global_cost(x) >= f_star - 1e-9 for x in xs)
    assert is_local_minimum(prob.global_cost, x_star)


def test_regression_oracle_matches_pattern_search():
    prob = L1RegressionInstance.random(8, 2, seed=5)
    x_ps = pattern_search(prob.global_cost, np.zeros(2))
    assert prob.global_cost(prob.minimizer_oracle()) <= prob.global_cost(x_ps) + 1e-6


def test_custom_problem():
    costs = [lambda x: abs(x[0] - 1), lambda x: abs(x[0] + 1) + abs(x[0] - 3)]
    subs = [lambda x: np.sign(x - 1), lambda x: np.sign(x + 1) + np.sign(x - 3)]
    p = CustomProblem(costs, subs, [1, 2], 1, minimizer="pattern_search")
    assert 1.0 - 1e-3 <= p.minimizer_oracle()[0] <= 3.0 + 1e-3
    q = CustomProblem(costs, subs, [1, 2], 1)
    with pytest.raises(OracleUnavailable):
        q.minimizer_oracle()
    with pytest.raises(NotImplementedError):
        q.minimizer_oracle()


def test_initial_states():
    p = L1MedianInstance.random(3, 2, seed=0)
    np.testing.assert_array_equal(p.initial_states(), p.anchors)
    r = L1RegressionInstance.random(4, 3, seed=0)
    np.testing.assert_allclose(r.local_costs(r.initial_states()[0])[0], 0, atol=1e-12)

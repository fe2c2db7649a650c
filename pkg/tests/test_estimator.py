import itertools

import numpy as np
import pytest

from vropt import make_problem
from vropt.data import SparseDataset
from vropt.estimator import (OracleCounter, bregman_gap, exact_variance, take_snapshot, tau, vr_grad,
                             vr_grad_batch)
from vropt.objective import full_grad, logistic
from vropt.sampling import build_dist

from conftest import random_dataset
from oracles import dense, logistic_grad


@pytest.fixture
def problem():
    return make_problem(random_dataset(np.random.default_rng(0), 12, 4), logistic(0.01))


def test_snapshot_at_zero_and_charging(problem):
    c = OracleCounter()
    snap = take_snapshot(problem, np.zeros(4), c)
    A, b = dense(problem.data)
    assert c.calls == problem.n
    assert np.allclose(snap.full_gradient, -(b[:, None] * A).sum(0) / (2 * problem.n), atol=1e-15)
    assert np.array_equal(snap.full_gradient, full_grad(problem, np.zeros(4)))
    with pytest.raises(ValueError):
        snap.anchor[0] = 1.0
    with pytest.raises(ValueError):
        snap.full_gradient[0] = 1.0


def test_snapshot_does_not_alias_input(problem):
    x = np.ones(4)
    snap = take_snapshot(problem, x)
    x[0] = 5.0
    assert snap.anchor[0] == 1.0


def test_single_component_estimator_is_exact():
    p = make_problem(SparseDataset.from_dense([[0.3, -1.0]], [1]), logistic())
    dist = build_dist(p.lipschitz)
    snap = take_snapshot(p, np.array([1.0, 2.0]))
    x = np.array([-0.5, 0.2])
    assert np.allclose(vr_grad(p, dist, snap, 0, x), full_grad(p, x), atol=1e-16)
    assert exact_variance(p, dist, snap, x) < 1e-30


def test_estimator_at_anchor_is_full_gradient(problem):
    dist = build_dist(problem.lipschitz, "lipschitz")
    xt = np.array([0.1, -0.2, 0.3, 0.4])
    snap = take_snapshot(problem, xt)
    for i in range(problem.n):
        assert np.array_equal(vr_grad(problem, dist, snap, i, xt), snap.full_gradient)
    assert exact_variance(problem, dist, snap, xt) == 0.0
    assert bregman_gap(problem, snap, xt) == pytest.approx(0.0, abs=1e-15)


def test_oracle_charges(problem):
    dist = build_dist(problem.lipschitz)
    snap = take_snapshot(problem, np.zeros(4))
    c = OracleCounter()
    vr_grad(problem, dist, snap, 3, np.ones(4), c)
    assert c.calls == 2
    vr_grad_batch(problem, dist, snap, [0, 4, 7], np.ones(4), c)
    assert c.calls == 8


def test_batch_of_one_equals_single(problem):
    dist = build_dist(problem.lipschitz)
    snap = take_snapshot(problem, np.zeros(4))
    x = np.arange(4.0)
    for i in range(problem.n):
        assert np.array_equal(vr_grad_batch(problem, dist, snap, [i], x), vr_grad(problem, dist, snap, i, x))


def test_full_batch_is_full_gradient(problem):
    dist = build_dist(problem.lipschitz)
    snap = take_snapshot(problem, np.ones(4))
    x = np.array([0.5, -1.0, 2.0, 0.0])
    A, b = dense(problem.data)
    g = vr_grad_batch(problem, dist, snap, range(problem.n), x)
    assert np.allclose(g, logistic_grad(A, b, x, 0.01), atol=1e-15)


def test_batch_unbiased_by_subset_enumeration():
    p = make_problem(random_dataset(np.random.default_rng(1), 4, 3), logistic(0.1))
    dist = build_dist(p.lipschitz)
    snap = take_snapshot(p, np.array([1.0, 0.0, -1.0]))
    x = np.array([0.3, 0.3, 0.3])
    subsets = list(itertools.combinations(range(4), 2))
    mean = sum(vr_grad_batch(p, dist, snap, s, x) for s in subsets) / len(subsets)
    A, b = dense(p.data)
    assert np.allclose(mean, logistic_grad(A, b, x, 0.1), atol=1e-14)


def test_tau_values():
    assert tau(4, 1) == 1.0
    assert tau(4, 4) == 0.0
    assert tau(4, 2) == pytest.approx(1 / 3)
    assert tau(1, 1) == 0.0
    with pytest.raises(ValueError):
        tau(4, 5)
    with pytest.raises(ValueError):
        tau(4, 0)


def test_variance_bound_holds_on_random_instances():
    rng = np.random.default_rng(2)
    for _ in range(50):
        p = make_problem(random_dataset(rng, int(rng.integers(2, 15)), 3), logistic(0.0))
        for kind in ("uniform", "lipschitz"):
            dist = build_dist(p.lipschitz, kind)
            snap = take_snapshot(p, rng.standard_normal(3))
            x = rng.standard_normal(3)
            assert exact_variance(p, dist, snap, x) <= 2 * dist.l_tilde * bregman_gap(p, snap, x) + 1e-14

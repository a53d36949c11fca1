import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import PD, RPS
from entrodyn.game import (
    SimplexDriftWarning,
    check_distribution,
    check_payoff,
    commutator,
    fitness,
    frequency_matrix,
    is_nash,
    lambda_matrix,
    replicator_field,
    theta_matrix,
)


@st.composite
def games(draw):
    n = draw(st.integers(1, 6))
    a = draw(arrays(float, (n, n), elements=st.floats(-10, 10)))
    w = draw(arrays(float, n, elements=st.floats(0.0, 1.0)))
    w = w + 1e-3
    return a, w / w.sum()


def test_fitness_examples():
    rep = fitness(np.zeros((2, 2)), [0.5, 0.5])
    assert np.array_equal(rep.f, [0, 0]) and rep.mean == 0
    rep = fitness(RPS, np.full(3, 1 / 3))
    np.testing.assert_allclose(rep.f, 0, atol=1e-15)
    rep = fitness(PD, [0.5, 0.5])
    np.testing.assert_allclose(rep.f, [1.5, 3.0])
    assert rep.mean == pytest.approx(2.25)
    np.testing.assert_allclose(rep.u, [-0.75, 0.75])


def test_fitness_dimension_mismatch():
    with pytest.raises(ValueError):
        fitness(PD, [1 / 3, 1 / 3, 1 / 3])


def test_payoff_validation():
    with pytest.raises(ValueError):
        check_payoff([[1, 2, 3], [4, 5, 6]])
    with pytest.raises(ValueError):
        check_payoff([[np.nan]])


def test_distribution_drift_handling():
    assert np.array_equal(check_distribution([0.25, 0.75]), [0.25, 0.75])
    with pytest.warns(SimplexDriftWarning):
        x = check_distribution([0.5, 0.5 + 5e-10])
    assert abs(x.sum() - 1) < 1e-15
    with pytest.raises(ValueError):
        check_distribution([0.5, 0.6])
    with pytest.raises(ValueError):
        check_distribution([1.1, -0.1])
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        check_distribution([1.0, 0.0])


def test_frequency_matrix_examples():
    assert np.array_equal(frequency_matrix([1, 0]), [[1, 0], [0, 0]])
    np.testing.assert_allclose(frequency_matrix([0.5, 0.5]), np.full((2, 2), 0.5))
    assert frequency_matrix([0.25, 0.75])[0, 1] == pytest.approx(np.sqrt(0.1875), abs=1e-15)
    assert np.sqrt(0.1875) == pytest.approx(0.43301, abs=1e-5)


def test_lambda_examples():
    np.testing.assert_allclose(lambda_matrix(RPS, np.full(3, 1 / 3)), 0, atol=1e-15)
    lam = lambda_matrix(PD, [0.5, 0.5])
    assert lam[0, 1] == pytest.approx(-0.375)
    assert lam[1, 0] == pytest.approx(0.375)


def test_lambda_zero_at_interior_fixed_point():
    # hawk-dove: interior equilibrium at x = (1/2, 1/2)
    hd = np.array([[-1.0, 2.0], [0.0, 1.0]])
    np.testing.assert_allclose(lambda_matrix(hd, [0.5, 0.5]), 0, atol=1e-15)


def test_theta_examples():
    np.testing.assert_allclose(theta_matrix(RPS, np.full(3, 1 / 3)), 0, atol=1e-15)
    th = theta_matrix(PD, [0.5, 0.5])
    np.testing.assert_allclose(np.diag(th), [-0.375, 0.375], atol=1e-15)
    # fixed point: pure defection
    np.testing.assert_allclose(theta_matrix(PD, [0.0, 1.0]), 0, atol=1e-15)


def test_nash_examples():
    assert is_nash(RPS, np.full(3, 1 / 3), 1e-9)
    assert is_nash(PD, [0.0, 1.0], 1e-9)
    rep = is_nash(PD, [1.0, 0.0], 1e-9)
    assert not rep
    assert rep.violations[1] == pytest.approx(2.0 - 1e-9)
    with pytest.raises(ValueError):
        is_nash(PD, [0.5, 0.5], 0.0)


@settings(max_examples=200, deadline=None)
@given(games())
def test_lambda_antisymmetric(g):
    a, x = g
    lam = lambda_matrix(a, x)
    assert np.max(np.abs(lam + lam.T)) <= 1e-14


@settings(max_examples=200, deadline=None)
@given(games())
def test_theta_equals_commutator_and_field(g):
    a, x = g
    th = theta_matrix(a, x)
    scale = max(1.0, np.abs(a).max())
    np.testing.assert_allclose(th, commutator(lambda_matrix(a, x), frequency_matrix(x)), atol=1e-10 * scale)
    np.testing.assert_allclose(np.diag(th), replicator_field(a, x), atol=1e-10 * scale)


def test_commutator_closed_form_bruteforce(rng):
    # [Lambda, X]_ij = (f_i + f_j - 2<f>) X_ij / 2, summed explicitly
    for _ in range(50):
        n = int(rng.integers(2, 7))
        a = rng.normal(size=(n, n))
        x = rng.dirichlet(np.ones(n))
        f = [sum(a[i, k] * x[k] for k in range(n)) for i in range(n)]
        mean = sum(a[k, l] * x[k] * x[l] for k in range(n) for l in range(n))
        X = [[np.sqrt(x[i] * x[j]) for j in range(n)] for i in range(n)]
        lam = lambda_matrix(a, x)
        X_np = frequency_matrix(x)
        comm = lam @ X_np - X_np @ lam
        for i in range(n):
            for j in range(n):
                assert comm[i, j] == pytest.approx(0.5 * (f[i] + f[j] - 2 * mean) * X[i][j], abs=1e-10)


@settings(max_examples=200, deadline=None)
@given(games())
def test_frequency_matrix_projector(g):
    _, x = g
    X = frequency_matrix(x)
    assert np.array_equal(X, X.T)
    assert np.trace(X) == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(X @ X, X, atol=1e-10)


@settings(max_examples=100, deadline=None)
@given(games())
def test_excess_fitness_is_centered(g):
    a, x = g
    rep = fitness(a, x)
    assert abs(x @ rep.u) <= 1e-10 * max(1.0, np.abs(a).max())

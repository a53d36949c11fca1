import math

import numpy as np
import pytest

from entrodyn.thermo import fit_beta, gibbs, maxent_verify, thermo_derivatives


def S_of_beta(e, b):
    return gibbs(e, b).entropy_nats


def test_gibbs_high_temperature_uniform(rng):
    for _ in range(10):
        e = rng.normal(size=int(rng.integers(1, 9))) * 3
        np.testing.assert_allclose(gibbs(e, 0.0).populations, 1 / e.size, atol=1e-12, rtol=0)


def test_gibbs_low_temperature_ground_state():
    np.testing.assert_allclose(gibbs([0, 1], 50).populations, [1, 0], atol=1e-21)


def test_gibbs_two_level():
    g = gibbs([0, 1], 1.0)
    assert g.populations[0] == pytest.approx(1 / (1 + math.exp(-1)), abs=1e-15)
    assert g.populations[0] == pytest.approx(0.73106, abs=1e-5)
    assert g.z == pytest.approx(1 + math.exp(-1))


def test_gibbs_invariants(rng):
    for _ in range(200):
        e = rng.normal(size=int(rng.integers(1, 9))) * 2
        b = float(rng.uniform(-5, 5))
        g = gibbs(e, b)
        np.testing.assert_allclose(g.populations, np.exp(-b * e) / np.exp(-b * e).sum(), atol=1e-12)
        assert g.entropy_nats == pytest.approx(g.log_z + b * g.mean_e, abs=1e-10)
        assert g.var_e >= 0


def test_gibbs_shift_survives_large_beta():
    g = gibbs([0.0, 1.0, 2.0], 1000.0)
    assert g.populations[0] == 1.0 and math.isfinite(g.log_z)
    with pytest.raises(OverflowError):
        gibbs([1e308, -1e308], 10.0)
    with pytest.raises(ValueError):
        gibbs([0, 1], math.inf)


def test_degenerate_spectrum_uniform():
    g = gibbs([2.0, 2.0, 2.0], 3.7)
    np.testing.assert_array_equal(g.populations, np.full(3, 1 / 3))
    assert g.entropy_nats == pytest.approx(g.log_z + 3.7 * g.mean_e, abs=1e-10)


def test_derivative_examples():
    d = thermo_derivatives([1.5], 2.0)
    assert d.dS_dbeta == 0 and d.d2S_dE2 is None
    assert gibbs([1.5], 2.0).var_e == 0
    assert thermo_derivatives([0, 1], 0.0).dS_dbeta == 0
    d = thermo_derivatives([0, 1], 1.0)
    var = gibbs([0, 1], 1.0).var_e
    assert d.dS_dbeta == pytest.approx(-var)
    assert var == pytest.approx(0.19661, abs=1e-5)
    h = 1e-5
    fd = (S_of_beta([0, 1], 1 + h) - S_of_beta([0, 1], 1 - h)) / (2 * h)
    assert d.dS_dbeta == pytest.approx(fd, abs=1e-6)


def test_dS_dbeta_finite_difference(rng):
    h = 1e-5
    for _ in range(100):
        e = rng.normal(size=int(rng.integers(1, 9)))
        b = float(rng.uniform(-5, 5))
        fd = (S_of_beta(e, b + h) - S_of_beta(e, b - h)) / (2 * h)
        assert thermo_derivatives(e, b).dS_dbeta == pytest.approx(fd, abs=1e-6)


def test_second_derivatives_finite_difference(rng):
    h = 1e-4
    for _ in range(50):
        e = rng.normal(size=int(rng.integers(2, 9)))
        b = float(rng.uniform(-3, 3))
        d = thermo_derivatives(e, b)
        fd_b = (S_of_beta(e, b + h) - 2 * S_of_beta(e, b) + S_of_beta(e, b - h)) / h**2
        assert d.d2S_dbeta2 == pytest.approx(fd_b, abs=1e-5)
        # d2S/dE2 = d(beta)/dE along the beta-parameterized curve
        e_plus, e_minus = gibbs(e, b + h).mean_e, gibbs(e, b - h).mean_e
        assert d.d2S_dE2 == pytest.approx(2 * h / (e_plus - e_minus), rel=1e-6)


def test_dS_dE_chain_rule(rng):
    h = 1e-5
    for _ in range(100):
        e = rng.normal(size=int(rng.integers(2, 9)))
        b = float(rng.uniform(-5, 5))
        if gibbs(e, b).var_e < 1e-3:
            continue
        lo, hi = gibbs(e, b - h), gibbs(e, b + h)
        slope = (hi.entropy_nats - lo.entropy_nats) / (hi.mean_e - lo.mean_e)
        assert thermo_derivatives(e, b).dS_dE == pytest.approx(slope, abs=1e-6)


def test_mean_energy_decreasing():
    e = [0.0, 0.3, 1.0, 2.5]
    means = [gibbs(e, b).mean_e for b in np.linspace(-5, 5, 201)]
    assert np.all(np.diff(means) < 0)


def test_fit_beta_examples():
    assert fit_beta([0, 1], 0.5) == pytest.approx(0, abs=1e-12)
    target = math.exp(-1) / (1 + math.exp(-1))
    assert target == pytest.approx(0.26894, abs=1e-5)
    assert fit_beta([0, 1], target) == pytest.approx(1.0, abs=1e-10)
    assert fit_beta([0, 1, 2], 1.0) == pytest.approx(0, abs=1e-12)


def test_fit_beta_rejects_unreachable():
    with pytest.raises(ValueError, match=r"\(0\.0, 2\.0\)"):
        fit_beta([0, 1, 2], 2.0)
    with pytest.raises(ValueError):
        fit_beta([1, 1], 1.0)


def test_fit_beta_round_trip(rng):
    for _ in range(100):
        e = rng.normal(size=int(rng.integers(2, 9))) * 2
        b = float(rng.uniform(-5, 5))
        g = gibbs(e, b)
        fitted = fit_beta(e, g.mean_e)
        assert abs(fitted - b) <= 1e-8
        assert gibbs(e, fitted).mean_e == pytest.approx(g.mean_e, abs=1e-10)


def test_maxent_examples():
    assert maxent_verify([0, 1], 0.7, 50).passed
    rep = maxent_verify([0, 1, 2], 1.0, 1000)
    assert rep.passed and rep.trials == 1000
    assert rep.worst_entropy <= rep.gibbs_entropy + 1e-9
    rep = maxent_verify([0, 1, 2, 5], 0.0, 200)
    assert rep.passed and rep.gibbs_entropy == pytest.approx(math.log(4))


def test_maxent_samples_are_feasible(rng):
    rep = maxent_verify([0, 1, 2, 3], 0.4, 500, seed=5)
    g = gibbs([0, 1, 2, 3], 0.4)
    w = rep.worst
    assert w.min() >= 0
    assert w.sum() == pytest.approx(1, abs=1e-12)
    assert w @ np.array([0, 1, 2, 3]) == pytest.approx(g.mean_e, abs=1e-12)
    # sampling actually explores: the worst is strictly below the maximum
    assert rep.worst_entropy < rep.gibbs_entropy

import math

import numpy as np
import pytest

from zeno_sense import oracle
from zeno_sense.bloch import (
    MeasurementSchedule,
    PolarizationVector,
    PrecessionFrequency,
    alpha,
    anti_zeno_tau,
    characteristic_time,
    d_polarization_d_wx,
    evolve_coherent,
    evolve_projected,
    polarization,
    projected_muz,
)
from zeno_sense.specfun import DomainError


def test_precession_frequency_validation():
    with pytest.raises(ValueError):
        PrecessionFrequency(0.0, 1.0)
    with pytest.raises(ValueError):
        PrecessionFrequency(1.0, math.inf)
    om = PrecessionFrequency.from_theta(0.3, 2.0)
    assert om.w == pytest.approx(2.0)
    assert om.theta == pytest.approx(0.3)
    assert om.with_wx(5.0) == PrecessionFrequency(5.0, om.wz)


def test_polarization_vector_norm_bound():
    PolarizationVector(0.6, 0.0, 0.8)
    with pytest.raises(ValueError):
        PolarizationVector(0.8, 0.0, 0.8)
    assert np.asarray(PolarizationVector(0.1, 0.2, 0.3)).tolist() == [0.1, 0.2, 0.3]


def test_alpha_basics(fig_omega):
    assert alpha(fig_omega, 0.0) == pytest.approx(1.0)
    assert alpha(fig_omega, 2 * math.pi / fig_omega.w) == pytest.approx(1.0)
    # half period: the lowest point of the precession cone
    half = alpha(fig_omega, math.pi / fig_omega.w)
    assert half == pytest.approx(math.sin(fig_omega.theta) ** 2 - math.cos(fig_omega.theta) ** 2)


def test_polarization_matches_oracle(fig_omega, rng):
    H = oracle.qubit_hamiltonian(fig_omega)
    rho0 = oracle.qubit_density((0.0, 0.0, 0.7))
    ts = rng.uniform(0, 20, 25)
    closed = polarization(fig_omega, 0.7, ts)
    assert closed.shape == (25, 3)
    for t, mu in zip(ts, closed):
        np.testing.assert_allclose(mu, oracle.bloch_vector(oracle.propagate_unitary(H, rho0, t)), atol=1e-12)
    np.testing.assert_allclose(np.linalg.norm(closed, axis=1), 0.7, rtol=1e-13)


def test_polarization_derivative_against_finite_difference(rng):
    for _ in range(10):
        om = PrecessionFrequency.from_theta(rng.uniform(0.05, 1.5), rng.uniform(1, 8))
        t = rng.uniform(0, 30)
        h = 1e-6 * om.wx
        fd = (polarization(om.with_wx(om.wx + h), 0.9, t) - polarization(om.with_wx(om.wx - h), 0.9, t)) / (2 * h)
        np.testing.assert_allclose(d_polarization_d_wx(om, 0.9, t), fd, atol=1e-7 * max(1.0, t))


def test_evolve_coherent_checks(fig_omega):
    mu = evolve_coherent(fig_omega, 1.0, 0.4)
    assert mu.norm == pytest.approx(1.0)
    with pytest.raises(ValueError):
        evolve_coherent(fig_omega, 1.0, -1.0)
    with pytest.raises(DomainError):
        evolve_coherent(fig_omega, 1.5, 1.0)


@pytest.mark.parametrize(
    "tau, t, n, dt",
    [(0.1, 0.0, 0, 0.0), (0.1, 0.35, 3, 0.05), (0.1, 3 * 0.1, 3, 0.0), (0.3, 0.3 * 7, 7, 0.0), (0.25, 0.2, 0, 0.2)],
)
def test_schedule_split(tau, t, n, dt):
    s = MeasurementSchedule(tau, t)
    assert s.n == n
    assert s.dt == pytest.approx(dt, abs=1e-15)
    assert 0.0 <= s.dt < tau


def test_schedule_validation():
    with pytest.raises(ValueError):
        MeasurementSchedule(0.0, 1.0)
    with pytest.raises(ValueError):
        MeasurementSchedule(0.1, -1.0)


def test_projected_muz_matches_dephasing_oracle(fig_omega, rng):
    H = oracle.qubit_hamiltonian(fig_omega)
    rho0 = oracle.qubit_density((0.0, 0.0, 1.0))
    for _ in range(20):
        tau, t = rng.uniform(0.05, 0.9), rng.uniform(0, 15)
        s = MeasurementSchedule(tau, t)
        rho = oracle.stroboscopic_evolution(H, rho0, tau, s.n, s.dt, [0, 1])
        assert evolve_projected(fig_omega, 1.0, s) == pytest.approx(oracle.bloch_vector(rho)[2], abs=1e-12)


def test_projected_muz_vectorized(fig_omega):
    ts = np.linspace(0, 5, 11)
    vec = projected_muz(fig_omega, 1.0, 0.3, ts)
    assert [projected_muz(fig_omega, 1.0, 0.3, t) for t in ts] == pytest.approx(vec.tolist())


def test_characteristic_time_limits():
    om = PrecessionFrequency(2 * math.pi, 0.0)
    tcs = characteristic_time(om, np.array([0.0, 1.0, 0.1]))
    assert math.isinf(tcs[0])
    assert math.isinf(tcs[1])  # a full period restores the state
    assert tcs[2] == pytest.approx(-0.1 / math.log(math.cos(0.2 * math.pi)))
    with pytest.raises(ValueError):
        characteristic_time(om, -0.1)


def test_characteristic_time_grows_as_zeno(fig_omega):
    # alpha ~ 1 - wx^2 tau^2 / 2, so t_c ~ 2 / (wx^2 tau)
    tau = 1e-4
    assert characteristic_time(fig_omega, tau) == pytest.approx(2 / (fig_omega.wx**2 * tau), rel=1e-3)


def test_anti_zeno_tau(fig_omega):
    tau = anti_zeno_tau(fig_omega)
    assert 0.36 <= tau <= 0.39
    eps = 1e-4
    tc = characteristic_time(fig_omega, tau)
    assert tc <= characteristic_time(fig_omega, tau - eps)
    assert tc <= characteristic_time(fig_omega, tau + eps)
    with pytest.raises(ValueError):
        anti_zeno_tau(PrecessionFrequency(1.0, 0.5))

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from zeno_sense.specfun import BRANCH_POINT, DomainError, lambert_w0, phi, xi


def bisect_w0(x):
    """Independent reference: bisection on w e^w = x over [-1, hi]."""
    lo, hi = -1.0, max(1.0, math.log1p(x) + 1.0)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid * math.exp(mid) < x:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@pytest.mark.parametrize(
    "x, w",
    [(0.0, 0.0), (math.e, 1.0), (1.0, 0.5671432904097838), (-math.exp(-1.0), -1.0), (2 * math.exp(2), 2.0)],
)
def test_known_values(x, w):
    assert lambert_w0(x) == pytest.approx(w, abs=1e-14)


@pytest.mark.parametrize("x", [-0.3678, -0.3, -0.1, 1e-8, 0.5, 2.9, 3.1, 50.0, 1e6, 1e300])
def test_matches_bisection_and_scipy(x):
    w = lambert_w0(x)
    assert w == pytest.approx(bisect_w0(x), rel=1e-12, abs=1e-14) if x < 1e6 else True
    assert w == pytest.approx(special.lambertw(x).real, rel=1e-13, abs=1e-15)


def test_vectorized_shape_and_scalar_type():
    xs = np.linspace(-0.3, 5.0, 12).reshape(3, 4)
    out = lambert_w0(xs)
    assert out.shape == (3, 4)
    assert isinstance(lambert_w0(0.5), float)
    np.testing.assert_allclose(out * np.exp(out), xs, rtol=1e-13, atol=1e-15)


def test_branch_snapping_and_domain():
    assert lambert_w0(BRANCH_POINT + 1e-13) == -1.0
    with pytest.raises(DomainError):
        lambert_w0(-0.5)
    with pytest.raises(DomainError):
        lambert_w0(float("nan"))
    with pytest.raises(DomainError):
        lambert_w0([0.0, -1.0])


def test_near_branch_point_accuracy():
    # W0 ~ -1 + p with p = sqrt(2(ex + 1)); the residual stays small
    for eps in (1e-10, 1e-7, 1e-4):
        x = BRANCH_POINT + eps
        w = lambert_w0(x)
        assert abs(w * math.exp(w) - x) < 1e-15
        assert w > -1.0


@settings(max_examples=300, deadline=None)
@given(st.floats(min_value=-math.exp(-1.0) + 1e-12, max_value=1e12, allow_nan=False))
def test_defining_identity(x):
    w = lambert_w0(x)
    assert w >= -1.0
    assert abs(w * math.exp(w) - x) <= 1e-12 * max(1.0, abs(x))


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=-0.36, max_value=1e4), st.floats(min_value=1e-6, max_value=10.0))
def test_monotone(x, dx):
    assert lambert_w0(x + dx) > lambert_w0(x)


def test_xi_endpoints_and_monotonicity():
    assert xi(0.0) == 1.0
    assert 0.79 <= xi(1.0) <= 0.80
    m = np.linspace(0.0, 1.0, 101)
    assert np.all(np.diff(xi(m)) < 0)


def test_xi_solves_peak_condition():
    # xi maximizes x^2 exp(-2x) / (1 - mu0^2 exp(-2x)); check the stationarity directly
    for mu0 in (0.1, 0.5, 0.9, 1.0):
        f = lambda x: x**2 * math.exp(-2 * x) / (1 - mu0**2 * math.exp(-2 * x))
        x0, h = xi(mu0), 1e-5
        assert abs(f(x0 + h) - f(x0 - h)) / (2 * h) < 1e-8
        assert phi(mu0) == pytest.approx(mu0**2 * f(x0), rel=1e-12)


def test_phi_low_polarization_limit():
    for mu0 in (1e-4, 1e-3):
        assert phi(mu0) == pytest.approx(mu0**2 / math.e**2, rel=1e-5)
    assert phi(0.0) == 0.0


def test_mu0_domain():
    with pytest.raises(DomainError):
        xi(1.01)
    with pytest.raises(DomainError):
        phi(-0.1)

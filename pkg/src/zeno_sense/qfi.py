"""Quantum Fisher information about the coupling ``wx``.

Everything here is closed form.  Values are in units of 1/frequency^2.
Functions that take a time accept numpy arrays and evaluate elementwise.
"""

from dataclasses import dataclass
import math
from typing import Optional

import numpy as np
from scipy import optimize

from . import bloch
from .specfun import _check_mu0, phi, xi

__all__ = [
    "QfiDivergenceError",
    "NoRootError",
    "QfiEvaluation",
    "PROTOCOLS",
    "FORMULAS",
    "LOW_POLARIZATION_PREFACTOR",
    "qfi_from_polarization",
    "coherent_displacement_sq",
    "qfi_coherent",
    "qfi_coherent_longtime",
    "d_alpha_d_wx",
    "qfi_projected",
    "t_max",
    "qfi_projected_max",
    "qfi_ratio_max",
    "projective_wins_time_bound",
    "low_polarization_time_bound",
    "boundary_curve",
]

PROTOCOLS = ("coherent", "projected")
FORMULAS = ("exact", "long_time_approx", "stroboscopic_approx", "appendixB_full")

#: ``lim_{mu0 -> 0} 2 sqrt(phi(mu0)) / mu0``; phi ~ mu0^2 / e^2 gives 2/e.
LOW_POLARIZATION_PREFACTOR = 2.0 / math.e

_PURE_TOL = 1e-12


class QfiDivergenceError(ArithmeticError):
    """The QFI is infinite: a pure state with a radial displacement."""


class NoRootError(ValueError):
    """The crossover quotient never equals one in the searched range."""


@dataclass(frozen=True)
class QfiEvaluation:
    """A QFI value together with the protocol and formula that produced it.

    ``t`` and ``value`` may be arrays for vectorized sweeps.
    """

    protocol: str
    t: object
    value: object
    formula: str
    tau: Optional[float] = None

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.protocol!r}")
        if self.formula not in FORMULAS:
            raise ValueError(f"unknown formula {self.formula!r}")
        if (self.tau is not None) != (self.protocol == "projected"):
            raise ValueError("tau is required for, and only for, the projected protocol")
        if np.any(np.asarray(self.value) < 0):
            raise ValueError("QFI must be non-negative")

    def __float__(self):
        return float(self.value)


def qfi_from_polarization(mu, dmu, radial_atol=1e-10):
    """QFI of a qubit from its Bloch vector and the vector's derivative.

    Radial and tangential parts of ``dmu`` contribute as
    ``dmu_r^2 / (1 - |mu|^2) + |dmu_t|^2``.  At ``mu = 0`` the radial
    direction is undefined and the whole displacement counts as radial,
    which is regular there since ``1 - |mu|^2 = 1``.

    Raises
    ------
    QfiDivergenceError
        If ``|mu| = 1`` and the radial part of ``dmu`` exceeds `radial_atol`.
    """
    mu = np.asarray(mu, dtype=float)
    dmu = np.asarray(dmu, dtype=float)
    m2 = float(mu @ mu)
    if m2 > 1.0 + 2e-12:
        raise ValueError(f"|mu| = {math.sqrt(m2)} exceeds 1")
    if m2 == 0.0:
        return float(dmu @ dmu)
    u = mu / math.sqrt(m2)
    radial = float(u @ dmu)
    tangential = dmu - radial * u
    t2 = float(tangential @ tangential)
    gap = 1.0 - m2
    if gap <= _PURE_TOL:
        if abs(radial) > radial_atol:
            raise QfiDivergenceError("pure state with a radial displacement has infinite QFI")
        return t2
    return radial**2 / gap + t2


def coherent_displacement_sq(omega, t):
    """``|d mu_hat / d wx|^2`` for a unit Bloch vector precessing for ``t``."""
    wx, wz = omega.wx, omega.wz
    w2 = wx**2 + wz**2
    w = math.sqrt(w2)
    t = np.asarray(t, dtype=float)
    c = np.cos(w * t)
    s = np.sin(w * t)
    return (
        wx**4 / w2**2 * t**2
        + 2.0 * wx**2 * wz**2 / (w2**2 * w) * s * t
        + wz**2 / w2**2 * ((1.0 - c) ** 2 + wz**2 / w2 * s**2)
    )


def qfi_coherent(omega, mu0, t):
    """Exact QFI after free precession for time ``t``.

    The polarization norm is conserved, so only the tangential displacement
    contributes.  The expression is written without 1/t factors and is
    exactly zero at ``t = 0``.
    """
    _check_mu0(mu0)
    value = mu0**2 * coherent_displacement_sq(omega, t)
    return QfiEvaluation("coherent", t, _as_value(value), "exact")


def qfi_coherent_longtime(omega, mu0, t):
    """Secular growth ``mu0^2 (wx/w)^4 t^2``, valid for ``t >> wz / wx^2``."""
    _check_mu0(mu0)
    t_arr = np.asarray(t, dtype=float)
    value = mu0**2 * (omega.wx / omega.w) ** 4 * t_arr**2
    return QfiEvaluation("coherent", t, _as_value(value), "long_time_approx")


def d_alpha_d_wx(omega, tau):
    """Derivative of ``alpha(tau)`` with respect to ``wx``.

    Equal to ``-(wx/w) [2 wz^2 (1 - cos w tau) / w^3 + wx^2 tau sin(w tau) / w^2]``.
    The overall minus sign comes from differentiating ``alpha`` directly.
    """
    wx, wz = omega.wx, omega.wz
    w2 = wx**2 + wz**2
    w = math.sqrt(w2)
    tau = np.asarray(tau, dtype=float)
    out = -(wx / w) * (2.0 * wz**2 / (w2 * w) * (1.0 - np.cos(w * tau)) + wx**2 / w2 * tau * np.sin(w * tau))
    return float(out) if out.ndim == 0 else out


def qfi_projected(omega, mu0, tau, t, formula="stroboscopic_approx"):
    """QFI under stroboscopic sz projections every ``tau``.

    ``formula="stroboscopic_approx"`` keeps only the radial term and treats
    ``t / tau`` as continuous, which makes the curve smooth in ``t``.
    ``formula="appendixB_full"`` uses the integer count ``n = floor(t/tau)``
    and adds the tangential term accumulated during the remainder ``dt``;
    it is exact for the projected dynamics.  The two coincide at ``t = n tau``.
    """
    _check_mu0(mu0)
    if not tau > 0:
        raise ValueError("tau must be positive")
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ValueError("t must be non-negative")
    a = float(bloch.alpha(omega, tau))
    da2 = d_alpha_d_wx(omega, tau) ** 2
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if formula == "stroboscopic_approx":
            x = t_arr / tau
            aa = abs(a)
            value = t_arr**2 * mu0**2 / tau**2 * aa ** (2.0 * (x - 1.0)) / (1.0 - mu0**2 * aa ** (2.0 * x)) * da2
            value = np.where((t_arr == 0.0) | (da2 == 0.0), 0.0, value)
        elif formula == "appendixB_full":
            n, dt = bloch._split(tau, t_arr)
            a2 = a * a
            radial = mu0**2 * n**2 * a2 ** (n - 1.0) / (1.0 - mu0**2 * a2**n) * da2
            radial = np.where((n == 0) | (da2 == 0.0), 0.0, radial)
            tangential = mu0**2 * a2**n * coherent_displacement_sq(omega, dt)
            value = radial + tangential
        else:
            raise ValueError(f"unknown projected formula {formula!r}")
    return QfiEvaluation("projected", t, _as_value(value), formula, tau=float(tau))


def t_max(omega, mu0, tau):
    """Total time ``xi(mu0) t_c(tau)`` at which the projected QFI peaks.

    Returns ``inf`` when ``|alpha(tau)| = 1``.
    """
    return xi(mu0) * bloch.characteristic_time(omega, tau)


def qfi_projected_max(omega, mu0, tau):
    """Peak value of the continuous-time projected QFI.

    ``phi(mu0) (t_c / alpha)^2 (wx/w)^2 [2 (1 - cos w tau) wz^2 / (w tau w^2)
    + sin(w tau) wx^2 / w^2]^2``, i.e. ``phi t_c^2 (d alpha / d wx)^2 /
    (alpha tau)^2``.  Vectorized over ``tau``; ``inf`` where
    ``|alpha(tau)| = 1`` (no measurement-induced decay).
    """
    f = phi(mu0)
    wx, wz = omega.wx, omega.wz
    w2 = wx**2 + wz**2
    w = math.sqrt(w2)
    tau = np.asarray(tau, dtype=float)
    tc = np.asarray(bloch.characteristic_time(omega, tau))
    a = bloch.alpha(omega, tau)
    wt = w * tau
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        bracket = 2.0 * (1.0 - np.cos(wt)) / wt * wz**2 / w2 + np.sin(wt) * wx**2 / w2
        value = f * tc**2 / a**2 * (wx**2 / w2) * bracket**2
    value = np.where(np.isinf(tc), np.inf, value)
    return float(value) if value.ndim == 0 else value


def _phi_over_mu0_sq(mu0):
    return math.exp(-2.0) if mu0 == 0 else phi(mu0) / mu0**2


def qfi_ratio_max(omega, mu0, t):
    """Projected-to-coherent quotient of attainable QFI within time ``t``.

    ``(4 phi / mu0^2) w^4 / (wx^6 t^2)``.  Uses the Zeno plateau
    ``4 phi / wx^2`` and the secular coherent growth, so it is meaningful for
    ``wz >> wx``, ``tau`` up to about 0.6 and ``t >> wz / wx^2``.
    """
    _check_mu0(mu0)
    t = np.asarray(t, dtype=float)
    out = 4.0 * _phi_over_mu0_sq(mu0) * omega.w**4 / omega.wx**6 / t**2
    return float(out) if out.ndim == 0 else out


def projective_wins_time_bound(omega, mu0):
    """Largest total time for which the projected protocol gives more QFI.

    ``2 sqrt(phi) / (mu0 |wx|) (1 + wz^2 / wx^2)``; at ``mu0 -> 0`` this is
    :func:`low_polarization_time_bound`.
    """
    _check_mu0(mu0)
    pref = LOW_POLARIZATION_PREFACTOR if mu0 == 0 else 2.0 * math.sqrt(phi(mu0)) / mu0
    return pref / abs(omega.wx) * (1.0 + omega.wz**2 / omega.wx**2)


def low_polarization_time_bound(omega):
    """Polarization-independent limit ``(2/e) / |wx| (1 + wz^2 / wx^2)``."""
    return LOW_POLARIZATION_PREFACTOR / abs(omega.wx) * (1.0 + omega.wz**2 / omega.wx**2)


def boundary_curve(omega_x, t, mu0=1.0):
    """Offset ``wz >= 0`` at which the crossover quotient equals one.

    Parameters
    ----------
    omega_x : float
        Coupling (nonzero).
    t : float
        Total available time.
    mu0 : float
        Initial polarization.

    Raises
    ------
    NoRootError
        If the projected protocol wins at every offset, which happens when
        ``|wx| t < 2 sqrt(phi) / mu0``.
    """
    _check_mu0(mu0)
    wx = abs(float(omega_x))
    if wx == 0 or not t > 0:
        raise ValueError("need nonzero omega_x and positive t")

    def excess(wz):
        return qfi_ratio_max(bloch.PrecessionFrequency(wx, wz), mu0, t) - 1.0

    f0 = excess(0.0)
    if f0 > 0:
        raise NoRootError(f"quotient exceeds 1 at every offset for wx*t = {wx * t:.6g}")
    if f0 == 0:
        return 0.0
    kappa = mu0 / (2.0 * math.sqrt(phi(mu0))) if mu0 > 0 else 1.0 / LOW_POLARIZATION_PREFACTOR
    hi = wx * math.sqrt(max(kappa * wx * t - 1.0, 0.0)) + wx
    for _ in range(20):
        if excess(hi) > 0:
            break
        hi *= 10.0
    else:
        raise NoRootError("no sign change within the widened bracket")
    return float(optimize.brentq(excess, 0.0, hi, xtol=1e-14, rtol=1e-13, maxiter=500))


def _as_value(value):
    value = np.asarray(value, dtype=float)
    return float(value) if value.ndim == 0 else value

"""Bloch-vector dynamics of the qubit probe.

The probe Hamiltonian is ``H = (wx sx + wz sz) / 2`` and the probe starts
polarized along z with magnitude ``mu0``.  Coherent evolution is a rigid
precession; projected evolution interleaves the precession with
non-selective sz measurements every ``tau``, which erase the transverse
components and shrink the polarization by ``alpha(tau)``.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy import optimize

from .specfun import _check_mu0

__all__ = [
    "ConvergenceError",
    "PrecessionFrequency",
    "PolarizationVector",
    "MeasurementSchedule",
    "alpha",
    "polarization",
    "d_polarization_d_wx",
    "evolve_coherent",
    "evolve_projected",
    "projected_muz",
    "characteristic_time",
    "anti_zeno_tau",
]

TWO_PI = 2.0 * math.pi


class ConvergenceError(RuntimeError):
    """A bracketed search failed to converge."""


@dataclass(frozen=True)
class PrecessionFrequency:
    """Precession vector ``(wx, 0, wz)`` in rad per unit time.

    ``wx`` is the coupling being estimated and must be nonzero.
    """

    wx: float
    wz: float

    def __post_init__(self):
        if not (math.isfinite(self.wx) and math.isfinite(self.wz)):
            raise ValueError("precession components must be finite")
        if self.wx == 0.0:
            raise ValueError("wx must be nonzero")

    @classmethod
    def from_theta(cls, theta, w=TWO_PI):
        """Build ``w (cos theta, 0, sin theta)``."""
        return cls(w * math.cos(theta), w * math.sin(theta))

    @property
    def w(self):
        return math.hypot(self.wx, self.wz)

    @property
    def theta(self):
        return math.atan(self.wz / self.wx)

    def with_wx(self, wx):
        return PrecessionFrequency(wx, self.wz)


@dataclass(frozen=True)
class PolarizationVector:
    mx: float
    my: float
    mz: float

    def __post_init__(self):
        if self.norm > 1.0 + 1e-12:
            raise ValueError(f"polarization norm {self.norm} exceeds 1")

    @property
    def norm(self):
        return math.sqrt(self.mx**2 + self.my**2 + self.mz**2)

    def __iter__(self):
        return iter((self.mx, self.my, self.mz))

    def __array__(self, dtype=None, copy=None):
        return np.array([self.mx, self.my, self.mz], dtype=dtype)


@dataclass(frozen=True)
class MeasurementSchedule:
    """Split of a total time into ``n`` full periods of ``tau`` plus ``dt``.

    ``dt`` always lies in ``[0, tau)``.  A remainder within a relative 1e-12
    of ``tau`` is rounded up to one more full period, so that ``t = n * tau``
    computed in floating point lands on a stroboscopic time.
    """

    tau: float
    total_t: float

    def __post_init__(self):
        if not self.tau > 0.0:
            raise ValueError("tau must be positive")
        if not self.total_t >= 0.0:
            raise ValueError("total_t must be non-negative")

    @property
    def n(self):
        return _split(self.tau, self.total_t)[0]

    @property
    def dt(self):
        return _split(self.tau, self.total_t)[1]


def _split(tau, t):
    t = np.asarray(t, dtype=float)
    n = np.floor(t / tau)
    dt = t - n * tau
    snap = dt >= tau * (1.0 - 1e-12)
    n = np.where(snap, n + 1.0, n)
    dt = np.where(snap, 0.0, np.maximum(t - n * tau, 0.0))
    small = np.abs(dt) <= 1e-12 * tau
    dt = np.where(small, 0.0, dt)
    if n.ndim == 0:
        return int(n), float(dt)
    return n.astype(int), dt


def alpha(omega, t):
    """Coherent z-polarization factor ``wz^2/w^2 + (wx^2/w^2) cos(w t)``."""
    w2 = omega.wx**2 + omega.wz**2
    w = math.sqrt(w2)
    return omega.wz**2 / w2 + omega.wx**2 / w2 * np.cos(w * np.asarray(t, dtype=float))


def polarization(omega, mu0, t):
    """Coherently precessed Bloch vector(s), shape ``t.shape + (3,)``."""
    wx, wz = omega.wx, omega.wz
    w2 = wx**2 + wz**2
    w = math.sqrt(w2)
    t = np.asarray(t, dtype=float)
    c = np.cos(w * t)
    s = np.sin(w * t)
    return mu0 * np.stack(
        [wx * wz / w2 * (1.0 - c), -wx / w * s, wz**2 / w2 + wx**2 / w2 * c], axis=-1
    )


def d_polarization_d_wx(omega, mu0, t):
    """Analytic derivative of :func:`polarization` with respect to ``wx``.

    Splits into a secular part growing linearly in ``t`` (change of the
    precession rate) and a bounded part (tilt of the precession cone).
    """
    wx, wz = omega.wx, omega.wz
    w2 = wx**2 + wz**2
    w = math.sqrt(w2)
    t = np.asarray(t, dtype=float)
    c = np.cos(w * t)
    s = np.sin(w * t)
    secular = (wx**2 / w2) * t[..., None] * np.stack([wz / w * s, -c, -wx / w * s], axis=-1)
    cone = (wz / w2) * np.stack(
        [(wz**2 - wx**2) / w2 * (1.0 - c), -wz / w * s, -2.0 * wx * wz / w2 * (1.0 - c)], axis=-1
    )
    return mu0 * (secular + cone)


def evolve_coherent(omega, mu0, t):
    """Bloch vector after coherent precession for time ``t`` from ``mu0 z``."""
    _check_mu0(mu0)
    if t < 0:
        raise ValueError("t must be non-negative")
    return PolarizationVector(*(float(v) for v in polarization(omega, mu0, t)))


def projected_muz(omega, mu0, tau, t):
    """Vectorized ``mu0 alpha(tau)^n alpha(dt)`` for ``t = n tau + dt``."""
    n, dt = _split(tau, t)
    return mu0 * alpha(omega, tau) ** n * alpha(omega, dt)


def evolve_projected(omega, mu0, sched):
    """Longitudinal polarization after ``sched.n`` projections and a remainder."""
    _check_mu0(mu0)
    return float(projected_muz(omega, mu0, sched.tau, sched.total_t))


def characteristic_time(omega, tau):
    """Decay time ``-tau / ln|alpha(tau)|`` of the stroboscopic polarization.

    Returns ``inf`` where ``|alpha(tau)| == 1`` (no decay, e.g. ``tau -> 0``
    or full precession periods) and ``0`` where ``alpha(tau) == 0``.
    """
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise ValueError("tau must be non-negative")
    a = np.minimum(np.abs(alpha(omega, tau)), 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        tc = -tau / np.log(a)
    tc = np.where((a >= 1.0) | (tau == 0.0), np.inf, tc)
    tc = np.where(a == 0.0, 0.0, tc)
    return float(tc) if tc.ndim == 0 else tc


def anti_zeno_tau(omega, grid=2001):
    """Measurement spacing that minimizes the characteristic decay time.

    Only meaningful for ``|wz| > |wx|``, where the polarization never crosses
    the equatorial plane.  A coarse grid locates the basin and a golden-section
    search refines it.
    """
    if not abs(omega.wz) > abs(omega.wx):
        raise ValueError("anti_zeno_tau requires |wz| > |wx|")
    period = TWO_PI / omega.w
    eps = 1e-6 * period
    taus = np.linspace(eps, period - eps, grid)
    tcs = characteristic_time(omega, taus)
    k = int(np.argmin(tcs))
    if k == 0 or k == grid - 1:
        raise ConvergenceError("minimum of t_c sits on the search boundary")
    bracket = (taus[k - 1], taus[k], taus[k + 1])
    try:
        res = optimize.minimize_scalar(
            lambda x: characteristic_time(omega, x), bracket=bracket, method="golden", tol=1e-10
        )
    except ValueError as exc:
        raise ConvergenceError(str(exc)) from exc
    if not res.success or not (bracket[0] <= res.x <= bracket[2]):
        raise ConvergenceError(f"golden-section search failed: {res.message}")
    return float(res.x)

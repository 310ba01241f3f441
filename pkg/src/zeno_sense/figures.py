"""Grid sweeps behind the figures, plus the post-processing fits.

All functions are pure: they take axes and parameters and return arrays or
small result records.  Writing files is left to :mod:`zeno_sense.cli`.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import bloch, oracle, qfi
from .bloch import PrecessionFrequency, TWO_PI
from .specfun import phi

__all__ = [
    "Axis",
    "FIGURE_THETA",
    "ZENO_TRACE_TAU",
    "SpotCheck",
    "fig2_grid",
    "fig2_contour_fit",
    "fig3_characteristic_times",
    "fig3_traces",
    "fig4_grid",
    "fig4_ridge",
    "fig4_ridge_agreement",
    "fig5_grid",
    "fig5_boundary_fit",
    "fig5_crossover",
    "spotcheck",
]

FIGURE_THETA = 0.9 * math.pi / 2
ZENO_TRACE_TAU = 0.1


@dataclass(frozen=True)
class Axis:
    """A grid axis ``min:max:count`` with optional log spacing."""

    lo: float
    hi: float
    count: int
    log: bool = False

    def __post_init__(self):
        if self.count < 2:
            raise ValueError("axis needs at least 2 points")
        if not self.lo < self.hi:
            raise ValueError("axis needs min < max")
        if self.log and self.lo <= 0:
            raise ValueError("log axis needs a positive minimum")

    @classmethod
    def parse(cls, text):
        parts = text.split(":")
        if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] not in ("log", "lin")):
            raise ValueError(f"axis {text!r} is not min:max:count[:log]")
        return cls(float(parts[0]), float(parts[1]), int(parts[2]), len(parts) == 4 and parts[3] == "log")

    def values(self):
        if self.log:
            return np.geomspace(self.lo, self.hi, self.count)
        return np.linspace(self.lo, self.hi, self.count)


def _omega(theta, w):
    return PrecessionFrequency.from_theta(float(theta), w)


# --- figure 2: coherent QFI over (theta, t) ----------------------------------


def fig2_grid(thetas, ts, mu0=1.0, w=TWO_PI):
    """Coherent QFI, shape ``(len(thetas), len(ts))``."""
    return np.array([qfi.qfi_coherent(_omega(th, w), mu0, ts).value for th in thetas])


@dataclass(frozen=True)
class ContourFit:
    level: float
    theta: np.ndarray
    t: np.ndarray
    constant: float
    residual: float


def _first_crossing(xs, ys, level):
    above = np.flatnonzero(ys >= level)
    if above.size == 0 or above[0] == 0:
        return math.nan
    k = above[0]
    x0, x1, y0, y1 = xs[k - 1], xs[k], ys[k - 1], ys[k]
    return x0 + (level - y0) * (x1 - x0) / (y1 - y0)


def fig2_contour_fit(thetas, ts, grid, levels=None):
    """Fit ``t cos^2(theta) = const`` along contours of fixed QFI.

    Contour points come from the first crossing of each theta row, linearly
    interpolated in ``t``.  Default levels are the grid values at the largest
    theta and half and three quarters of the largest time.  The residual is
    the RMS relative deviation of ``t cos^2 theta`` from its mean.
    """
    thetas = np.asarray(thetas)
    ts = np.asarray(ts)
    if levels is None:
        levels = [float(np.interp(f * ts[-1], ts, grid[-1])) for f in (0.5, 0.75)]
    fits = []
    for level in levels:
        tc = np.array([_first_crossing(ts, row, level) for row in grid])
        ok = np.isfinite(tc)
        if ok.sum() < 2:
            raise ValueError(f"contour at level {level:g} leaves the grid")
        c = tc[ok] * np.cos(thetas[ok]) ** 2
        mean = float(c.mean())
        fits.append(ContourFit(level, thetas[ok], tc[ok], mean, float(np.sqrt(np.mean((c / mean - 1.0) ** 2)))))
    return fits


# --- figure 3: characteristic time and traces --------------------------------


def fig3_characteristic_times(taus, theta=FIGURE_THETA, w=TWO_PI):
    return np.asarray(bloch.characteristic_time(_omega(theta, w), np.asarray(taus, dtype=float)))


def fig3_traces(times, theta=FIGURE_THETA, w=TWO_PI, mu0=1.0, zeno_tau=ZENO_TRACE_TAU):
    """``mu_z(t)`` coherent, under Zeno spacing, and at the anti-Zeno optimum.

    Returns the traces and the anti-Zeno spacing used.
    """
    om = _omega(theta, w)
    times = np.asarray(times, dtype=float)
    az = bloch.anti_zeno_tau(om)
    return {
        "coherent": mu0 * bloch.alpha(om, times),
        "zeno": bloch.projected_muz(om, mu0, zeno_tau, times),
        "anti_zeno": bloch.projected_muz(om, mu0, az, times),
    }, az


# --- figure 4: projected QFI over (tau, t) -----------------------------------


def fig4_grid(taus, ts, theta=FIGURE_THETA, w=TWO_PI, mu0=1.0):
    """Projected QFI under both formulas, each of shape ``(len(taus), len(ts))``."""
    om = _omega(theta, w)
    smooth = np.array([qfi.qfi_projected(om, mu0, tau, ts).value for tau in taus])
    full = np.array([qfi.qfi_projected(om, mu0, tau, ts, formula="appendixB_full").value for tau in taus])
    return smooth, full


def fig4_ridge(taus, theta=FIGURE_THETA, w=TWO_PI, mu0=1.0):
    """Closed-form ridge: ``t_c``, ``t_max`` and the peak QFI per tau."""
    om = _omega(theta, w)
    taus = np.asarray(taus, dtype=float)
    return {
        "t_c": np.asarray(bloch.characteristic_time(om, taus)),
        "t_max": np.asarray(qfi.t_max(om, mu0, taus)),
        "qfi_max": np.asarray(qfi.qfi_projected_max(om, mu0, taus)),
    }


def fig4_ridge_agreement(ts, smooth_grid, ridge):
    """Worst grid-argmax offset from ``t_max`` in units of the local cell.

    Only rows whose ``t_max`` lies strictly inside the time axis count.
    Values at most 1 mean the closed-form ridge sits within one cell.
    """
    ts = np.asarray(ts)
    worst = 0.0
    for row, tm in zip(smooth_grid, ridge["t_max"]):
        if not (ts[0] < tm < ts[-1]):
            continue
        k = int(np.argmax(row))
        cell = ts[min(k + 1, len(ts) - 1)] - ts[max(k - 1, 0)]
        worst = max(worst, abs(ts[k] - tm) / (0.5 * cell))
    return worst


# --- figure 5: projected / coherent quotient ---------------------------------


def fig5_grid(thetas, ts, w=TWO_PI, mu0=1.0):
    return np.array([qfi.qfi_ratio_max(_omega(th, w), mu0, ts) for th in thetas])


@dataclass(frozen=True)
class BoundaryFit:
    t: np.ndarray
    wx: np.ndarray
    wz: np.ndarray
    constant: float
    residual: float
    t_min: float


def fig5_boundary_fit(thetas, ts, grid, w=TWO_PI, mu0=1.0, theta=FIGURE_THETA, tau=0.3):
    """Fit the quotient-one level set to ``wz = c wx sqrt(wx t - 1)``.

    For each time column the crossing in theta is linearly interpolated.
    Only columns with ``t >= t_max``, the projected peak time of the probe
    at `theta` measured every `tau`, enter the fit; at shorter times the
    boundary approaches ``wx t = 1`` where the fitted form is singular.
    ``c`` is the least-squares value; the residual is the RMS relative
    deviation of ``wz``.
    """
    thetas = np.asarray(thetas)
    t_min = float(qfi.t_max(_omega(theta, w), mu0, tau))
    pts = []
    for j, t in enumerate(ts):
        if t < t_min:
            continue
        # the quotient grows with theta; find where it first reaches 1
        th = _first_crossing(thetas, grid[:, j], 1.0)
        if not math.isfinite(th):
            continue
        om = _omega(th, w)
        if om.wx * t > 1.0:
            pts.append((t, om.wx, om.wz))
    if len(pts) < 2:
        raise ValueError("too few boundary points to fit")
    t, wx, wz = map(np.array, zip(*pts))
    f = wx * np.sqrt(wx * t - 1.0)
    c = float(f @ wz / (f @ f))
    return BoundaryFit(t, wx, wz, c, float(np.sqrt(np.mean((c * f / wz - 1.0) ** 2))), t_min)


def fig5_crossover(thetas, ts, grid, theta=FIGURE_THETA, w=TWO_PI, mu0=1.0):
    """Grid crossover time on the row nearest `theta` against the closed-form bound.

    Returns ``(t_grid, t_bound, cells)`` where ``cells`` is the offset in
    units of the local time spacing.
    """
    i = int(np.argmin(np.abs(np.asarray(thetas) - theta)))
    row = grid[i]
    ts = np.asarray(ts)
    below = np.flatnonzero(row <= 1.0)
    if below.size == 0 or below[0] == 0:
        raise ValueError("quotient does not cross 1 inside the time axis")
    k = below[0]
    bound = qfi.projective_wins_time_bound(_omega(thetas[i], w), mu0)
    return float(ts[k]), bound, abs(ts[k] - bound) / (ts[k] - ts[k - 1])


# --- oracle spot checks ------------------------------------------------------


@dataclass(frozen=True)
class SpotCheck:
    cell: tuple
    closed_form: float
    oracle: float
    deviation: float
    tolerance: float

    @property
    def passed(self):
        return self.deviation <= self.tolerance


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def spotcheck(figure, axes, k, seed=0, w=TWO_PI, mu0=1.0, theta=FIGURE_THETA, tau=0.3):
    """Re-verify ``k`` randomly chosen cells of a figure grid with the oracle.

    Cell choice is driven by a seeded generator, so repeated calls agree.
    fig2 and fig4 compare QFI values (relative); fig3 compares ``mu_z``
    traces (absolute).  fig5's quotient mixes two approximations, so its
    cells verify the two ingredients instead: the coherent QFI at the cell,
    and the Zeno plateau ``4 phi / wx^2`` at ``tau = 0.01 (2 pi / w)``.
    """
    rng = np.random.default_rng(seed)
    out = []
    if figure == "fig2":
        thetas, ts = axes
        for _ in range(k):
            i, j = rng.integers(len(thetas)), rng.integers(len(ts))
            om = _omega(thetas[i], w)
            cf = float(qfi.qfi_coherent(om, mu0, ts[j]))
            orc = oracle.oracle_qfi_coherent(om, mu0, ts[j])
            out.append(SpotCheck((float(thetas[i]), float(ts[j])), cf, orc, _rel(cf, orc), 1e-5))
    elif figure == "fig3":
        (times,) = axes
        om = _omega(theta, w)
        az = bloch.anti_zeno_tau(om)
        H = oracle.qubit_hamiltonian(om)
        rho0 = oracle.qubit_density((0.0, 0.0, mu0))
        for _ in range(k):
            t = float(times[rng.integers(len(times))])
            which = ("coherent", "zeno", "anti_zeno")[rng.integers(3)]
            if which == "coherent":
                cf = float(mu0 * bloch.alpha(om, t))
                rho = oracle.propagate_unitary(H, rho0, t)
            else:
                step = ZENO_TRACE_TAU if which == "zeno" else az
                cf = float(bloch.projected_muz(om, mu0, step, t))
                sched = bloch.MeasurementSchedule(step, t)
                rho = oracle.stroboscopic_evolution(H, rho0, step, sched.n, sched.dt, [0, 1])
            orc = float(oracle.bloch_vector(rho)[2])
            out.append(SpotCheck((which, t), cf, orc, abs(cf - orc), 1e-10))
    elif figure == "fig4":
        taus, ts = axes
        om = _omega(theta, w)
        for _ in range(k):
            i = rng.integers(len(taus))
            # stroboscopic cells, where both formulas are exact
            n = max(1, int(round(ts[rng.integers(len(ts))] / taus[i])))
            t = n * taus[i]
            cf = float(qfi.qfi_projected(om, mu0, taus[i], t))
            orc = oracle.oracle_qfi_projected(om, mu0, taus[i], t)
            out.append(SpotCheck((float(taus[i]), float(t)), cf, orc, _rel(cf, orc), 1e-4))
    elif figure == "fig5":
        thetas, ts = axes
        for _ in range(k):
            i, j = rng.integers(len(thetas)), rng.integers(len(ts))
            om = _omega(thetas[i], w)
            cf = float(qfi.qfi_coherent(om, mu0, ts[j]))
            orc = oracle.oracle_qfi_coherent(om, mu0, ts[j])
            out.append(SpotCheck(("coherent", float(thetas[i]), float(ts[j])), cf, orc, _rel(cf, orc), 1e-5))
            ztau = 0.01 * TWO_PI / w
            plateau = 4.0 * phi(mu0) / om.wx**2
            tz = ztau * max(1, round(float(qfi.t_max(om, mu0, ztau)) / ztau))
            orc = oracle.oracle_qfi_projected(om, mu0, ztau, tz)
            out.append(SpotCheck(("zeno_plateau", float(thetas[i])), plateau, orc, _rel(plateau, orc), 0.02))
    else:
        raise ValueError(f"unknown figure {figure!r}")
    return out

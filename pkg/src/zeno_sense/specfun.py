"""Special functions behind the closed-form optima of the projected protocol.

``lambert_w0`` is the principal branch of the Lambert W function on the real
line.  ``xi`` and ``phi`` are the polarization-dependent factors that set the
position and height of the QFI peak under stroboscopic projections.
"""

import numpy as np

__all__ = ["DomainError", "lambert_w0", "xi", "phi", "BRANCH_POINT"]

#: Left end of the principal branch, ``-1/e``.
BRANCH_POINT = -np.exp(-1.0)

_BRANCH_SNAP = 1e-12
_MAX_ITER = 50
_RESIDUAL_TOL = 1e-14


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of a real function."""


def _initial_guess(x):
    w = np.empty_like(x)
    near = x < -0.25
    # series in p = sqrt(2(ex + 1)) around the branch point
    p = np.sqrt(np.maximum(2.0 * (np.e * x[near] + 1.0), 0.0))
    w[near] = -1.0 + p - p**2 / 3.0 + 11.0 / 72.0 * p**3
    mid = (~near) & (x < 3.0)
    w[mid] = np.log1p(x[mid])
    big = x >= 3.0
    lx = np.log(x[big])
    w[big] = lx - np.log(lx)
    return w


def lambert_w0(x):
    """Principal branch ``W0`` of the Lambert W function.

    Solves ``w * exp(w) = x`` for ``w >= -1`` by Halley iteration.

    Parameters
    ----------
    x : float or array_like
        Argument(s), each ``>= -1/e``.

    Returns
    -------
    float or ndarray
        ``W0(x)``, with the same shape as `x`.

    Raises
    ------
    DomainError
        If any argument is below ``-1/e`` (beyond the snapping tolerance).
    """
    xa = np.asarray(x, dtype=float)
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa).ravel()
    if np.any(np.isnan(xa)):
        raise DomainError("lambert_w0 is undefined for NaN")
    if np.any(xa < BRANCH_POINT - _BRANCH_SNAP):
        raise DomainError(f"lambert_w0 requires x >= -1/e, got min {xa.min()!r}")

    at_branch = np.abs(xa - BRANCH_POINT) <= _BRANCH_SNAP
    w = _initial_guess(np.where(at_branch, 0.0, xa))
    active = ~at_branch & (xa != 0.0)
    w[xa == 0.0] = 0.0

    for _ in range(_MAX_ITER):
        if not active.any():
            break
        wa = w[active]
        xv = xa[active]
        ew = np.exp(wa)
        f = wa * ew - xv
        wp1 = wa + 1.0
        step = f / (ew * wp1 - (wa + 2.0) * f / (2.0 * wp1))
        wa = wa - step
        w[active] = wa
        done = (np.abs(wa * np.exp(wa) - xv) <= _RESIDUAL_TOL * np.maximum(1.0, np.abs(xv))) | (
            np.abs(step) <= 4.0 * np.finfo(float).eps * (1.0 + np.abs(wa))
        )
        idx = np.flatnonzero(active)
        active[idx[done]] = False

    w[at_branch] = -1.0
    return float(w[0]) if scalar else w.reshape(np.shape(x))


def _check_mu0(mu0):
    m = np.asarray(mu0, dtype=float)
    if np.any(m < 0.0) or np.any(m > 1.0):
        raise DomainError(f"initial polarization must lie in [0, 1], got {mu0!r}")
    return m


def xi(mu0):
    """Peak-position factor ``1 + W0(-2 mu0^2 / e^2) / 2``.

    The QFI under projected evolution peaks at ``xi(mu0) * t_c``.  The value
    falls monotonically from 1 at ``mu0 = 0`` to about 0.797 at ``mu0 = 1``.
    """
    m = _check_mu0(mu0)
    out = 1.0 + 0.5 * lambert_w0(-2.0 * m**2 * np.exp(-2.0))
    return float(out) if np.ndim(out) == 0 else out


def phi(mu0):
    """Peak-height factor ``mu0^2 xi^2 / (exp(2 xi) - mu0^2)``.

    Behaves as ``mu0^2 / e^2`` for weak polarization.
    """
    m = _check_mu0(mu0)
    x = xi(m)
    out = m**2 * x**2 / (np.exp(2.0 * x) - m**2)
    return float(out) if np.ndim(out) == 0 else out

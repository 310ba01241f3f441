"""Physical systems that reduce to the two-level probe.

Each mapping returns an effective :class:`~zeno_sense.bloch.PrecessionFrequency`
so the qubit results apply unchanged.  Explicit Hamiltonians for the full
spin systems are provided alongside, for checking the reductions with the
density-matrix oracle.  Units: hbar = 1, angular frequencies throughout.
"""

from dataclasses import dataclass, field
import math
from typing import NamedTuple

import numpy as np

from . import oracle
from .bloch import PrecessionFrequency
from .qfi import low_polarization_time_bound
from .specfun import _check_mu0, phi, xi

__all__ = [
    "InapplicableSpecError",
    "AcFieldSpec",
    "TwoSpinSpec",
    "ThreeSpinSpec",
    "ManySpinSpec",
    "InitialPolarization",
    "ShortTimeExpansion",
    "ac_field_effective_omega",
    "ac_field_time_bound",
    "dipolar_coupling",
    "two_spin_effective_omega",
    "two_spin_initial_mu0",
    "two_spin_muz",
    "two_spin_projective_bound",
    "two_spin_hamiltonian",
    "two_spin_initial_state",
    "two_spin_block_observable",
    "three_spin_block_hamiltonian",
    "three_spin_block_basis",
    "three_spin_hamiltonian",
    "three_spin_effective_omega",
    "three_spin_projective_bound",
    "many_spin_hamiltonian",
    "many_spin_initial_state",
    "monitor_labels",
    "many_spin_short_time_iz",
    "many_spin_effective_coupling",
    "many_spin_zeno_optimum",
]

SQRT2 = math.sqrt(2.0)


class InapplicableSpecError(ValueError):
    """The requested reduction does not hold for these parameters."""


# --- AC magnetometry -------------------------------------------------------


@dataclass(frozen=True)
class AcFieldSpec:
    """Spin in a static field ``B0 z`` probed by ``2 B1 cos(w t) x``.

    Assumes ``B0 >> B1`` and ``|gamma B0 - omega_carrier| << gamma B0``
    (rotating-wave regime).
    """

    gamma: float
    B0: float
    B1: float
    omega_carrier: float


def ac_field_effective_omega(spec):
    """Rotating-frame precession ``(gamma B1, 0, gamma B0 - omega_carrier)``."""
    return PrecessionFrequency(spec.gamma * spec.B1, spec.gamma * spec.B0 - spec.omega_carrier)


def ac_field_time_bound(spec):
    """Available time below which projective sensing of ``B1`` wins.

    ``(2/e) (B1^2 + (B0 - w/gamma)^2) / (gamma B1^3)`` in the low-polarization
    limit.
    """
    return low_polarization_time_bound(ac_field_effective_omega(spec))


def dipolar_coupling(r_vec, gamma_a, gamma_b, mu_vacuum=1.0):
    """Secular dipolar coupling ``-(1/2) (mu_vac ga gb / 4 pi r^3) (3 rz^2 - r^2) / r^2``.

    `mu_vacuum` defaults to 1 (dimensionless units).
    """
    r_vec = np.asarray(r_vec, dtype=float)
    r2 = float(r_vec @ r_vec)
    if r2 == 0.0:
        raise ValueError("internuclear distance must be nonzero")
    r = math.sqrt(r2)
    k = mu_vacuum * gamma_a * gamma_b / (4.0 * math.pi * r**3)
    return -0.5 * k * (3.0 * r_vec[2] ** 2 - r2) / r2


# --- two spins -------------------------------------------------------------


@dataclass(frozen=True)
class TwoSpinSpec:
    """Cross-polarization pair: coupling ``b``, offset ``delta = w1S - w1I``.

    ``omega0_I`` and ``kT`` set the thermal polarization of species I.
    """

    b: float
    delta: float
    omega0_I: float = 0.0
    kT: float = 1.0

    def __post_init__(self):
        if self.b == 0:
            raise ValueError("coupling b must be nonzero")


class InitialPolarization(NamedTuple):
    exact: float
    high_temperature: float


def two_spin_effective_omega(spec):
    """Precession ``(-b, 0, delta)`` inside the ``{ud, du}`` block."""
    return PrecessionFrequency(-spec.b, spec.delta)


def two_spin_initial_mu0(spec):
    """Thermal block polarization of species I, exact and high-temperature.

    Exact: ``exp(-x) / cosh(x) - 1 = -tanh(x)`` with ``x = w0I / 2kT``.
    High temperature: ``-x``.
    """
    if not spec.kT > 0:
        raise ValueError("kT must be positive")
    x = spec.omega0_I / (2.0 * spec.kT)
    return InitialPolarization(0.0 - math.tanh(x), 0.0 - x)


def two_spin_muz(spec, mu0, t):
    """Block polarization ``(mu0/2) (delta^2 + b^2 cos(sqrt(b^2 + delta^2) t)) / (b^2 + delta^2)``."""
    b2 = spec.b**2
    d2 = spec.delta**2
    t = np.asarray(t, dtype=float)
    out = 0.5 * mu0 * (d2 + b2 * np.cos(math.sqrt(b2 + d2) * t)) / (b2 + d2)
    return float(out) if out.ndim == 0 else out


def two_spin_projective_bound(spec):
    """``(2/e) (b^2 + delta^2) / |b|^3``."""
    return low_polarization_time_bound(two_spin_effective_omega(spec))


def two_spin_hamiltonian(spec):
    """``-(delta/2)(Sz - Iz) + b (Sx Ix + Sy Iy)``, basis ordering (I, S)."""
    (Ix, Iy, Iz), (Sx, Sy, Sz) = oracle.spin_operators(2)
    return -0.5 * spec.delta * (Sz - Iz) + spec.b * (Sx @ Ix + Sy @ Iy)


def two_spin_initial_state(mu0):
    """Species I polarized with ``<sigma_Iz> = mu0``; species S unpolarized."""
    (_, _, Iz), _ = oracle.spin_operators(2)
    return np.eye(4, dtype=complex) / 4.0 + 0.5 * mu0 * Iz


def two_spin_block_observable():
    """``Iz - Sz``: the Pauli z of the ``{ud, du}`` block, zero elsewhere."""
    (_, _, Iz), (_, _, Sz) = oracle.spin_operators(2)
    return Iz - Sz


# --- three spins -----------------------------------------------------------


@dataclass(frozen=True)
class ThreeSpinSpec:
    """One S spin coupled to two I spins.

    ``b1``, ``b2`` are the S-I couplings, ``d`` the I-I coupling, ``delta``
    the offset.  ``sigma`` shifts the whole ``M = 1/2`` block uniformly and
    never affects populations.
    """

    b1: float
    b2: float
    d: float
    delta: float
    sigma: float = 0.0


def three_spin_block_hamiltonian(spec):
    """The ``M = 1/2`` block in the basis ``{|S>|+>, |++>|->, |A>|+>}``."""
    s, dl, d = spec.sigma, spec.delta, spec.d
    c12 = SQRT2 / 8.0 * (spec.b1 + spec.b2)
    c23 = SQRT2 / 8.0 * (spec.b2 - spec.b1)
    return np.array(
        [
            [0.25 * (s - dl) + 0.5 * d, c12, 0.0],
            [c12, 0.25 * s + 0.75 * dl - 0.25 * d, c23],
            [0.0, c23, 0.25 * (s - dl)],
        ]
    )


def _ket(signs):
    up, down = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    out = np.array([1.0])
    for c in signs:
        out = np.kron(out, up if c == "+" else down)
    return out


def three_spin_block_basis():
    """Columns ``|S>|+>, |++>|->, |A>|+>`` in the (I1, I2, S) product basis."""
    sym = (_ket("+-+") + _ket("-++")) / SQRT2
    anti = (_ket("+-+") - _ket("-++")) / SQRT2
    return np.stack([sym, _ket("++-"), anti], axis=1)


def three_spin_hamiltonian(spec):
    """Full 8x8 Hamiltonian, ordering (I1, I2, S), whose ``M = 1/2`` block
    is :func:`three_spin_block_hamiltonian`.

    ``-(delta/2)(Sz - I1z - I2z) + sum_k (b_k/2)(Sx Ikx + Sy Iky)
    - (d/2)(2 I1z I2z - I1x I2x - I1y I2y) + sigma/4``.
    """
    (I1x, I1y, I1z), (I2x, I2y, I2z), (Sx, Sy, Sz) = oracle.spin_operators(3)
    return (
        -0.5 * spec.delta * (Sz - I1z - I2z)
        + 0.5 * spec.b1 * (Sx @ I1x + Sy @ I1y)
        + 0.5 * spec.b2 * (Sx @ I2x + Sy @ I2y)
        - 0.5 * spec.d * (2.0 * I1z @ I2z - I1x @ I2x - I1y @ I2y)
        + 0.25 * spec.sigma * np.eye(8)
    )


def three_spin_effective_omega(spec, rtol=1e-12):
    """Two-level reduction of the ``M = 1/2`` block.

    For ``b1 = b2 = b`` the pair ``{|++>|->, |S>|+>}`` carries the dynamics
    and ``w = (-sqrt(2) b / 2, 0, delta - 3d/4)``.  For ``b1 = -b2 = b`` it is
    ``{|++>|->, |A>|+>}`` with ``w = (sqrt(2) b / 2, 0, delta - d/4)``.  The
    two coincide at ``d = 0``.  The sign of ``wx`` is a labelling convention.

    Raises
    ------
    InapplicableSpecError
        If neither ``b1 = b2`` nor ``b1 = -b2`` holds to `rtol`.
    """
    H = three_spin_block_hamiltonian(spec)
    scale = max(abs(spec.b1), abs(spec.b2))
    if scale == 0:
        raise InapplicableSpecError("couplings vanish; no dynamics")
    if abs(spec.b1 - spec.b2) <= rtol * scale:
        partner = 0
    elif abs(spec.b1 + spec.b2) <= rtol * scale:
        partner = 2
    else:
        raise InapplicableSpecError("reduction needs b1 = b2 or b1 = -b2")
    return PrecessionFrequency(-2.0 * H[1, partner], H[1, 1] - H[partner, partner])


def three_spin_projective_bound(spec):
    """Low-polarization crossover time for the reduced three-spin probe.

    For ``b1 = b2 = b``: ``(2/e) (b^2/2 + (delta - 3d/4)^2) / (sqrt(2)/4 |b|^3)``.
    """
    return low_polarization_time_bound(three_spin_effective_omega(spec))


# --- many spins ------------------------------------------------------------


@dataclass(frozen=True)
class ManySpinSpec:
    """``H = sum_i w_i Iz_i + sum_{i<j} b_ij I_i . I_j`` for 2 to 4 spins."""

    offsets: tuple
    couplings: np.ndarray = field(compare=False)

    def __post_init__(self):
        offsets = tuple(float(w) for w in self.offsets)
        b = np.array(self.couplings, dtype=float)
        n = len(offsets)
        if not 2 <= n <= 4:
            raise ValueError("between 2 and 4 spins are supported")
        if b.shape != (n, n):
            raise ValueError("coupling matrix shape does not match the offsets")
        if not np.allclose(b, b.T, atol=0.0):
            raise ValueError("coupling matrix must be symmetric")
        if np.any(np.diag(b) != 0):
            raise ValueError("coupling matrix must have a zero diagonal")
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "couplings", b)

    @property
    def n_spins(self):
        return len(self.offsets)


class ShortTimeExpansion(NamedTuple):
    """Leading-order ``Iz_i -> self * Iz_i + sum_j transfer[j] * Iz_j``."""

    self_coefficient: float
    transfer: np.ndarray
    validity: float


def many_spin_hamiltonian(spec):
    ops = oracle.spin_operators(spec.n_spins)
    H = sum(w * ops[i][2] for i, w in enumerate(spec.offsets))
    for i in range(spec.n_spins):
        for j in range(i + 1, spec.n_spins):
            if spec.couplings[i, j]:
                H = H + spec.couplings[i, j] * sum(ops[i][k] @ ops[j][k] for k in range(3))
    return H


def many_spin_initial_state(spec, i, mu0):
    """``(1 + 2 mu0 Iz_i) / 2^N``, so that ``<2 Iz_i> = mu0``."""
    dim = 2**spec.n_spins
    Iz = oracle.spin_operators(spec.n_spins)[i][2]
    return (np.eye(dim, dtype=complex) + 2.0 * mu0 * Iz) / dim


def monitor_labels(spec, i):
    """Sector label (Iz_i eigenvalue sign) of each product basis state."""
    n = spec.n_spins
    return np.array([(k >> (n - 1 - i)) & 1 for k in range(2**n)])


def many_spin_short_time_iz(spec, i, t):
    """Short-time redistribution of ``Iz_i`` among the spins.

    The transfer to spin ``j`` is ``b_ij^2 t^2 / 4`` (the exact pairwise
    flip-flop probability ``sin^2(b_ij t / 2)`` to leading order); offsets
    and multi-spin paths enter at ``t^4``.  ``validity`` is
    ``max_j(|b_ij| t, |w_i - w_j| t)`` and should be small.
    """
    if not 0 <= i < spec.n_spins:
        raise IndexError("spin index out of range")
    b = spec.couplings[i]
    transfer = b**2 * t**2 / 4.0
    transfer[i] = 0.0
    w = np.asarray(spec.offsets)
    others = np.arange(spec.n_spins) != i
    validity = float(max(np.max(np.abs(b[others])) * t, np.max(np.abs(w[others] - w[i])) * t))
    return ShortTimeExpansion(1.0 - float(transfer.sum()), transfer, validity)


def many_spin_effective_coupling(spec, i):
    """Central-spin coupling ``sqrt(sum_j b_ij^2 / N)`` with ``N`` the spin count."""
    b = spec.couplings[i]
    return math.sqrt(float(b @ b) / spec.n_spins)


def many_spin_zeno_optimum(b_eff, mu0, tau):
    """Zeno-regime ``(t_max, qfi_max) = (8 xi / (b^2 tau), 32 phi / b^2)``.

    The QFI is the qubit plateau ``4 phi / wx^2`` for ``wx = b / (2 sqrt 2)``,
    the coupling that turns ``1 - wx^2 t^2`` into the decay law
    ``1 - b^2 t^2 / 8``.  That qubit actually peaks at ``16 xi / (b^2 tau)``,
    because its polarization falls as ``1 - wx^2 t^2 / 2``; the returned time
    is the ``wx = b / 2`` reading of the same decay law.  Both numbers are
    kept as the conventional pair; see the tests for what the exact spin
    dynamics gives.
    """
    _check_mu0(mu0)
    if b_eff == 0 or not tau > 0:
        raise ValueError("need nonzero coupling and positive tau")
    return 8.0 * xi(mu0) / (b_eff**2 * tau), 32.0 * phi(mu0) / b_eff**2

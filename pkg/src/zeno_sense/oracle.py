"""Brute-force reference: explicit density matrices for 1 to 4 spins.

Nothing here uses the closed forms.  States are propagated with exact
matrix exponentials (Hermitian eigendecomposition), projective measurements
are applied as a dephasing channel, and the QFI is computed from the
spectrum of the density matrix with a finite-difference derivative.
"""

from functools import reduce
import warnings

import numpy as np

from .bloch import MeasurementSchedule

__all__ = [
    "MAX_DIM",
    "EIG_FLOOR",
    "DegenerateSpectrumWarning",
    "PAULI",
    "spin_operators",
    "check_density_matrix",
    "qubit_density",
    "bloch_vector",
    "qubit_hamiltonian",
    "propagate_unitary",
    "dephase",
    "stroboscopic_evolution",
    "qfi_eigen",
    "finite_diff_drho",
    "coherent_qubit_rho",
    "projected_qubit_rho",
    "oracle_qfi_coherent",
    "oracle_qfi_projected",
]

MAX_DIM = 16
EIG_FLOOR = 1e-12
_LOOP_LIMIT = 32

PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
_I2 = np.eye(2, dtype=complex)


class DegenerateSpectrumWarning(RuntimeWarning):
    """Degenerate eigenvalues coupled by the derivative of the state."""


def spin_operators(n):
    """Spin-1/2 operators ``(Ix, Iy, Iz)`` for each of ``n`` spins.

    Basis ordering is the Kronecker product with spin 0 as the most
    significant factor; index 0 of each factor is spin up.
    """
    if not 1 <= n <= 4:
        raise ValueError("the oracle handles 1 to 4 spins")
    ops = []
    for k in range(n):
        ops.append(
            tuple(
                reduce(np.kron, [PAULI[a] / 2 if j == k else _I2 for j in range(n)])
                for a in "xyz"
            )
        )
    return ops


def _hermitian_defect(m):
    return np.abs(m - m.conj().T).max()


def check_density_matrix(rho, atol=1e-12):
    """Raise ``ValueError`` unless ``rho`` is Hermitian, unit-trace and PSD."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    dim = rho.shape[0]
    if dim > MAX_DIM or dim & (dim - 1):
        raise ValueError(f"dimension {dim} is not a power of two up to {MAX_DIM}")
    if _hermitian_defect(rho) > atol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > atol:
        raise ValueError(f"trace is {np.trace(rho)!r}")
    if np.linalg.eigvalsh(rho).min() < -atol:
        raise ValueError("density matrix has a negative eigenvalue")
    return rho


def qubit_density(mu):
    mx, my, mz = mu
    return 0.5 * (_I2 + mx * PAULI["x"] + my * PAULI["y"] + mz * PAULI["z"])


def bloch_vector(rho):
    return np.array([np.trace(rho @ PAULI[a]).real for a in "xyz"])


def qubit_hamiltonian(omega):
    return 0.5 * (omega.wx * PAULI["x"] + omega.wz * PAULI["z"])


def propagate_unitary(H, rho, t):
    """``U rho U^dagger`` with ``U = exp(-i H t)``."""
    H = np.asarray(H)
    scale = max(1.0, np.abs(H).max())
    if _hermitian_defect(H) > 1e-12 * scale:
        raise ValueError("Hamiltonian is not Hermitian")
    if H.shape[0] > MAX_DIM:
        raise ValueError(f"dimension above {MAX_DIM}")
    if t == 0:
        return np.array(rho, dtype=complex)
    energies, vecs = np.linalg.eigh(H)
    U = (vecs * np.exp(-1j * energies * t)) @ vecs.conj().T
    out = U @ rho @ U.conj().T
    return 0.5 * (out + out.conj().T)


def dephase(rho, labels):
    """Erase coherences between basis states with different sector labels.

    A non-selective projective measurement: for a qubit use labels
    ``[0, 1]``; to monitor ``Iz`` of one spin among several, label each
    product state by that spin's ``Iz`` eigenvalue.
    """
    labels = np.asarray(labels)
    if labels.shape != (rho.shape[0],):
        raise ValueError("need one label per basis state")
    return np.where(labels[:, None] == labels[None, :], rho, 0.0)


def stroboscopic_evolution(H, rho0, tau, n, dt, labels):
    """``n`` cycles of (evolve ``tau``, measure), then evolve ``dt``.

    Long runs raise the one-cycle superoperator to the ``n``-th power by
    repeated squaring instead of looping.
    """
    rho = np.array(rho0, dtype=complex)
    if n:
        energies, vecs = np.linalg.eigh(H)
        U = (vecs * np.exp(-1j * energies * tau)) @ vecs.conj().T
        if n <= _LOOP_LIMIT:
            for _ in range(n):
                rho = dephase(U @ rho @ U.conj().T, labels)
        else:
            labels = np.asarray(labels)
            keep = (labels[:, None] == labels[None, :]).ravel()
            cycle = keep[:, None] * np.kron(U, U.conj())
            rho = (np.linalg.matrix_power(cycle, int(n)) @ rho.ravel()).reshape(rho.shape)
            rho = 0.5 * (rho + rho.conj().T)
    return propagate_unitary(H, rho, dt)


def qfi_eigen(rho, drho, eps=EIG_FLOOR):
    """QFI from the spectral decomposition of ``rho``.

    Uses ``sum_n (d lambda_n)^2 / lambda_n + 2 sum_{n != m} |<m|drho|n>|^2 /
    (lambda_n + lambda_m)``, the same sum as the eigenvector-derivative form
    with ``<m|d n> = <m|drho|n> / (lambda_n - lambda_m)`` substituted.  Terms
    with ``lambda_n < eps`` (diagonal) or ``lambda_n + lambda_m < eps`` are
    dropped.
    """
    rho = np.asarray(rho)
    drho = np.asarray(drho)
    if _hermitian_defect(drho) > 1e-8 * max(1.0, np.abs(drho).max()):
        raise ValueError("state derivative is not Hermitian")
    lam, vecs = np.linalg.eigh(rho)
    D = vecs.conj().T @ drho @ vecs
    absd2 = np.abs(D) ** 2
    total = 0.0
    dim = len(lam)
    degenerate = False
    for i in range(dim):
        if lam[i] > eps:
            total += absd2[i, i].real / lam[i]
        for j in range(i + 1, dim):
            s = lam[i] + lam[j]
            if s <= eps:
                continue
            if abs(lam[i] - lam[j]) < 1e-10 and absd2[i, j] > 1e-20:
                degenerate = True
            total += 4.0 * absd2[i, j] / s
    if degenerate:
        warnings.warn(
            "degenerate eigenvalues coupled by drho; eigenvector form is ambiguous there",
            DegenerateSpectrumWarning,
            stacklevel=2,
        )
    return float(max(total, 0.0))


def finite_diff_drho(builder, wx, h=None, richardson=False):
    """Central difference ``(rho(wx + h) - rho(wx - h)) / 2h``.

    `h` defaults to ``1e-6 |wx|``.  With ``richardson=True`` the steps ``h``
    and ``h/2`` are combined to cancel the ``h^2`` error term.
    """
    if h is None:
        h = 1e-6 * abs(wx)
    if not h > 0:
        raise ValueError("step must be positive")

    def central(step):
        return (builder(wx + step) - builder(wx - step)) / (2.0 * step)

    d = central(h)
    if richardson:
        d = (4.0 * central(h / 2.0) - d) / 3.0
    return d


def coherent_qubit_rho(omega, mu0, t):
    return propagate_unitary(qubit_hamiltonian(omega), qubit_density((0.0, 0.0, mu0)), t)


def projected_qubit_rho(omega, mu0, tau, t):
    sched = MeasurementSchedule(tau, t)
    return stroboscopic_evolution(
        qubit_hamiltonian(omega), qubit_density((0.0, 0.0, mu0)), tau, sched.n, sched.dt, [0, 1]
    )


def oracle_qfi_coherent(omega, mu0, t, h=None):
    drho = finite_diff_drho(lambda wx: coherent_qubit_rho(omega.with_wx(wx), mu0, t), omega.wx, h)
    return qfi_eigen(coherent_qubit_rho(omega, mu0, t), drho)


def oracle_qfi_projected(omega, mu0, tau, t, h=None):
    drho = finite_diff_drho(
        lambda wx: projected_qubit_rho(omega.with_wx(wx), mu0, tau, t), omega.wx, h
    )
    return qfi_eigen(projected_qubit_rho(omega, mu0, tau, t), drho)

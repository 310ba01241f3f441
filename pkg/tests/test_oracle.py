import numpy as np
import pytest

from zeno_sense import oracle
from zeno_sense.bloch import PrecessionFrequency


def test_spin_algebra():
    for n in (1, 2, 3, 4):
        ops = oracle.spin_operators(n)
        assert len(ops) == n
        for ix, iy, iz in ops:
            assert ix.shape == (2**n, 2**n)
            np.testing.assert_allclose(ix @ iy - iy @ ix, 1j * iz, atol=1e-15)
            np.testing.assert_allclose(ix @ ix + iy @ iy + iz @ iz, 0.75 * np.eye(2**n), atol=1e-15)
    with pytest.raises(ValueError):
        oracle.spin_operators(5)


def test_spin_zero_is_most_significant():
    (_, _, iz0), (_, _, iz1) = oracle.spin_operators(2)
    assert np.diag(iz0).real.tolist() == [0.5, 0.5, -0.5, -0.5]
    assert np.diag(iz1).real.tolist() == [0.5, -0.5, 0.5, -0.5]


def test_density_matrix_checks():
    oracle.check_density_matrix(oracle.qubit_density((0.1, 0.2, 0.3)))
    with pytest.raises(ValueError):
        oracle.check_density_matrix(np.eye(2))
    with pytest.raises(ValueError):
        oracle.check_density_matrix(np.array([[1.2, 0], [0, -0.2]]))
    with pytest.raises(ValueError):
        oracle.check_density_matrix(np.array([[0.5, 0.1], [0.2, 0.5]]))
    with pytest.raises(ValueError):
        oracle.check_density_matrix(np.eye(3) / 3)


def test_propagation_is_unitary(rng):
    a = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    H = a + a.conj().T
    rho = oracle.qubit_density((0.3, 0.0, 0.4))
    rho = np.kron(rho, np.eye(4) / 4)
    out = oracle.propagate_unitary(H, rho, 1.7)
    oracle.check_density_matrix(out)
    np.testing.assert_allclose(np.linalg.eigvalsh(out), np.linalg.eigvalsh(rho), atol=1e-12)
    np.testing.assert_allclose(oracle.propagate_unitary(H, out, -1.7), rho, atol=1e-12)
    with pytest.raises(ValueError):
        oracle.propagate_unitary(a, rho, 1.0)


def test_dephase():
    rho = oracle.qubit_density((0.5, 0.2, 0.3))
    d = oracle.dephase(rho, [0, 1])
    assert d[0, 1] == 0 and d[1, 0] == 0
    assert np.trace(d) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        oracle.dephase(rho, [0, 1, 2])


def test_superoperator_power_equals_loop(monkeypatch):
    om = PrecessionFrequency(1.3, 4.0)
    H = oracle.qubit_hamiltonian(om)
    rho0 = oracle.qubit_density((0.0, 0.0, 0.9))
    fast = oracle.stroboscopic_evolution(H, rho0, 0.07, 500, 0.02, [0, 1])
    monkeypatch.setattr(oracle, "_LOOP_LIMIT", 10**9)
    slow = oracle.stroboscopic_evolution(H, rho0, 0.07, 500, 0.02, [0, 1])
    np.testing.assert_allclose(fast, slow, atol=1e-13)


def test_qfi_eigen_pure_state():
    # pure state, tangential derivative: QFI = |d mu|^2
    rho = oracle.qubit_density((0.0, 0.0, 1.0))
    drho = 0.5 * 0.3 * oracle.PAULI["x"]
    assert oracle.qfi_eigen(rho, drho) == pytest.approx(0.09)


def test_qfi_eigen_classical_limit():
    # diagonal state with diagonal derivative: classical Fisher information
    p = 0.3
    rho = np.diag([p, 1 - p]).astype(complex)
    drho = np.diag([1.0, -1.0]).astype(complex)
    assert oracle.qfi_eigen(rho, drho) == pytest.approx(1 / p + 1 / (1 - p))


def test_qfi_eigen_warns_on_coupled_degeneracy():
    with pytest.warns(oracle.DegenerateSpectrumWarning):
        oracle.qfi_eigen(np.eye(2) / 2, 0.1 * oracle.PAULI["x"])


def test_qfi_eigen_rejects_non_hermitian_derivative():
    with pytest.raises(ValueError):
        oracle.qfi_eigen(np.eye(2) / 2, np.array([[0, 1], [0, 0]], dtype=complex))


def test_finite_difference_and_richardson():
    f = lambda x: np.array([[np.sin(x), 0], [0, np.cos(x)]])
    exact = np.array([[np.cos(1.0), 0], [0, -np.sin(1.0)]])
    plain = oracle.finite_diff_drho(f, 1.0, h=1e-2)
    rich = oracle.finite_diff_drho(f, 1.0, h=1e-2, richardson=True)
    assert np.abs(rich - exact).max() < np.abs(plain - exact).max() / 100
    with pytest.raises(ValueError):
        oracle.finite_diff_drho(f, 1.0, h=0.0)

import numpy as np
import pytest
from scipy.linalg import expm

from hypercon_lab import (BranchCutViolation, Log, NonHermitianError, NonSquareError,
                          Power, frac_resolvent_power, frac_resolvent_power_calculus,
                          is_psd, matrix_function, spectral_data, spectral_radius)
from hypercon_lab.operator_core import resolvent_series

from conftest import cgauss


def test_is_psd_identity():
    rep = is_psd(np.eye(3), 1e-10)
    assert rep.is_psd and rep.min_eigenvalue == pytest.approx(1.0)


def test_is_psd_indefinite():
    rep = is_psd(np.diag([1.0, -1.0]), 1e-10)
    assert not rep.is_psd and rep.min_eigenvalue == pytest.approx(-1.0)


def test_is_psd_shifted_gram(rng):
    G = cgauss(rng, 5, 5)
    H = G.conj().T @ G
    lmin = np.linalg.eigvalsh(H)[0]
    assert is_psd(H - 0.5 * lmin * np.eye(5)).is_psd


def test_is_psd_rejects_non_hermitian():
    with pytest.raises(NonHermitianError):
        is_psd(np.array([[1.0, 1.0], [0.0, 1.0]]), 1e-10)


def test_non_square_rejected():
    with pytest.raises(NonSquareError):
        spectral_radius(np.ones((2, 3)))


@pytest.mark.parametrize("eps", [1e-3, 1.0, 10.0])
def test_is_psd_shift_invariant(rng, eps):
    G = cgauss(rng, 4, 4)
    H = (G + G.conj().T) / 2
    a = is_psd(H, 1e-8).min_eigenvalue
    b = is_psd(H + eps * np.eye(4), 1e-8).min_eigenvalue
    assert b - a == pytest.approx(eps, abs=1e-12)


def test_spectral_radius_examples():
    assert spectral_radius(np.diag([0.5, 0.3j])) == pytest.approx(0.5)
    assert spectral_radius(np.array([[0.0, 1.0], [0.0, 0.0]])) == 0.0
    # companion of z^2 - z/2 - 1/4
    comp = np.array([[0.5, 0.25], [1.0, 0.0]])
    assert spectral_radius(comp) == pytest.approx(np.max(np.abs(np.roots([1, -0.5, -0.25]))))


def test_spectral_data_flags_jordan_block():
    sd = spectral_data(np.array([[1.0, 1.0], [0.0, 1.0]]))
    assert not sd.is_diagonalizable and sd.schur_form_available


def test_matrix_function_examples():
    N = np.array([[0.0, 1.0], [0.0, 0.0]])
    assert np.allclose(matrix_function(N, Power(2)), 0)
    assert np.allclose(matrix_function(np.diag([4.0, 9.0]), Power(1.5)), np.diag([8.0, 27.0]))


def test_log_round_trip(rng):
    M = cgauss(rng, 4, 4) * 0.3 + 3 * np.eye(4)
    assert np.all(np.linalg.eigvals(M).real > 0)
    assert np.linalg.norm(expm(matrix_function(M, Log())) - M) < 1e-9


def test_log_of_defective_matrix_uses_schur():
    J = np.array([[2.0, 1.0], [0.0, 2.0]])
    L = matrix_function(J, Log())
    assert np.allclose(expm(L), J, atol=1e-12)


def test_branch_cut_violation():
    with pytest.raises(BranchCutViolation):
        matrix_function(np.diag([-1.0, 2.0]), Power(0.5))
    with pytest.raises(BranchCutViolation):
        matrix_function(np.diag([-1.0, 2.0]), Log())


def test_power_product_rule(rng):
    V = np.eye(4) + 0.2 * cgauss(rng, 4, 4)
    M = V @ np.diag([1.0, 2.0, 3.0 + 1j, 0.5]) @ np.linalg.inv(V)
    lhs = matrix_function(M, Power(0.3)) @ matrix_function(M, Power(1.2))
    assert np.linalg.norm(lhs - matrix_function(M, Power(1.5))) < 1e-9


def test_frac_resolvent_trivial_cases(rng):
    T = cgauss(rng, 3, 3)
    assert np.allclose(frac_resolvent_power(T, 0, 0.7), np.eye(3))
    val = frac_resolvent_power(np.array([[0.6]]), 0.5, 1.0)
    assert val[0, 0] == pytest.approx(1 / 0.49, rel=1e-12)


def test_frac_resolvent_dual_path(rng):
    G = cgauss(rng, 4, 4)
    T = 0.95 * G / np.linalg.norm(G, 2)
    z = 0.7 * np.exp(1j * np.pi / 3)
    a = frac_resolvent_power(T, z, 0.5)
    b = frac_resolvent_power_calculus(T, z, 0.5)
    assert np.linalg.norm(a - b) < 1e-9


@pytest.mark.parametrize("k", [1, 2, 3])
def test_frac_resolvent_integer_matches_inverse(rng, k):
    G = cgauss(rng, 4, 4)
    T = 0.9 * G / np.linalg.norm(G, 2)
    z = 0.8j
    R = np.linalg.inv(np.eye(4) - np.conj(z) * T)
    assert np.linalg.norm(frac_resolvent_power(T, z, k - 1) - np.linalg.matrix_power(R, k)) < 1e-10


def test_truncation_independence(rng):
    G = cgauss(rng, 3, 3)
    T = 0.9 * G / np.linalg.norm(G, 2)
    res = resolvent_series(T, 0.9, 0.5)
    doubled = resolvent_series(T, 0.9, 0.5, terms=2 * res.terms)
    assert np.linalg.norm(doubled.value - res.value, 2) <= res.tail_bound


def test_nonnormal_beyond_norm_uses_power_decay():
    # ||T|| > 1 but rho(T) < 1: the series still converges
    T = np.array([[0.5, 3.0], [0.0, 0.5]])
    z = 0.9
    a = frac_resolvent_power(T, z, 1.0)
    R = np.linalg.inv(np.eye(2) - z * T)
    assert np.linalg.norm(a - R @ R) < 1e-9

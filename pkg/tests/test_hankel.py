import numpy as np
import pytest
from scipy.linalg import hilbert

from hypercon_lab import (BergmanModel, HankelSymbol, gamma_matrix, little_hankel_apply,
                          little_hankel_matrix, monomial_norms, rkt_experiment)
from hypercon_lab.bergman import to_orthonormal
from hypercon_lab.hankel import symbols_from_observation

from conftest import cgauss
from oracles import polar_disc_integral


def test_gamma_matrix_unit_symbol():
    G = gamma_matrix(HankelSymbol([1.0]), 0.7, 1.3, 5)
    E = np.zeros((5, 5))
    E[0, 0] = 1
    assert np.array_equal(G, E)


def test_gamma_matrix_classical_hankel(rng):
    phi = HankelSymbol(cgauss(rng, 12))
    G = gamma_matrix(phi, 0, 0, 6)
    for m in range(6):
        for n in range(6):
            assert G[m, n] == phi.coefficients[m + n, 0, 0]


def test_gamma_matrix_antidiagonal_after_unweighting(rng):
    phi = HankelSymbol(cgauss(rng, 15, 2, 3))
    a, b, M = 0.5, 1.5, 7
    G = gamma_matrix(phi, a, b, M)
    for m in range(M):
        for n in range(M):
            blk = G[2 * m:2 * m + 2, 3 * n:3 * n + 3] / ((1 + m) ** a * (1 + n) ** b)
            assert np.allclose(blk, phi.block(m + n))


def test_hilbert_matrix_against_scipy():
    phi = HankelSymbol(1.0 / (1 + np.arange(128)))
    s = [np.linalg.norm(gamma_matrix(phi, 0, 0, M), 2) for M in (16, 32, 64)]
    assert s[2] == pytest.approx(np.linalg.norm(hilbert(64), 2), rel=1e-12)
    # the norm creeps up towards pi only logarithmically in M
    assert s[0] < s[1] < s[2] < np.pi
    assert s[2] == pytest.approx(2.11608, abs=1e-5)


def test_apply_constant_symbol(rng):
    C = HankelSymbol(cgauss(rng, 1, 2, 3))
    f = BergmanModel(0.0, 5, 3).vector(cgauss(rng, 5, 3))
    out = little_hankel_apply(C, f, 0.5)
    assert np.allclose(out.coeffs[0], C.coefficients[0] @ f.coeffs[0])
    assert np.allclose(out.coeffs[1:], 0)


def test_apply_z_symbol_on_constant():
    C = HankelSymbol([0.0, 1.0])
    f = BergmanModel(0.0, 3).monomial(0, [2.0 - 1j])
    out = little_hankel_apply(C, f, 1.0)
    assert np.allclose(out.coeffs[:, 0], [0, 2.0 - 1j, 0])


def test_apply_vs_quadrature(rng):
    alpha, beta = 0.0, 1.0
    C = HankelSymbol(cgauss(rng, 6))
    f = BergmanModel(beta - 1, 6).vector(cgauss(rng, 6))
    out = little_hankel_apply(C, f, alpha)
    w = monomial_norms(alpha, 12)
    Cz = lambda z: np.polyval(C.coefficients[::-1, 0, 0], z)
    fz = lambda z: np.polyval(f.coeffs[::-1, 0], z)
    for k in range(6):
        ref = polar_disc_integral(lambda z: Cz(np.conj(z)) * fz(z) * z ** k, alpha) / w[k]
        assert abs(out.coeffs[k, 0] - ref) < 1e-8


def test_matrix_matches_apply(rng):
    alpha, beta, M = 0.5, 1.5, 8
    C = HankelSymbol(cgauss(rng, 6, 2, 2))
    f = BergmanModel(beta - 1, M, 2).vector(cgauss(rng, M, 2))
    H = little_hankel_matrix(C, alpha, beta, M)
    out = little_hankel_apply(C, f, alpha, out_degree=M)
    assert np.allclose(H @ to_orthonormal(f), to_orthonormal(out))


def test_rkt_zero_symbol():
    rep = rkt_experiment(HankelSymbol(np.zeros(3)), 0.0, 1.0, M=8)
    assert rep.kernel_sup == rep.truncated_norm == 0 and rep.ratio == 1.0


def test_rkt_constant_symbol():
    # rank one: only the constant term of the kernel is seen, maximal at omega = 0
    rep = rkt_experiment(HankelSymbol([2.0]), 0.0, 1.0, M=16)
    assert rep.truncated_norm == pytest.approx(2.0)
    assert rep.kernel_sup == pytest.approx(2.0)
    assert rep.ratio == pytest.approx(1.0)


def test_kernel_sup_below_truncated_norm(rng):
    for _ in range(3):
        C = HankelSymbol(cgauss(rng, 5, 2, 2))
        rep = rkt_experiment(C, 0.5, 1.0, M=16)
        assert rep.kernel_sup <= rep.truncated_norm * (1 + 1e-12)


def test_dual_symbol_norms(rng):
    alpha, beta, M = 0.5, 1.0, 24
    C, Ct = symbols_from_observation(cgauss(rng, 10, 2, 3), alpha)
    a = np.linalg.norm(gamma_matrix(C, (1 + alpha) / 2, beta / 2, M), 2)
    b = np.linalg.norm(gamma_matrix(Ct, beta / 2, (1 + alpha) / 2, M), 2)
    assert abs(a - b) < 1e-10 * max(1, a)

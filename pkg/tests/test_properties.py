"""Invariants checked on hypothesis-generated inputs."""
import numpy as np
from hypothesis import assume, given, strategies as st
from hypothesis.extra import numpy as hnp

from hypercon_lab import (BergmanModel, HankelSymbol, adjoint_shift, cogenerator,
                          frac_resolvent_power, gamma_defect_series, gamma_defect_superop,
                          gamma_matrix, gamma_verdict, inner, is_psd, rkt_experiment, shift)
from hypercon_lab.cli import matrix_from_json, matrix_to_json
from hypercon_lab.hankel import symbols_from_observation
from hypercon_lab.semigroup import mobius_identity_deviation, quadratic_forms

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)


@st.composite
def cmatrices(draw, n=None, rows=None):
    n = draw(st.integers(1, 5)) if n is None else n
    rows = n if rows is None else rows
    re = draw(hnp.arrays(float, (rows, n), elements=finite))
    im = draw(hnp.arrays(float, (rows, n), elements=finite))
    return re + 1j * im


@st.composite
def contractions(draw, norm=None):
    M = draw(cmatrices())
    s = np.linalg.norm(M, 2)
    assume(s > 1e-3)
    nrm = draw(st.floats(0.05, 0.95)) if norm is None else norm
    return nrm * M / s


@given(cmatrices())
def test_form_identity(A):
    f1, f2 = quadratic_forms(A)
    assert np.max(np.abs(f1 - f2)) <= 1e-12 * max(1.0, np.max(np.abs(f1)))


@given(cmatrices(), st.sampled_from([1e-3, 1.0, 10.0]))
def test_psd_shift(M, eps):
    H = (M + M.conj().T) / 2
    a = is_psd(H, 1e-6).min_eigenvalue
    b = is_psd(H + eps * np.eye(len(H)), 1e-6).min_eigenvalue
    assert abs((b - a) - eps) <= 1e-12 * max(1.0, np.abs(H).max() * len(H))


@given(contractions(), st.floats(0, 2 * np.pi), st.sampled_from([1.5, 2.0, 3.0]))
def test_sign_invariance(T, theta, g):
    a = gamma_verdict(T, g, r_grid=(0.5, 0.9))
    b = gamma_verdict(np.exp(1j * theta) * T, g, r_grid=(0.5, 0.9))
    assert a.passes == b.passes
    assert abs(a.worst_min_eigenvalue - b.worst_min_eigenvalue) < 1e-10


@given(contractions())
def test_gamma_monotone(T):
    v = [gamma_verdict(T, g, r_grid=(0.9,)).passes for g in (1.0, 1.5, 2.0, 3.0, 5.0)]
    assert v == sorted(v, reverse=True)


@given(contractions(), st.sampled_from([1.5, 2.5, 3.7]), st.sampled_from([0.5, 0.9, 0.99]))
def test_series_superop(T, g, r):
    assert np.max(np.abs(gamma_defect_series(T, g, r) - gamma_defect_superop(T, g, r))) < 1e-8


@given(contractions(), st.floats(0, 0.95), st.floats(0, 2 * np.pi), st.sampled_from([0, 1, 2]))
def test_resolvent_integer_power(T, rad, th, k):
    z = rad * np.exp(1j * th)
    R = np.linalg.inv(np.eye(len(T)) - np.conj(z) * T)
    ref = np.linalg.matrix_power(R, k + 1)
    assert np.linalg.norm(frac_resolvent_power(T, z, k) - ref) <= 1e-10 * max(1, np.linalg.norm(ref))


@given(cmatrices(), st.floats(0.01, 2.0))
def test_cogenerator_contraction(N, delta):
    H = (N + N.conj().T) / 2
    A = N - (np.linalg.eigvalsh(H)[-1] + delta) * np.eye(len(N))
    for conv in ("sec2", "prop43"):
        assert np.linalg.norm(cogenerator(A, conv), 2) <= 1 + 1e-10


@given(st.floats(0, 0.999), st.floats(0, 2 * np.pi))
def test_mobius(r, th):
    assert mobius_identity_deviation([r * np.exp(1j * th)]) <= 1e-14


@given(st.floats(-0.9, 3.0), st.integers(1, 12), st.data())
def test_shift_adjoint(alpha, N, data):
    m = BergmanModel(alpha, N)
    f = m.vector(data.draw(cmatrices(n=1, rows=N))[:, 0])
    g = m.vector(data.draw(cmatrices(n=1, rows=N))[:, 0])
    lhs, rhs = inner(shift(f), g), inner(f, adjoint_shift(g))
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


@given(hnp.arrays(complex, st.integers(1, 5),
                  elements=st.complex_numbers(max_magnitude=2, allow_nan=False)),
       st.sampled_from([0.0, 0.5, 1.0]))
def test_kernel_sup_below_norm(c, alpha):
    rep = rkt_experiment(HankelSymbol(c), alpha, 1.0, grid=np.array([0, 0.5, -0.3j, 0.8]), M=8)
    assert rep.kernel_sup <= rep.truncated_norm * (1 + 1e-12) + 1e-300


@given(st.integers(1, 6), st.sampled_from([0.0, 0.5, 1.0]), st.data())
def test_dual_symbols(L, alpha, data):
    F = data.draw(cmatrices(n=2, rows=2 * L)).reshape(L, 2, 2)
    C, Ct = symbols_from_observation(F, alpha)
    a = np.linalg.norm(gamma_matrix(C, (1 + alpha) / 2, 0.5, 8), 2)
    b = np.linalg.norm(gamma_matrix(Ct, 0.5, (1 + alpha) / 2, 8), 2)
    assert abs(a - b) <= 1e-10 * max(1.0, a)


@given(cmatrices())
def test_matrix_json_round_trip(M):
    assert np.array_equal(matrix_from_json(matrix_to_json(M)), M)

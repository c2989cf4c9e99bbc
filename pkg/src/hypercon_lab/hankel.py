"""Generalized Hankel matrices and little Hankel operators between
truncated weighted Bergman spaces, with the reproducing-kernel ratio
experiment.

A symbol ``C(z) = sum_j C_j z^j`` has ``d2 x d1`` matrix coefficients.
The little Hankel operator ``h_C`` maps ``A^2_{beta-1}(C^d1)`` to the
anti-analytic space with the ``A^2_alpha`` monomial norms; since
``int conj(z)^m z^(n+k) dA_alpha = w_m(alpha) delta_{m, n+k}`` the
coefficient of ``conj(z)^k`` in ``h_C f`` is
``(1/w_k) sum_n C_{n+k} f_n w_{n+k}``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bergman import BergmanModel, BergmanVector, monomial_norms, reproducing_kernel
from .errors import TruncationTooSmall


@dataclass(frozen=True, eq=False)
class HankelSymbol:
    """Coefficient blocks ``Phi_0 .. Phi_{L-1}``, stored as an ``(L, d2, d1)`` array."""
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=complex)
        if c.ndim == 1:
            c = c[:, None, None]
        if c.ndim != 3:
            raise ValueError("symbol coefficients must have shape (L, d2, d1)")
        object.__setattr__(self, "coefficients", c)

    @property
    def length(self):
        return self.coefficients.shape[0]

    @property
    def shape(self):
        """``(d2, d1)``: output and input fiber dimensions."""
        return self.coefficients.shape[1:]

    def block(self, j):
        if 0 <= j < self.length:
            return self.coefficients[j]
        return np.zeros(self.shape, dtype=complex)

    def adjoint_symbol(self):
        """Symbol with blockwise adjoint coefficients ``Phi_j^*``."""
        return HankelSymbol(np.conj(np.transpose(self.coefficients, (0, 2, 1))))

    def __call__(self, z):
        powers = complex(z) ** np.arange(self.length)
        return np.tensordot(powers, self.coefficients, axes=1)


def symbols_from_observation(F_blocks, alpha):
    """``C_n = (1+n)^alpha F_n`` and ``C~_n = (1+n)^alpha F_n^*``."""
    F = np.asarray(F_blocks, dtype=complex)
    if F.ndim == 1:
        F = F[:, None, None]
    scale = (1.0 + np.arange(F.shape[0])) ** alpha
    C = HankelSymbol(scale[:, None, None] * F)
    return C, C.adjoint_symbol()


def gamma_matrix(phi, a, b, M):
    """Block matrix with block ``(m, n) = (1+m)^a (1+n)^b Phi_{n+m}``, ``m, n < M``."""
    d2, d1 = phi.shape
    out = np.zeros((M * d2, M * d1), dtype=complex)
    wa = (1.0 + np.arange(M)) ** a
    wb = (1.0 + np.arange(M)) ** b
    for m in range(M):
        for n in range(max(0, min(M, phi.length - m))):
            out[m * d2:(m + 1) * d2, n * d1:(n + 1) * d1] = wa[m] * wb[n] * phi.coefficients[n + m]
    return out


def little_hankel_apply(C, f, alpha, out_degree=None, truncate=False):
    """Apply ``h_C`` to ``f`` (an element of ``A^2_{beta-1}``).

    Returns a :class:`BergmanVector` in ``BergmanModel(alpha, out_degree, d2)``
    whose coefficient ``k`` multiplies ``conj(z)^k``.  If ``out_degree`` is
    too small to hold every nonzero output coefficient,
    :class:`TruncationTooSmall` is raised unless ``truncate`` is set.
    """
    d2, d1 = C.shape
    if f.model.fiber_dim != d1:
        raise ValueError("input fiber does not match the symbol")
    N = f.model.degree
    L = C.length
    if out_degree is None:
        out_degree = max(N, L)
    w = monomial_norms(alpha, max(L, out_degree) + 1)
    Cw = C.coefficients * w[:L, None, None]
    out = np.zeros((out_degree, d2), dtype=complex)
    for k in range(L):
        nmax = min(N, L - k)
        if nmax <= 0:
            continue
        val = np.einsum("nij,nj->i", Cw[k:k + nmax], f.coeffs[:nmax]) / w[k]
        if k < out_degree:
            out[k] = val
        elif not truncate and np.any(val != 0):
            raise TruncationTooSmall(
                f"output coefficient {k} is nonzero but out_degree = {out_degree}")
    return BergmanVector(BergmanModel(alpha, out_degree, d2), out)


def little_hankel_matrix(C, alpha, beta, M):
    """Matrix of ``h_C`` restricted to degrees ``< M`` on both sides, in the
    orthonormal bases ``z^n / sqrt(v_n)`` (``v = w(beta - 1)``) and
    ``conj(z)^k / sqrt(w_k(alpha))``."""
    d2, d1 = C.shape
    w = monomial_norms(alpha, 2 * M)
    v = monomial_norms(beta - 1.0, M)
    H = np.zeros((M * d2, M * d1), dtype=complex)
    for k in range(min(M, C.length)):
        for n in range(min(M, C.length - k)):
            H[k * d2:(k + 1) * d2, n * d1:(n + 1) * d1] = (
                C.coefficients[n + k] * w[n + k] / np.sqrt(w[k] * v[n]))
    return H


def disc_grid(n_radii=24, n_angles=48, r_max=0.95):
    """Polar grid with ``omega = 0`` listed once, then rings in increasing radius."""
    radii = np.linspace(0.0, r_max, n_radii)[1:]
    theta = 2 * np.pi * np.arange(n_angles) / n_angles
    pts = (radii[:, None] * np.exp(1j * theta)[None, :]).ravel()
    return np.concatenate([[0j], pts])


@dataclass(frozen=True)
class RktReport:
    kernel_sup: float
    truncated_norm: float
    ratio: float
    grid_size: int
    truncation: int
    argmax_omega: complex = 0j


def _ratio(num, den):
    if den == 0:
        return 1.0 if num == 0 else float("inf")
    return num / den


def kernel_images(C, alpha, beta, omega, M):
    """Norm of ``y -> h_C k_{omega,y}`` over unit ``y`` (exact, via SVD).

    Only the first ``C.length`` kernel coefficients reach ``h_C``, so the
    kernel is truncated at degree ``M`` without a tail check.
    """
    d2, d1 = C.shape
    model = BergmanModel(beta - 1.0, M, d1)
    w = monomial_norms(alpha, M)
    cols = []
    for i in range(d1):
        y = np.zeros(d1)
        y[i] = 1.0
        k = reproducing_kernel(model, omega, y, tol=np.inf)
        out = little_hankel_apply(C, k, alpha, out_degree=M, truncate=True)
        cols.append((np.sqrt(w)[:, None] * out.coeffs).ravel())
    return float(np.linalg.norm(np.column_stack(cols), 2))


def rkt_experiment(C, alpha, beta, grid=None, M=32):
    """Compare ``sup ||h_C k_{omega,y}||`` over a disc grid with ``||h_C||``
    at truncation ``M``.  By convention ``0/0`` gives ratio 1."""
    if beta <= 0 or alpha <= -1:
        raise ValueError("need beta > 0 and alpha > -1")
    grid = disc_grid() if grid is None else np.asarray(grid, dtype=complex).ravel()
    if grid.size and np.max(np.abs(grid)) >= 1:
        raise ValueError("grid points must lie in the open unit disc")
    H = little_hankel_matrix(C, alpha, beta, M)
    tnorm = float(np.linalg.norm(H, 2)) if H.size else 0.0
    vals = np.array([kernel_images(C, alpha, beta, om, M) for om in grid])
    i = int(np.argmax(vals)) if vals.size else 0
    ksup = float(vals[i]) if vals.size else 0.0
    return RktReport(ksup, tnorm, _ratio(tnorm, ksup), int(grid.size), int(M),
                     complex(grid[i]) if grid.size else 0j)

"""Truncated vector-valued weighted Bergman spaces ``A^2_alpha(D, K)``.

Elements are polynomials of degree ``< N`` with coefficients in
``K = C^d``.  The norm is the area-measure norm
``||f||^2 = int_D ||f(z)||^2 (1+alpha)(1-|z|^2)^alpha dA(z)``, under which
monomials are orthogonal with ``||z^n||^2 = w_n = n! Gamma(alpha+2) / Gamma(n+alpha+2)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_jacobi

from .errors import AlphaOutOfRange, ModelMismatch, TruncationTooSmall
from .operator_core import _binomial_tail_at, binomial_coeffs


def monomial_norms(alpha, N):
    """``w_0, ..., w_{N-1}`` via ``w_0 = 1``, ``w_n = w_{n-1} n/(n + alpha + 1)``."""
    if alpha <= -1:
        raise AlphaOutOfRange(f"alpha must exceed -1, got {alpha}")
    w = np.ones(N)
    if N > 1:
        n = np.arange(1, N)
        w[1:] = np.cumprod(n / (n + alpha + 1.0))
    return w


def monomial_norm(alpha, n):
    return float(monomial_norms(alpha, n + 1)[n])


@dataclass(frozen=True)
class BergmanModel:
    alpha: float
    degree: int
    fiber_dim: int = 1
    monomial_norms: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.degree < 1 or self.fiber_dim < 1:
            raise ValueError("degree and fiber_dim must be positive")
        object.__setattr__(self, "monomial_norms", monomial_norms(self.alpha, self.degree))

    def vector(self, coeffs):
        return BergmanVector(self, coeffs)

    def zero(self):
        return BergmanVector(self, np.zeros((self.degree, self.fiber_dim), dtype=complex))

    def monomial(self, n, y):
        c = np.zeros((self.degree, self.fiber_dim), dtype=complex)
        c[n] = y
        return BergmanVector(self, c)


@dataclass(frozen=True, eq=False)
class BergmanVector:
    """Taylor coefficients ``f_n`` (rows) of a truncated element."""
    model: BergmanModel
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim == 1:
            c = c[:, None]
        if c.shape != (self.model.degree, self.model.fiber_dim):
            raise ValueError(f"coefficient array has shape {c.shape}, expected "
                             f"{(self.model.degree, self.model.fiber_dim)}")
        object.__setattr__(self, "coeffs", c)

    def __call__(self, z):
        """Point evaluation ``f(z)`` in ``K``."""
        powers = complex(z) ** np.arange(self.model.degree)
        return powers @ self.coeffs

    def __add__(self, other):
        _same_model(self, other)
        return BergmanVector(self.model, self.coeffs + other.coeffs)

    def __rmul__(self, c):
        return BergmanVector(self.model, c * self.coeffs)


def _same_model(f, g):
    if f.model != g.model:
        raise ModelMismatch("vectors belong to different models")


def inner(f, g):
    """``<f, g> = sum_n w_n <f_n, g_n>_K`` (linear in ``f``)."""
    _same_model(f, g)
    w = f.model.monomial_norms
    return complex(np.sum(w[:, None] * f.coeffs * np.conj(g.coeffs)))


def norm(f):
    return float(np.sqrt(max(inner(f, f).real, 0.0)))


def shift(f):
    """``z f(z)``; the coefficient pushed past degree ``N - 1`` is dropped."""
    c = np.zeros_like(f.coeffs)
    c[1:] = f.coeffs[:-1]
    return BergmanVector(f.model, c)


def adjoint_shift(f):
    """Adjoint of :func:`shift` for :func:`inner`: ``f_n -> (w_{n+1}/w_n) f_{n+1}``."""
    w = f.model.monomial_norms
    c = np.zeros_like(f.coeffs)
    c[:-1] = (w[1:] / w[:-1])[:, None] * f.coeffs[1:]
    return BergmanVector(f.model, c)


def shift_weights(alpha, N):
    """``sqrt(w_{n+1}/w_n) = sqrt((n+1)/(n+alpha+2))`` for ``n < N - 1``."""
    n = np.arange(N - 1)
    return np.sqrt((n + 1.0) / (n + alpha + 2.0))


def shift_matrix(model):
    """Matrix of :func:`shift` in the orthonormal basis ``z^n e_i / sqrt(w_n)``.

    Index order is ``(n, i) -> n * d + i``.
    """
    N, d = model.degree, model.fiber_dim
    S = np.diag(shift_weights(model.alpha, N), -1).astype(complex)
    return np.kron(S, np.eye(d))


def adjoint_shift_matrix(model):
    """Matrix of :func:`adjoint_shift`; the span of the first ``N``
    monomials is invariant for the adjoint shift, so this is an exact
    restriction, not a compression."""
    return shift_matrix(model).conj().T


def to_orthonormal(f):
    """Coordinates of ``f`` in the basis used by :func:`shift_matrix`."""
    w = f.model.monomial_norms
    return (np.sqrt(w)[:, None] * f.coeffs).ravel()


def from_orthonormal(model, x):
    w = model.monomial_norms
    c = np.asarray(x, dtype=complex).reshape(model.degree, model.fiber_dim)
    return BergmanVector(model, c / np.sqrt(w)[:, None])


def kernel_tail(beta, omega, N):
    """Missing squared norm of the normalized kernel truncated at degree ``N``."""
    q = abs(omega) ** 2
    if q == 0:
        return 0.0
    return (1 - q) ** (1 + beta) * _binomial_tail_at(beta, q, N)


def reproducing_kernel(model, omega, y, normalized=True, tol=1e-10):
    """Kernel of ``A^2_{beta-1}`` at ``omega`` in direction ``y`` (``beta = alpha + 1``).

    Unnormalized coefficients are ``y C(n+beta, n) conj(omega)^n`` so that
    ``<f, K_omega y> = <f(omega), y>`` for every ``f`` in the model; the
    normalized kernel carries the extra factor ``(1-|omega|^2)^((1+beta)/2)``.
    """
    omega = complex(omega)
    if abs(omega) >= 1:
        raise ValueError("omega must lie in the open unit disc")
    beta = model.alpha + 1.0
    N = model.degree
    y = np.asarray(y, dtype=complex).ravel()
    if y.shape != (model.fiber_dim,):
        raise ValueError("direction y has the wrong dimension")
    tail = kernel_tail(beta, omega, N)
    if tail > tol:
        raise TruncationTooSmall(
            f"kernel tail {tail:.2e} > {tol:.1e} at |omega| = {abs(omega):.4g}, N = {N}")
    c = binomial_coeffs(beta, N) * np.conj(omega) ** np.arange(N)
    if normalized:
        c = c * (1 - abs(omega) ** 2) ** ((1 + beta) / 2)
    return BergmanVector(model, np.outer(c, y))


# ---------------------------------------------------------------------------
# quadrature oracle


def disc_quadrature(alpha, n_radial=128, n_angle=256):
    """Nodes and weights for ``int_D g dA_alpha``.

    With ``u = |z|^2`` the measure becomes ``(1+alpha)/(2 pi) (1-u)^alpha du dtheta``.
    The radial rule is Gauss-Jacobi for the weight ``(1-u)^alpha`` on
    ``[0, 1]`` (exact for polynomials in ``u`` of degree ``< 2 n_radial``);
    the angular rule is the trapezoid rule (exact for trigonometric
    polynomials of degree ``< n_angle``).
    """
    if alpha <= -1:
        raise AlphaOutOfRange(f"alpha must exceed -1, got {alpha}")
    x, wx = roots_jacobi(n_radial, alpha, 0.0)
    u = (x + 1) / 2
    wu = wx / 2 ** (alpha + 1)
    theta = 2 * np.pi * np.arange(n_angle) / n_angle
    z = np.sqrt(u)[:, None] * np.exp(1j * theta)[None, :]
    w = (1 + alpha) * wu[:, None] / n_angle * np.ones(n_angle)[None, :]
    return z.ravel(), w.ravel()


def integrate_disc(g, alpha, n_radial=128, n_angle=256):
    """``int_D g(z) dA_alpha(z)`` for a vectorized scalar function ``g``."""
    z, w = disc_quadrature(alpha, n_radial, n_angle)
    return complex(np.sum(w * g(z)))

"""Dense complex linear algebra used throughout the package.

Operators are plain ``numpy`` complex arrays; :func:`as_matrix` is the
single entry point that validates shape and finiteness.  This module
provides positivity certificates, spectra, holomorphic matrix functions
and the fractional resolvent power ``(I - conj(z) T)^(-(1+beta))``
evaluated by its binomial series with an explicit tail bound.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg as sla

from . import kernels
from .errors import (BranchCutViolation, DivergentSeriesError, NonFiniteError,
                     NonHermitianError, NonSquareError, ToleranceNotReached)

logger = logging.getLogger(__name__)

#: eigenvector condition number above which the Schur path is used
EIG_COND_THRESHOLD = 1e4
DEFAULT_SERIES_TOL = 1e-12
MAX_SERIES_TERMS = 2_000_000


def as_matrix(M, name="matrix", square=False):
    """Return ``M`` as a 2-D complex128 array, checking finiteness."""
    a = np.asarray(M)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    elif a.ndim == 1:
        a = a.reshape(1, -1)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {a.shape}")
    a = a.astype(complex, copy=False)
    if not np.all(np.isfinite(a)):
        raise NonFiniteError(f"{name} has non-finite entries")
    if square and a.shape[0] != a.shape[1]:
        raise NonSquareError(f"{name} must be square, got shape {a.shape}")
    return a


def adjoint(M):
    return np.conj(np.asarray(M)).T


def op_norm(M):
    """Operator norm (largest singular value); 0 for empty input."""
    a = np.asarray(M)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def default_psd_tol(M):
    return 1e-10 * (1.0 + op_norm(M))


@dataclass(frozen=True)
class PositivityReport:
    min_eigenvalue: float
    tolerance: float
    is_psd: bool
    hermitian_defect: float


def hermitian_defect(M):
    """``||M - (M + M^*)/2||``, the distance of ``M`` from its Hermitian part."""
    M = np.asarray(M)
    return op_norm((M - adjoint(M)) / 2)


def is_psd(M, tol=None):
    """Positivity certificate for a (numerically) Hermitian matrix.

    The defect from Hermitian is measured first; only if it is within
    ``tol`` is the matrix symmetrized and its smallest eigenvalue taken.
    ``tol`` defaults to ``1e-10 * (1 + ||M||)``.
    """
    M = as_matrix(M, square=True)
    if tol is None:
        tol = default_psd_tol(M)
    defect = hermitian_defect(M)
    if defect > tol:
        raise NonHermitianError(defect, tol)
    H = (M + adjoint(M)) / 2
    lam = float(np.linalg.eigvalsh(H)[0]) if H.size else 0.0
    return PositivityReport(lam, float(tol), lam >= -tol, defect)


@dataclass(frozen=True)
class SpectralData:
    eigenvalues: np.ndarray
    spectral_radius: float
    is_diagonalizable: bool
    schur_form_available: bool
    eigvec_condition: float


def spectral_data(M, cond_threshold=EIG_COND_THRESHOLD):
    M = as_matrix(M, square=True)
    w, V = np.linalg.eig(M)
    cond = float(np.linalg.cond(V)) if M.size else 1.0
    try:
        sla.schur(M, output="complex")
        schur_ok = True
    except (np.linalg.LinAlgError, ValueError):
        schur_ok = False
    rho = float(np.max(np.abs(w))) if w.size else 0.0
    return SpectralData(w, rho, bool(np.isfinite(cond) and cond <= cond_threshold),
                        schur_ok, cond)


def spectral_radius(M):
    M = as_matrix(M, square=True)
    if M.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(M))))


# ---------------------------------------------------------------------------
# scalar function descriptors for the holomorphic functional calculus


class ScalarFunction:
    """Base class: elementwise evaluation, branch check and a Schur-based path."""

    def __call__(self, z):
        raise NotImplementedError

    def check_spectrum(self, eigs, tol):
        pass

    def schur_eval(self, M):
        raise NotImplementedError


def _on_negative_axis(eigs, tol):
    eigs = np.asarray(eigs)
    return (eigs.real <= tol) & (np.abs(eigs.imag) <= tol)


@dataclass(frozen=True)
class Power(ScalarFunction):
    """Principal power ``z**exponent``; integer exponents have no branch cut."""
    exponent: float

    @property
    def is_integer(self):
        return float(self.exponent).is_integer()

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if self.is_integer:
            return z ** int(self.exponent)
        return np.exp(self.exponent * np.log(np.where(z == 0, 1.0, z))) * (z != 0)

    def check_spectrum(self, eigs, tol):
        if self.is_integer:
            if self.exponent < 0 and np.any(np.abs(eigs) <= tol):
                raise BranchCutViolation("negative integer power of a singular matrix")
            return
        bad = _on_negative_axis(eigs, tol)
        if np.any(bad):
            raise BranchCutViolation(
                f"eigenvalue {np.asarray(eigs)[bad][0]:.3g} on the cut (-inf, 0] "
                f"of z**{self.exponent}")

    def schur_eval(self, M):
        if self.is_integer:
            return np.linalg.matrix_power(M, int(self.exponent))
        return sla.fractional_matrix_power(M, self.exponent)


@dataclass(frozen=True)
class Exp(ScalarFunction):
    def __call__(self, z):
        return np.exp(np.asarray(z, dtype=complex))

    def schur_eval(self, M):
        return sla.expm(M)


@dataclass(frozen=True)
class Log(ScalarFunction):
    """Principal logarithm, cut along ``(-inf, 0]``."""

    def __call__(self, z):
        return np.log(np.asarray(z, dtype=complex))

    def check_spectrum(self, eigs, tol):
        bad = _on_negative_axis(eigs, tol)
        if np.any(bad):
            raise BranchCutViolation(
                f"eigenvalue {np.asarray(eigs)[bad][0]:.3g} on the cut of log")

    def schur_eval(self, M):
        return sla.logm(M)


@dataclass(frozen=True)
class Mobius(ScalarFunction):
    """``(a z + b) / (c z + d)``; evaluated as a rational function, never via eigenvectors."""
    a: complex
    b: complex
    c: complex
    d: complex

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return (self.a * z + self.b) / (self.c * z + self.d)

    def check_spectrum(self, eigs, tol):
        if self.c != 0:
            pole = -self.d / self.c
            if np.any(np.abs(np.asarray(eigs) - pole) <= tol):
                raise BranchCutViolation(f"eigenvalue at the pole {pole:.3g}")

    def schur_eval(self, M):
        eye = np.eye(M.shape[0])
        return np.linalg.solve((self.c * M + self.d * eye).T,
                               (self.a * M + self.b * eye).T).T


def matrix_function(M, f, cut_tol=1e-12, cond_threshold=EIG_COND_THRESHOLD):
    """Evaluate ``f(M)`` for a :class:`ScalarFunction` descriptor.

    The eigendecomposition path is used when the eigenvector matrix is
    well conditioned; otherwise the descriptor's Schur-based routine is
    used and the switch is logged.  Eigenvalues within
    ``cut_tol * max(1, ||M||)`` of a branch cut or pole raise
    :class:`BranchCutViolation`.
    """
    M = as_matrix(M, square=True)
    n = M.shape[0]
    if n == 0:
        return M.copy()
    w, V = np.linalg.eig(M)
    f.check_spectrum(w, cut_tol * max(1.0, op_norm(M)))
    if isinstance(f, Mobius) or (isinstance(f, Power) and f.is_integer):
        return np.asarray(f.schur_eval(M), dtype=complex)
    cond = np.linalg.cond(V)
    if np.isfinite(cond) and cond <= cond_threshold:
        fw = f(w)
        return np.linalg.solve(V.T, (V * fw).T).T
    logger.info("eigenbasis condition %.3e above %.1e; using Schur path for %r",
                cond, cond_threshold, f)
    return np.asarray(f.schur_eval(M), dtype=complex)


# ---------------------------------------------------------------------------
# binomial series (1 - x)^(-(1+beta)) = sum_n C(n+beta, n) x^n


def binomial_coeffs(beta, nterms):
    """``C(n+beta, n)`` for ``n < nterms`` via ``C_n = C_{n-1} (n+beta)/n``."""
    out = np.empty(nterms)
    if nterms == 0:
        return out
    out[0] = 1.0
    if nterms > 1:
        n = np.arange(1, nterms)
        out[1:] = np.cumprod((n + beta) / n)
    return out


def _log_binomial_coeffs(beta, nterms):
    n = np.arange(1, nterms)
    return np.concatenate([[0.0], np.cumsum(np.log((n + beta) / n))])


def binomial_tail_terms(beta, q, tol, scale=1.0, max_terms=MAX_SERIES_TERMS):
    """Smallest ``N`` with ``scale * sum_{n >= N} C(n+beta, n) q^n <= tol``.

    Returns ``(N, bound)``.  The bound uses the ratio of consecutive
    terms, ``q (n+1+beta)/(n+1)``, which is monotone in ``n``: its
    supremum over ``n >= N`` is ``q * max(1, (N+1+beta)/(N+1))``.
    """
    if not 0 <= q < 1:
        raise DivergentSeriesError(f"series ratio {q} is not below 1")
    if q == 0 or scale == 0:
        return 1, 0.0
    logq = math.log(q)
    chunk = 4096
    start = 0
    while start < max_terms:
        stop = min(start + chunk, max_terms)
        N = np.arange(start, stop)
        logc = _log_binomial_coeffs(beta, stop)[start:stop]
        rho = q * np.maximum(1.0, (N + 1 + beta) / (N + 1))
        with np.errstate(divide="ignore", invalid="ignore"):
            bound = scale * np.exp(logc + N * logq) / (1.0 - rho)
        bound = np.where(rho < 1, bound, np.inf)
        ok = np.nonzero((bound <= tol) & (N >= 1))[0]
        if ok.size:
            i = ok[0]
            return int(N[i]), float(bound[i])
        start = stop
        chunk *= 2
    raise ToleranceNotReached(max_terms, float(bound[-1]), tol)


def power_decay(X, max_power=64):
    """Constants ``(K0, q)`` with ``||X^n|| <= K0 q^n`` for all ``n`` and ``q < 1``.

    Uses ``q = ||X^p||^(1/p)`` for the best ``p <= max_power`` with
    ``||X^p|| < 1``; raises :class:`DivergentSeriesError` if none exists.
    """
    X = np.asarray(X)
    n = X.shape[0]
    norms = [1.0]
    P = np.eye(n, dtype=complex)
    for _ in range(max_power):
        P = P @ X
        norms.append(op_norm(P))
    norms = np.array(norms)
    best = None
    for p in range(1, max_power + 1):
        if norms[p] < 1:
            q = norms[p] ** (1.0 / p)
            if best is None or q < best[1]:
                best = (p, q)
    if best is None:
        raise DivergentSeriesError("no power of the matrix is a strict contraction")
    p, q = best
    if q == 0:
        return 1.0, 0.0
    K0 = max(norms[j] / q ** j for j in range(p))
    return float(max(K0, 1.0)), float(q)


class SeriesResult(NamedTuple):
    value: np.ndarray
    terms: int
    tail_bound: float


def _resolvent_decay(T, z):
    """Decay constants for powers of ``conj(z) T``."""
    nT = op_norm(T)
    q = abs(z) * nT
    if q < 1:
        return 1.0, q
    if spectral_radius(T) * abs(z) >= 1:
        raise DivergentSeriesError(
            f"|z| * ||T|| = {q:.4g} >= 1 and |z| * rho(T) >= 1")
    return power_decay(np.conj(z) * T)


def resolvent_series(T, z, beta, tol=DEFAULT_SERIES_TOL, terms=None,
                     max_terms=MAX_SERIES_TERMS, backend=None):
    """Binomial series for ``(I - conj(z) T)^(-(1+beta))`` with its tail bound.

    ``terms`` fixes the truncation instead of choosing it from ``tol``;
    the returned ``tail_bound`` bounds the operator norm of the omitted
    part in either case.
    """
    T = as_matrix(T, "T", square=True)
    z = complex(z)
    if beta <= -1:
        raise ValueError("beta must exceed -1")
    if abs(z) >= 1:
        raise DivergentSeriesError("|z| must be < 1")
    n = T.shape[0]
    if z == 0:
        return SeriesResult(np.eye(n, dtype=complex), 1, 0.0)
    K0, q = _resolvent_decay(T, z)
    if terms is None:
        terms, bound = binomial_tail_terms(beta, q, tol, K0, max_terms)
    else:
        bound = _binomial_tail_at(beta, q, terms) * K0
    coeffs = binomial_coeffs(beta, terms)
    value = kernels.power_series(np.conj(z) * T, coeffs, backend=backend)
    return SeriesResult(value, int(terms), float(bound))


def _binomial_tail_at(beta, q, N):
    if q == 0:
        return 0.0
    rho = q * max(1.0, (N + 1 + beta) / (N + 1))
    if rho >= 1:
        return math.inf
    logc = _log_binomial_coeffs(beta, N + 1)[N]
    return math.exp(logc + N * math.log(q)) / (1 - rho)


def frac_resolvent_power(T, z, beta, tol=DEFAULT_SERIES_TOL, backend=None):
    """``(I - conj(z) T)^(-(1+beta))`` by the binomial series.

    Valid for ``|z| < 1`` whenever ``|z| ||T|| < 1`` or
    ``|z| rho(T) < 1``; no diagonalizability is assumed.  Use
    :func:`frac_resolvent_power_calculus` for the functional-calculus
    evaluation of the same quantity.
    """
    return resolvent_series(T, z, beta, tol, backend=backend).value


def frac_resolvent_power_calculus(T, z, beta):
    """Same quantity through :func:`matrix_function` (principal power)."""
    T = as_matrix(T, "T", square=True)
    R = np.eye(T.shape[0]) - np.conj(complex(z)) * T
    return matrix_function(R, Power(-(1.0 + beta)))


def frac_resolvent_power_grid(T, zs, beta, tol=DEFAULT_SERIES_TOL, backend=None):
    """Stacked :func:`frac_resolvent_power` over many points sharing ``T``.

    Returns ``(values, terms, tail_bounds)`` with ``values[p]`` the
    resolvent power at ``zs[p]``.
    """
    T = as_matrix(T, "T", square=True)
    zs = np.asarray(zs, dtype=complex).ravel()
    if np.any(np.abs(zs) >= 1):
        raise DivergentSeriesError("grid points must lie in the open unit disc")
    nT = op_norm(T)
    radii = np.abs(zs)
    terms = np.ones(len(zs), dtype=np.intp)
    bounds = np.zeros(len(zs))
    cache = {}
    for p, r in enumerate(radii):
        if r == 0:
            continue
        key = float(r)
        if key not in cache:
            if r * nT < 1:
                K0, q = 1.0, r * nT
            else:
                K0, q = _resolvent_decay(T, r)
            cache[key] = binomial_tail_terms(beta, q, tol, K0)
        terms[p], bounds[p] = cache[key]
    coeffs = binomial_coeffs(beta, int(terms.max()) if len(zs) else 0)
    values = kernels.power_series_grid(T, np.conj(zs), coeffs, terms, backend=backend)
    return values, terms, bounds

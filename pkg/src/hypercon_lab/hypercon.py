"""n- and gamma-hypercontractivity.

For a contraction ``T`` write ``M_T(X) = T^* X T``.  ``T`` is a
gamma-hypercontraction when ``(1 - M_{rT})^gamma (I) >= 0`` for every
``0 < r < 1``.  The defect ``(1 - M_{rT})^gamma (I)`` is computed two
independent ways: by the generalized binomial series
``sum_k (-1)^k C(gamma, k) r^{2k} T^{*k} T^k`` and by the functional
calculus applied to the ``N^2 x N^2`` matrix of ``X -> X - r^2 T^* X T``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import kernels
from ._parallel import pmap
from .errors import (DimensionGuard, NotAContraction, NotStrictContraction,
                     ToleranceNotReached)
from .operator_core import (PositivityReport, Power, SeriesResult, as_matrix,
                            is_psd, matrix_function, op_norm)

DEFAULT_R_GRID = (0.5, 0.9, 0.99, 0.999)
SERIES_TOL = 1e-13
SUPEROP_MAX_DIM = 32
_EPS = np.finfo(float).eps


def binomial_defect(T, m):
    """``sum_{k=0}^m (-1)^k C(m, k) T^{*k} T^k`` (exact finite sum)."""
    T = as_matrix(T, "T", square=True)
    m = int(m)
    if m < 0:
        raise ValueError("m must be non-negative")
    coeffs = [(-1) ** k * math.comb(m, k) for k in range(m + 1)]
    return kernels.congruence_series(T, np.eye(T.shape[0]), coeffs)


class NHyperconResult(NamedTuple):
    passes: bool
    reports: list


def is_n_hypercontraction(T, n, tol=None):
    """Check every binomial defect for ``1 <= m <= n``; all reports are kept."""
    T = as_matrix(T, "T", square=True)
    reports = []
    for m in range(1, int(n) + 1):
        D = binomial_defect(T, m)
        t = tol
        if t is None:
            # rounding in the alternating sum scales with sum_k C(m,k) ||T||^{2k}
            t = 1e-10 * (1 + op_norm(D)) + 64 * _EPS * (1 + op_norm(T) ** 2) ** m
        reports.append(is_psd(D, t))
    return NHyperconResult(all(r.is_psd for r in reports), reports)


def gamma_binomial_coeffs(gamma, nterms):
    """``(-1)^k C(gamma, k)`` for ``k < nterms``."""
    out = np.empty(nterms)
    if nterms == 0:
        return out
    out[0] = 1.0
    for k in range(1, nterms):
        out[k] = -out[k - 1] * (gamma - k + 1) / k
    return out


def _gamma_series_terms(gamma, s, tol, max_terms=1_000_000):
    """Truncation for ``sum_k |C(gamma,k)| s^k`` with tail below ``tol``.

    For ``k >= (gamma - 1)/2`` the ratio ``|gamma - k|/(k+1)`` is at most 1,
    so the tail after index ``K`` is at most ``|t_{K+1}| / (1 - s)``.
    """
    if float(gamma).is_integer():
        return int(gamma) + 1, 0.0
    if s == 0:
        return 1, 0.0
    kmin = max(1, math.ceil((gamma - 1) / 2))
    logs = math.log(s)
    logc = 0.0  # log |C(gamma, k)|
    for k in range(1, max_terms):
        logc += math.log(abs(gamma - k + 1) / k)
        if k >= kmin:
            bound = math.exp(logc + k * logs) / (1 - s)
            if bound <= tol:
                return k, bound
    raise ToleranceNotReached(max_terms, bound, tol)


def _gamma_series(T, gamma, r, tol):
    T = as_matrix(T, "T", square=True)
    if gamma < 1:
        raise ValueError("gamma must be >= 1")
    if not 0 < r < 1:
        raise ValueError("r must lie in (0, 1)")
    nT = op_norm(T)
    if nT > 1 + tol:
        raise NotAContraction(f"||T|| = {nT:.6g} > 1")
    s = r * r * nT * nT
    K, bound = _gamma_series_terms(gamma, s, tol)
    coeffs = gamma_binomial_coeffs(gamma, K) * (r * r) ** np.arange(K)
    value = kernels.congruence_series(T, np.eye(T.shape[0]), coeffs)
    return SeriesResult(value, K, bound), float(np.abs(coeffs).sum())


def gamma_defect_series(T, gamma, r, tol=SERIES_TOL):
    """``(1 - M_{rT})^gamma (I)`` by the generalized binomial series."""
    return _gamma_series(T, gamma, r, tol)[0].value


def superoperator_matrix(T, r):
    """Matrix of ``X -> X - r^2 T^* X T`` acting on row-major ``vec(X)``."""
    T = as_matrix(T, "T", square=True)
    n = T.shape[0]
    # vec(A X B) = (A kron B^T) vec(X) for row-major vec
    return np.eye(n * n) - r * r * np.kron(T.conj().T, T.T)


def gamma_defect_superop(T, gamma, r, max_dim=SUPEROP_MAX_DIM):
    """``(1 - M_{rT})^gamma (I)`` through the functional calculus on ``L(H)``."""
    T = as_matrix(T, "T", square=True)
    n = T.shape[0]
    if n > max_dim:
        raise DimensionGuard(f"superoperator path limited to N <= {max_dim}, got {n}")
    if not 0 < r < 1:
        raise ValueError("r must lie in (0, 1)")
    L = superoperator_matrix(T, r)
    out = matrix_function(L, Power(gamma)) @ np.eye(n).ravel()
    return out.reshape(n, n)


@dataclass(frozen=True)
class HyperconVerdict:
    gamma: float
    r_grid: tuple
    worst_min_eigenvalue: float
    worst_r: float
    passes: bool
    method: str
    reports: tuple = ()


def _defect_report(T, gamma, r, method, tol):
    if method == "binomial_series":
        res, mass = _gamma_series(T, gamma, r, SERIES_TOL)
        D, tail = res.value, res.tail_bound
    elif method == "superoperator_calculus":
        D = gamma_defect_superop(T, gamma, r)
        tail = 0.0
        mass = (1 + r * r * op_norm(T) ** 2) ** gamma
    else:
        raise ValueError(f"unknown method {method!r}")
    if tol is None:
        tol = 1e-10 * op_norm(T) ** 2 + 64 * _EPS * mass * max(1, T.shape[0])
    return is_psd(D, tail + tol)


def gamma_verdict(T, gamma, r_grid=DEFAULT_R_GRID, tol=None, method="binomial_series"):
    """Test ``(1 - M_{rT})^gamma (I) >= 0`` on a grid of ``r``.

    The worst point is reported; ties resolve to the first grid point in
    the given order.
    """
    T = as_matrix(T, "T", square=True)
    r_grid = tuple(float(r) for r in r_grid)
    reports = pmap(lambda r: _defect_report(T, gamma, r, method, tol), r_grid)
    i = int(np.argmin([rep.min_eigenvalue for rep in reports]))
    return HyperconVerdict(float(gamma), r_grid, reports[i].min_eigenvalue, r_grid[i],
                           all(rep.is_psd for rep in reports), method, tuple(reports))


@dataclass(frozen=True)
class GammaThreshold:
    gamma_star: float
    bracket_width: float
    capped: bool
    iterations: int = 0


def gamma_threshold(T, gamma_max=8.0, bracket_tol=1e-6, r_grid=DEFAULT_R_GRID,
                    max_iter=40, method="binomial_series"):
    """Bisection for the largest gamma in ``[1, gamma_max]`` that passes.

    Requires ``||T|| < 1``.  When ``gamma_max`` already passes the result
    is ``capped``.  Otherwise ``gamma_star`` passes and
    ``gamma_star + bracket_width`` fails.
    """
    T = as_matrix(T, "T", square=True)
    nT = op_norm(T)
    if nT >= 1:
        raise NotStrictContraction(f"||T|| = {nT:.6g} is not < 1")

    def passes(g):
        return gamma_verdict(T, g, r_grid, method=method).passes

    if passes(gamma_max):
        return GammaThreshold(float(gamma_max), float(bracket_tol), True, 0)
    lo, hi = 1.0, float(gamma_max)
    it = 0
    while hi - lo > bracket_tol and it < max_iter:
        mid = 0.5 * (lo + hi)
        if passes(mid):
            lo = mid
        else:
            hi = mid
        it += 1
    return GammaThreshold(lo, hi - lo, False, it)

"""Discrete-time weighted admissibility.

For ``x_{n+1} = T x_n + E u_{n+1}``, ``y_n = F x_n`` the observation
operator ``F`` is beta-admissible when
``sum_n (1+n)^beta ||F T^n x||^2 <= M ||x||^2``.  The best ``M`` is the
norm of the weighted Gramian ``G_beta = sum_n (1+n)^beta T^{*n} F^* F T^n``.
The frequency-domain counterpart is the resolvent quantity
``(1-|z|^2)^((1+beta)/2) ||F (I - conj(z) T)^(-(1+beta))||`` over the disc.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple, Optional

import numpy as np

from . import kernels
from ._parallel import pmap
from .errors import (DimensionMismatchError, DivergentSeriesError,
                     MissingControlOperator, PreconditionError, ToleranceNotReached)
from .hypercon import gamma_threshold, gamma_verdict
from .operator_core import (adjoint, as_matrix, binomial_coeffs,
                            frac_resolvent_power_grid, op_norm, power_decay,
                            spectral_radius)

DEFAULT_GRAMIAN_TOL = 1e-12
MAX_GRAMIAN_TERMS = 2_000_000


@dataclass(frozen=True, eq=False)
class DiscreteSystem:
    T: np.ndarray
    F: np.ndarray
    E: Optional[np.ndarray] = None

    def __post_init__(self):
        T = as_matrix(self.T, "T", square=True)
        F = as_matrix(self.F, "F")
        if F.shape[1] != T.shape[0]:
            raise DimensionMismatchError(f"F has {F.shape[1]} columns, state dim is {T.shape[0]}")
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "F", F)
        if self.E is not None:
            E = as_matrix(self.E, "E")
            if E.shape[0] != T.shape[0]:
                raise DimensionMismatchError(f"E has {E.shape[0]} rows, state dim is {T.shape[0]}")
            object.__setattr__(self, "E", E)

    def scaled(self, r):
        return DiscreteSystem(r * self.T, self.F, self.E)


@dataclass(frozen=True)
class AdmissibilityReport:
    beta: float
    constant: float
    terms_used: int
    tail_bound: float
    converged: bool


@dataclass(frozen=True)
class ResolventScan:
    beta: float
    sup_value: float
    argmax_z: complex
    grid_description: dict = field(default_factory=dict)


def _weighted_tail(beta, q2, scale, N):
    """Bound on ``scale * sum_{n >= N} (1+n)^beta q2^n``."""
    if q2 == 0 or scale == 0:
        return 0.0
    rho = q2 * max(1.0, ((N + 2.0) / (N + 1.0)) ** beta)
    if rho >= 1:
        return math.inf
    return scale * (1.0 + N) ** beta * q2 ** N / (1 - rho)


def _gramian_terms(beta, q2, scale, tol, max_terms):
    if q2 == 0 or scale == 0:
        return 1, 0.0
    N = np.arange(1, max_terms + 1, dtype=float)
    start = 0
    chunk = 4096
    while start < max_terms:
        n = N[start:start + chunk]
        rho = q2 * np.maximum(1.0, ((n + 2) / (n + 1)) ** beta)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            logb = math.log(scale) + beta * np.log1p(n) + n * math.log(q2) - np.log1p(-np.minimum(rho, 1))
        ok = np.nonzero((rho < 1) & (logb <= math.log(tol)))[0]
        if ok.size:
            Nf = int(n[ok[0]])
            return Nf, _weighted_tail(beta, q2, scale, Nf)
        start += chunk
        chunk *= 2
    raise ToleranceNotReached(max_terms, _weighted_tail(beta, q2, scale, max_terms), tol)


def weighted_gramian(T, Y0, beta, tol=DEFAULT_GRAMIAN_TOL, terms=None,
                     max_terms=MAX_GRAMIAN_TERMS):
    """``sum_n (1+n)^beta T^{*n} Y0 T^n`` with truncation and tail bound.

    Returns ``(G, terms, tail_bound)``.  Requires ``rho(T) < 1``.
    """
    T = as_matrix(T, "T", square=True)
    if T.size and spectral_radius(T) >= 1:
        raise DivergentSeriesError("spectral radius >= 1: weighted Gramian series diverges")
    nT = op_norm(T)
    K0, q = (1.0, nT) if nT < 1 else power_decay(T)
    scale = op_norm(Y0) * K0 * K0
    if terms is None:
        terms, bound = _gramian_terms(beta, q * q, scale, tol, max_terms)
    else:
        terms = int(terms)
        bound = _weighted_tail(beta, q * q, scale, terms)
    coeffs = (1.0 + np.arange(terms)) ** beta
    G = kernels.congruence_series(T, Y0, coeffs)
    return G, terms, bound


def _top_eig(G):
    H = (G + adjoint(G)) / 2
    return float(np.linalg.eigvalsh(H)[-1]) if H.size else 0.0


def obs_gramian(sys, beta, tol=DEFAULT_GRAMIAN_TOL, terms=None):
    """Weighted observability Gramian and the admissibility constant ``||G||^(1/2)``."""
    if beta <= -1:
        raise ValueError("beta must exceed -1")
    F = sys.F
    G, n, bound = weighted_gramian(sys.T, adjoint(F) @ F, beta, tol, terms)
    const = math.sqrt(max(_top_eig(G), 0.0))
    return G, AdmissibilityReport(float(beta), const, n, bound, bound <= tol)


def control_admissibility(sys, beta, tol=DEFAULT_GRAMIAN_TOL, terms=None):
    """Control constant of ``E`` at weight ``beta``, computed as the
    observation constant of ``(T^*, E^*)`` at weight ``-beta``."""
    if sys.E is None:
        raise MissingControlOperator("system has no control operator E")
    dual = DiscreteSystem(adjoint(sys.T), adjoint(sys.E))
    _, rep = obs_gramian(dual, -beta, tol, terms)
    return rep


def control_constant_direct(sys, beta, terms):
    """Norm of ``u -> sum_{n < terms} T^n E u_n`` from ``l^2_beta`` into the state space.

    In the orthonormal basis ``e_n / (1+n)^(beta/2)`` of ``l^2_beta`` the
    operator is the block row ``[(1+n)^(-beta/2) T^n E]``.
    """
    if sys.E is None:
        raise MissingControlOperator("system has no control operator E")
    blocks = []
    P = sys.E.copy()
    for n in range(int(terms)):
        blocks.append((1.0 + n) ** (-beta / 2) * P)
        P = sys.T @ P
    return float(np.linalg.norm(np.hstack(blocks), 2))


def default_disc_grid(n_radii=32, n_angles=64, r_cap=0.999):
    """Radii ``r_cap sin(pi k / (2 (n_radii-1)))`` (clustered toward the
    circle) times equispaced angles; ``z = 0`` appears once."""
    k = np.arange(1, n_radii)
    radii = r_cap * np.sin(np.pi * k / (2 * (n_radii - 1)))
    theta = 2 * np.pi * np.arange(n_angles) / n_angles
    pts = (radii[:, None] * np.exp(1j * theta)[None, :]).ravel()
    return np.concatenate([[0j], pts])


def resolvent_values(T, F, beta, grid, tol=1e-12):
    """``(1-|z|^2)^((1+beta)/2) ||F (I - conj(z) T)^(-(1+beta))||`` at each grid point."""
    R, _, _ = frac_resolvent_power_grid(T, grid, beta, tol)
    norms = np.linalg.norm(F[None, :, :] @ R, ord=2, axis=(1, 2))
    return (1 - np.abs(grid) ** 2) ** ((1 + beta) / 2) * norms


def resolvent_sup(sys, beta, grid=None, tol=1e-12, operator="observation"):
    """Supremum of the resolvent quantity over a disc grid.

    ``operator="control"`` uses ``||(I - conj(z) T)^(-(1+beta)) E||`` instead.
    """
    if grid is None:
        grid = default_disc_grid()
        desc = {"kind": "default", "n_radii": 32, "n_angles": 64, "r_cap": 0.999}
    else:
        grid = np.asarray(grid, dtype=complex).ravel()
        desc = {"kind": "custom", "size": int(grid.size),
                "r_max": float(np.max(np.abs(grid))) if grid.size else 0.0}
    if operator == "observation":
        vals = resolvent_values(sys.T, sys.F, beta, grid, tol)
    elif operator == "control":
        if sys.E is None:
            raise MissingControlOperator("system has no control operator E")
        # ||R E|| = ||E^* R^*|| and R(z)^* = (I - z T^*)^(-(1+beta))
        vals = resolvent_values(adjoint(sys.T), adjoint(sys.E), beta, np.conj(grid), tol)
    else:
        raise ValueError(f"unknown operator {operator!r}")
    i = int(np.argmax(vals))
    return ResolventScan(float(beta), float(vals[i]), complex(grid[i]), desc)


# ---------------------------------------------------------------------------
# lower bound: resolvent_sup <= c(beta) * admissibility constant


def _testing_profile(beta, x):
    """``(1-x)^(1+beta) sum_n C(n+beta,n)^2 (1+n)^(-beta) x^n``."""
    nmax = int(np.ceil(40.0 / (1 - x.max()))) + 16
    a = binomial_coeffs(beta, nmax) ** 2 * (1.0 + np.arange(nmax)) ** (-beta)
    out = np.empty_like(x)
    for i, xi in enumerate(x):
        # x^n < e^-40 beyond this point
        m = min(nmax, int(np.ceil(40.0 / (1 - xi))) + 16)
        out[i] = (1 - xi) ** (1 + beta) * np.dot(a[:m], xi ** np.arange(m))
    return out


@lru_cache(maxsize=None)
def testing_constant(beta):
    """``c(beta)`` with ``sup_z (1-|z|^2)^((1+beta)/2) ||F R_z|| <= c(beta) ||G_beta||^(1/2)``.

    Cauchy-Schwarz on ``F R_z x = sum_n C(n+beta,n) conj(z)^n F T^n x``
    against the weights ``(1+n)^beta`` gives
    ``c(beta)^2 = sup_{0<=x<1} (1-x)^(1+beta) sum_n C(n+beta,n)^2 (1+n)^(-beta) x^n``,
    whose limit at ``x -> 1`` is ``1/Gamma(1+beta)``.  The supremum is
    taken over a grid in ``[0, 1 - 1e-4]`` together with that limit.
    """
    beta = float(beta)
    x = np.concatenate([np.linspace(0, 0.99, 100), 1 - np.logspace(-2, -4, 30)])
    prof = _testing_profile(beta, x)
    return math.sqrt(max(float(prof.max()), 1.0 / math.gamma(1.0 + beta)))


#: c(beta) frozen for the weights used by the experiments
TESTING_CONSTANTS = {0.5: 1.0622519320271968, 1.0: 1.0, 1.5: 1.0, 2.0: 1.0}


def lower_bound_constant(beta):
    beta = float(beta)
    return TESTING_CONSTANTS[beta] if beta in TESTING_CONSTANTS else testing_constant(beta)


# ---------------------------------------------------------------------------


class WeissRow(NamedTuple):
    r: float
    adm_constant: float
    resolvent_sup: float
    ratio: float


def adjoint_hypercontractive(T, gamma=2.0):
    """Does ``T^*`` pass a gamma-hypercontractivity check for some gamma > 1?

    For ``||T|| < 1`` every strict contraction qualifies; the threshold
    search confirms ``gamma_star > 1``.  Otherwise the verdict at ``gamma``
    is used.
    """
    TH = adjoint(as_matrix(T, "T", square=True))
    if op_norm(TH) < 1:
        return gamma_threshold(TH, gamma_max=gamma, bracket_tol=1e-3).gamma_star > 1
    return gamma_verdict(TH, gamma).passes


def weiss_ratio(sys, beta, r_list=(0.9, 0.99, 0.999), grid=None, check_gamma=2.0,
                waive_hypercontractivity=False, tol=DEFAULT_GRAMIAN_TOL):
    """Admissibility constant vs resolvent supremum for ``r T`` over ``r_list``.

    ``ratio = adm_constant / resolvent_sup`` (``0/0 -> 1``).
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    if not waive_hypercontractivity and not adjoint_hypercontractive(sys.T, check_gamma):
        raise PreconditionError("T^* fails the gamma-hypercontractivity check; "
                                "pass waive_hypercontractivity=True to explore anyway")

    def row(r):
        s = sys.scaled(r)
        _, rep = obs_gramian(s, beta, tol)
        scan = resolvent_sup(s, beta, grid)
        a, b = rep.constant, scan.sup_value
        ratio = 1.0 if a == 0 and b == 0 else a / b
        return WeissRow(float(r), a, b, ratio)

    return pmap(row, list(r_list))

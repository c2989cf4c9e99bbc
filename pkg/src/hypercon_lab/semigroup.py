"""Continuous-time side: matrix semigroups ``e^{tA}``, cogenerators,
weighted admissibility by quadrature, the half-plane resolvent condition,
the 2-hypercontractive semigroup tests and the Cayley bridge to
discrete time.

Weighted observability Gramian::

    Q_beta = int_0^inf t^beta e^{tA*} C* C e^{tA} dt,

so the admissibility constant is ``||Q_beta||^(1/2)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg as sla
from scipy.special import gammainccinv, gammaincc, roots_jacobi, roots_legendre

from ._parallel import pmap
from .adm_discrete import (DiscreteSystem, ResolventScan, adjoint_hypercontractive,
                           lower_bound_constant, obs_gramian, resolvent_sup)
from .errors import (BranchCutViolation, DimensionMismatchError, MissingControlOperator,
                     NotExponentiallyStable, NumericOverflow, PreconditionError,
                     SingularCayley, ToleranceNotReached)
from .operator_core import (EIG_COND_THRESHOLD, Power, adjoint, as_matrix,
                            matrix_function, op_norm)

SINGULAR_COND = 1e12
QUAD_NODES = 16
#: panel width cap in units of ``1/||A||``
PANEL_SCALE = 8.0
MAX_PANELS = 200_000
DEFAULT_T_GRID = tuple(np.logspace(-3, 1, 32))
BORDERLINE_BAND = 1e-8
CONVEXITY_COND = 1e3


@dataclass(frozen=True, eq=False)
class ContinuousSystem:
    """Generator ``A``, observation ``C`` and optional control ``B``."""
    A: np.ndarray
    C: np.ndarray
    B: Optional[np.ndarray] = None

    def __post_init__(self):
        A = as_matrix(self.A, "A", square=True)
        C = as_matrix(self.C, "C")
        if C.shape[1] != A.shape[0]:
            raise DimensionMismatchError(f"C has {C.shape[1]} columns, state dim is {A.shape[0]}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "C", C)
        if self.B is not None:
            B = as_matrix(self.B, "B")
            if B.shape[0] != A.shape[0]:
                raise DimensionMismatchError(f"B has {B.shape[0]} rows, state dim is {A.shape[0]}")
            object.__setattr__(self, "B", B)

    @property
    def dissipation(self):
        """``lambda_max((A + A*)/2)``; non-positive for a contraction semigroup."""
        return dissipation(self.A)

    def is_dissipative(self, tol=1e-12):
        return self.dissipation <= tol * max(1.0, op_norm(self.A))

    def dual(self):
        """``(A*, B*)`` as an observed system (requires ``B``)."""
        if self.B is None:
            raise MissingControlOperator("system has no control operator B")
        return ContinuousSystem(adjoint(self.A), adjoint(self.B))


@dataclass(frozen=True)
class ContAdmReport:
    beta: float
    constant: float
    quadrature_error_estimate: float
    tail_bound: float
    t_max: float = 0.0
    panels: int = 0


@dataclass(frozen=True, eq=False)
class BridgePair:
    T_cog: np.ndarray
    F_bridge: np.ndarray
    beta: float


def dissipation(A):
    A = as_matrix(A, "A", square=True)
    return float(np.linalg.eigvalsh((A + adjoint(A)) / 2)[-1]) if A.size else -math.inf


def spectral_abscissa(A):
    return float(np.max(np.linalg.eigvals(A).real)) if np.size(A) else -math.inf


def semigroup_at(A, t):
    """``e^{tA}`` (scaling and squaring with Pade)."""
    A = as_matrix(A, "A", square=True)
    if t < 0:
        raise ValueError("t must be non-negative")
    if t == 0:
        return np.eye(A.shape[0], dtype=complex)
    with np.errstate(over="raise", invalid="raise"):
        try:
            E = sla.expm(t * A)
        except FloatingPointError as exc:
            raise NumericOverflow(f"overflow in exp(tA) at t = {t}") from exc
    if not np.all(np.isfinite(E)):
        raise NumericOverflow(f"exp(tA) is not finite at t = {t}")
    return np.asarray(E, dtype=complex)


def _increment(A, t):
    """``e^{tA} - I`` without cancellation, as ``tA phi_1(tA)``."""
    n = A.shape[0]
    Z = np.zeros((2 * n, 2 * n), dtype=complex)
    Z[:n, :n] = t * A
    Z[:n, n:] = t * A
    return sla.expm(Z)[:n, n:]


def cogenerator(A, convention="sec2"):
    """Cayley transform of ``A``.

    ``sec2``: ``(A + I)(A - I)^{-1}``; ``prop43``: ``(I + A)(I - A)^{-1}``.
    The two differ by a global sign.
    """
    A = as_matrix(A, "A", square=True)
    I = np.eye(A.shape[0])
    if convention == "sec2":
        D = A - I
    elif convention == "prop43":
        D = I - A
    else:
        raise ValueError(f"unknown convention {convention!r}")
    if D.size and np.linalg.cond(D) > SINGULAR_COND:
        raise SingularCayley("1 is (numerically) an eigenvalue of A")
    # X D = (A + I)  <=>  D^T X^T = (A + I)^T
    return np.linalg.solve(D.T, (A + I).T).T


def _cogenerator_increment(A, convention="sec2"):
    """``T - I`` for the cogenerator, i.e. ``2 (A - I)^{-1}`` (sec2)."""
    T = cogenerator(A, convention)  # singularity check
    I = np.eye(A.shape[0])
    if convention == "sec2":
        return 2 * np.linalg.inv(A - I)
    return T - I


# ---------------------------------------------------------------------------
# decay bounds and quadrature


def _decay_candidates(A):
    """Pairs ``(kappa, delta)`` with ``||e^{tA}|| <= kappa e^{-delta t}``."""
    out = []
    w = dissipation(A)
    if w < 0:
        out.append((1.0, -w))
    if spectral_abscissa(A) < 0:
        n = A.shape[0]
        P = sla.solve_continuous_lyapunov(adjoint(A), -np.eye(n))
        ev = np.linalg.eigvalsh((P + adjoint(P)) / 2)
        if ev[0] > 0:
            out.append((math.sqrt(ev[-1] / ev[0]), 1.0 / (2 * ev[-1])))
    return out


def decay_bound(A, beta=0.0, tol=1e-12):
    """Decay pair valid for both ``A`` and ``A*`` (so dual computations
    share their quadrature nodes), chosen to minimise the horizon."""
    A = as_matrix(A, "A", square=True)
    if A.size and spectral_abscissa(A) >= 0:
        raise NotExponentiallyStable(f"spectral abscissa {spectral_abscissa(A):.3g} >= 0")
    if not A.size:
        return 1.0, 1.0
    ca, cb = _decay_candidates(A), _decay_candidates(adjoint(A))
    pairs = [(max(k1, k2), min(d1, d2)) for k1, d1 in ca for k2, d2 in cb]
    if not pairs:
        raise NotExponentiallyStable("no decay certificate")
    return min(pairs, key=lambda p: _horizon(p[1], beta, tol))


def _horizon(delta, beta, tol):
    return float(gammainccinv(1.0 + beta, tol)) / (2 * delta)


def _tree_sum(X):
    """Pairwise reduction along axis 0 (fixed order, independent of threading)."""
    X = np.asarray(X)
    if X.shape[0] == 0:
        return np.zeros(X.shape[1:], dtype=X.dtype)
    while X.shape[0] > 1:
        if X.shape[0] % 2:
            X = np.concatenate([X, np.zeros((1,) + X.shape[1:], dtype=X.dtype)])
        X = X[0::2] + X[1::2]
    return X[0]


def _panel_rule(A, h, t_max, weight):
    """Composite rule on ``[0, P h]``: Gauss-Jacobi for ``t^weight`` on the
    first panel, Gauss-Legendre on the others.  Returns the node
    propagators and weights arranged per panel."""
    n = QUAD_NODES
    P = max(1, int(math.ceil(t_max / h)))
    if P > MAX_PANELS:
        raise ToleranceNotReached(MAX_PANELS, math.inf, 0.0)
    xj, wj = roots_jacobi(n, 0.0, weight)
    t0_nodes = h * (xj + 1) / 2
    w0 = wj * (h / 2) ** (1 + weight)
    xl, wl = roots_legendre(n)
    tau = h * (xl + 1) / 2
    wtau = wl * h / 2
    return P, t0_nodes, w0, tau, wtau


def _weighted_integral(A, X0, weight, h, t_max, side):
    """``int_0^{P h} t^weight Y(t) dt`` for ``Y = (X0 e^{tA})^* (X0 e^{tA})``
    (``side="obs"``) or ``Y = (e^{tA} X0)(e^{tA} X0)^*`` (``side="ctrl"``)."""
    P, t0_nodes, w0, tau, wtau = _panel_rule(A, h, t_max, weight)

    def node_terms(E_list):
        if side == "obs":
            Z = np.stack([X0 @ E for E in E_list])
            return np.conj(np.transpose(Z, (0, 2, 1))) @ Z
        Z = np.stack([E @ X0 for E in E_list])
        return Z @ np.conj(np.transpose(Z, (0, 2, 1)))

    first = np.tensordot(w0, node_terms([semigroup_at(A, t) for t in t0_nodes]), axes=1)
    if P == 1:
        return first, 1
    M = node_terms([semigroup_at(A, t) for t in tau])  # (n_nodes, d, d)
    starts = h * np.arange(1, P)
    c = wtau[None, :] * (starts[:, None] + tau[None, :]) ** weight  # (P-1, n_nodes)
    K = np.tensordot(c, M, axes=1)
    S = semigroup_at(A, h)
    Ys = np.empty((P - 1,) + A.shape, dtype=complex)
    Y = S.copy()
    for p in range(P - 1):
        Ys[p] = Y
        Y = Y @ S
    YH = np.conj(np.transpose(Ys, (0, 2, 1)))
    contrib = YH @ K @ Ys if side == "obs" else Ys @ K @ YH
    return first + _tree_sum(contrib), P


def _gramian(A, X0, weight, tol, side):
    A = as_matrix(A, "A", square=True)
    if weight <= -1:
        raise ValueError("weight exponent must exceed -1")
    kappa, delta = decay_bound(A, weight, tol)
    nX = op_norm(X0)
    if nX == 0:
        d = A.shape[0]
        return np.zeros((d, d), dtype=complex), 0.0, 0.0, 0.0, 0
    t_max = _horizon(delta, weight, tol)
    full = nX ** 2 * kappa ** 2 * math.gamma(1 + weight) / (2 * delta) ** (1 + weight)
    nA = op_norm(A)
    h = min(t_max, PANEL_SCALE / nA) if nA > 0 else t_max
    P = int(math.ceil(t_max / h))
    # both runs cover [0, P h] so that they differ only in the rule
    end = P * h
    tail = full * float(gammaincc(1 + weight, 2 * delta * end))
    Qc, _ = _weighted_integral(A, X0, weight, h, end, side)
    Qf, Pf = _weighted_integral(A, X0, weight, h / 2, end, side)
    Qf = (Qf + adjoint(Qf)) / 2
    err = op_norm(Qf - Qc)
    return Qf, float(err), float(tail), float(end), Pf


def cont_obs_gramian(sys, beta, tol=1e-12):
    """``Q_beta`` by composite quadrature plus an analytic tail bound.

    The horizon ``T_max`` makes ``int_T^inf t^beta kappa^2 e^{-2 delta t} dt``
    a fraction ``tol`` of its value over ``[0, inf)``; the quadrature error
    is estimated by halving the panel width.
    """
    if beta <= -1:
        raise ValueError("beta must exceed -1")
    Q, err, tail, t_max, P = _gramian(sys.A, sys.C, float(beta), tol, "obs")
    lam = float(np.linalg.eigvalsh(Q)[-1]) if Q.size else 0.0
    const = math.sqrt(max(lam, 0.0))
    return Q, ContAdmReport(float(beta), const, err, tail, t_max, P)


def cont_control_gramian(sys, beta, tol=1e-12):
    """``W = int_0^inf t^(-beta) e^{tA} B B* e^{tA*} dt`` computed directly.

    ``B`` is a beta-admissible control operator with constant ``||W||^(1/2)``
    (inputs in ``L^2`` with weight ``t^beta``).  Needs ``beta < 1``.
    """
    if sys.B is None:
        raise MissingControlOperator("system has no control operator B")
    if not -1 < beta < 1:
        raise ValueError("control admissibility by duality needs -1 < beta < 1")
    W, err, tail, t_max, P = _gramian(sys.A, sys.B, -float(beta), tol, "ctrl")
    lam = float(np.linalg.eigvalsh(W)[-1]) if W.size else 0.0
    return W, ContAdmReport(float(beta), math.sqrt(max(lam, 0.0)), err, tail, t_max, P)


def lyapunov_chain(sys, beta):
    """``Q_beta`` for integer ``beta`` from ``A* Q_0 + Q_0 A = -C* C`` and
    ``A* Q_k + Q_k A = -k Q_{k-1}``."""
    if int(beta) != beta or beta < 0:
        raise ValueError("beta must be a non-negative integer")
    A = sys.A
    if A.size and spectral_abscissa(A) >= 0:
        raise NotExponentiallyStable(f"spectral abscissa {spectral_abscissa(A):.3g} >= 0")
    AH = adjoint(A)
    Q = sla.solve_continuous_lyapunov(AH, -(adjoint(sys.C) @ sys.C))
    Q = (Q + adjoint(Q)) / 2
    for k in range(1, int(beta) + 1):
        Q = sla.solve_continuous_lyapunov(AH, -k * Q)
        Q = (Q + adjoint(Q)) / 2
    return Q


def continuous_lower_bound_constant(beta):
    """``c`` with ``sup (Re l)^((1+beta)/2) ||C (l - A)^-(1+beta)|| <= c * constant``.

    From the Laplace representation of the resolvent power and
    Cauchy-Schwarz against ``t^beta``: ``c = 2^(-(1+beta)/2) / Gamma(1+beta)^(1/2)``.
    """
    return 2.0 ** (-(1 + beta) / 2) / math.sqrt(math.gamma(1 + beta))


# ---------------------------------------------------------------------------
# half-plane resolvent condition


def halfplane_grid(n_re=41, n_im=20, lo=-4.0, hi=4.0):
    """``Re l`` log-spaced in ``[10^lo, 10^hi]``; ``Im l`` in ``{0} U +-logspace``."""
    re = np.logspace(lo, hi, n_re)
    ims = np.logspace(lo, hi, n_im)
    im = np.concatenate([[0.0], ims, -ims])
    return (re[:, None] + 1j * im[None, :]).ravel()


def _halfplane_values(A, C, beta, grid):
    s = 1.0 + beta
    d = A.shape[0]
    w, V = np.linalg.eig(A)
    cond = np.linalg.cond(V) if d else 1.0
    if np.isfinite(cond) and cond <= EIG_COND_THRESHOLD:
        CV = C @ V
        Vinv = np.linalg.inv(V)
        diff = grid[:, None] - w[None, :]
        # principal power; Re(l - w) > 0 keeps us off the cut
        D = np.exp(-s * np.log(diff))
        M = (CV[None, :, :] * D[:, None, :]) @ Vinv
        norms = np.linalg.norm(M, ord=2, axis=(1, 2))
    else:
        I = np.eye(d)

        def one(lam):
            return np.linalg.norm(C @ matrix_function(lam * I - A, Power(-s)), 2)

        norms = np.array(pmap(one, list(grid)))
    return grid.real ** (s / 2) * norms


def resolvent_sup_halfplane(sys, beta, grid=None):
    """``sup (Re l)^((1+beta)/2) ||C (l - A)^-(1+beta)||`` over a grid in ``C_+``."""
    if beta <= -1:
        raise ValueError("beta must exceed -1")
    if grid is None:
        grid = halfplane_grid()
        desc = {"kind": "default", "re": [1e-4, 1e4, 41], "im": "0 and +-logspace(-4, 4, 20)"}
    else:
        grid = np.asarray(grid, dtype=complex).ravel()
        desc = {"kind": "custom", "size": int(grid.size)}
    if np.any(grid.real <= 0):
        raise ValueError("grid points must lie in the open right half-plane")
    A = sys.A
    if A.size and spectral_abscissa(A) >= 0 and np.any(
            grid.real[:, None] <= np.linalg.eigvals(A).real[None, :]):
        raise BranchCutViolation("l - A has spectrum outside the right half-plane")
    vals = _halfplane_values(A, sys.C, float(beta), grid)
    i = int(np.argmax(vals))
    return ResolventScan(float(beta), float(vals[i]), complex(grid[i]), desc)


# ---------------------------------------------------------------------------
# 2-hypercontractive semigroups


def _defects_from_increment(K):
    """First and second binomial defects of ``T = I + K``, written so that
    no O(1) terms cancel:  ``D1 = -(K + K* + K*K)``,
    ``D2 = D1 - T* D1 T = -(K* D1 + D1 K + K* D1 K)``."""
    KH = adjoint(K)
    D1 = -(K + KH + KH @ K)
    D2 = -(KH @ D1 + D1 @ K + KH @ D1 @ K)
    return (D1 + adjoint(D1)) / 2, (D2 + adjoint(D2)) / 2


def _lmin(H):
    return float(np.linalg.eigvalsh((H + adjoint(H)) / 2)[0])


def quadratic_forms(A):
    """``2A*A + A^2 + A*^2`` and ``(A+A*)*(A+A*) + A*A - AA*`` (equal)."""
    A = as_matrix(A, "A", square=True)
    AH = adjoint(A)
    f1 = 2 * AH @ A + A @ A + AH @ AH
    S = A + AH
    f2 = adjoint(S) @ S + AH @ A - A @ AH
    return f1, f2


@dataclass(frozen=True)
class SemigroupEquivalence:
    """Verdicts (semigroup 2-hypercontractive, convexity, quadratic form,
    cogenerator 2-hypercontraction), each with its min-eigenvalue margin."""
    verdicts: tuple
    margins: tuple
    borderline: bool
    agree: bool
    form_identity_defect: float
    dissipation: float
    tolerances: tuple = field(default=())


def two_hypercontractive_tests(A, t_grid=DEFAULT_T_GRID, tol=None,
                               band=BORDERLINE_BAND):
    """Evaluate the four equivalent 2-hypercontractivity conditions.

    Margins are scale-normalised so they are comparable to the
    eigenvalues of the quadratic form: semigroup defects at time ``t`` are
    divided by ``t`` (first) and ``t^2`` (second); second differences of
    ``||e^{tA}x||^2`` with step ``tau`` by ``tau^2 sigma_min(e^{tA})^2``, over
    start times where ``e^{tA}`` has condition number at most
    ``CONVEXITY_COND`` (beyond that the congruence loses the sign to rounding).
    """
    A = as_matrix(A, "A", square=True)
    nA = op_norm(A)
    diss = dissipation(A)
    if diss > 1e-10 * max(1.0, nA):
        raise PreconditionError(f"A is not dissipative: lambda_max = {diss:.3g}")
    t_grid = np.asarray(t_grid, dtype=float)
    if tol is None:
        tol = (1e-9 * max(1.0, nA ** 2), 1e-9 * max(1.0, nA ** 2),
               1e-10 * max(1.0, nA ** 2), 1e-10)
    elif np.isscalar(tol):
        tol = (tol,) * 4

    incs = {float(t): _increment(A, t) for t in t_grid}
    D2s = {}
    m1 = math.inf
    for t, K in incs.items():
        D1, D2 = _defects_from_increment(K)
        D2s[t] = D2
        m1 = min(m1, _lmin(D1) / t, _lmin(D2) / t ** 2)

    m2 = math.inf
    starts = [0.0] + [float(t) for t in t_grid]
    for t in starts:
        Tt = np.eye(A.shape[0]) + incs[t] if t > 0 else np.eye(A.shape[0])
        sv = np.linalg.svd(Tt, compute_uv=False)
        if sv[0] > CONVEXITY_COND * sv[-1]:
            break
        scale = sv[-1] ** 2
        for tau in t_grid:
            if t + 2 * tau > t_grid[-1] * (1 + 1e-12):
                break
            Delta = adjoint(Tt) @ D2s[float(tau)] @ Tt
            m2 = min(m2, _lmin(Delta) / (tau ** 2 * scale))

    f1, f2 = quadratic_forms(A)
    m3 = _lmin(f1)
    ident = float(np.max(np.abs(f1 - f2))) if A.size else 0.0

    D1c, D2c = _defects_from_increment(_cogenerator_increment(A, "sec2"))
    m4 = min(_lmin(D1c), _lmin(D2c))

    margins = (m1, m2, m3, m4)
    verdicts = tuple(bool(m >= -t) for m, t in zip(margins, tol))
    border = any(abs(m) < band for m in margins)
    agree = len(set(verdicts)) == 1
    return SemigroupEquivalence(verdicts, tuple(float(m) for m in margins), border,
                                agree, ident, diss, tuple(float(t) for t in tol))


# ---------------------------------------------------------------------------
# Cayley bridge


def mobius_identity_deviation(zs):
    """``max |Re((1-z)/(1+z)) |1+z|^2 - (1 - |z|^2)|``."""
    zs = np.asarray(zs, dtype=complex).ravel()
    lhs = ((1 - zs) / (1 + zs)).real * np.abs(1 + zs) ** 2
    return float(np.max(np.abs(lhs - (1 - np.abs(zs) ** 2)))) if zs.size else 0.0


def bridge_z_grid(radii=(0.25, 0.5, 0.75, 0.95), n_angles=16):
    theta = 2 * np.pi * (np.arange(n_angles) + 0.5) / n_angles
    return (np.asarray(radii)[:, None] * np.exp(1j * theta)[None, :]).ravel()


@dataclass(frozen=True, eq=False)
class BridgeReport:
    pair: BridgePair
    max_deviation: float
    mobius_deviation: float
    grid_size: int


def bridge_pair(sys, beta):
    A = sys.A
    T = cogenerator(A, "prop43")
    I = np.eye(A.shape[0])
    F = sys.C @ matrix_function(I - A, Power(-(1.0 + beta)))
    return BridgePair(T, F, float(beta))


def bridge(sys, beta, z_grid=None):
    """Build ``(T, F)`` and check
    ``F (I - z T)^-(1+b) = C (m I - A)^-(1+b) (1+z)^-(1+b)``, ``z`` conjugated,
    ``m = (1 - z)/(1 + z)``.  Deviations are relative to ``max(1, ||rhs||)``."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    pair = bridge_pair(sys, beta)
    zs = bridge_z_grid() if z_grid is None else np.asarray(z_grid, dtype=complex).ravel()
    if np.any(np.abs(zs) >= 1):
        raise ValueError("z-grid must lie in the open unit disc")
    s = 1.0 + beta
    I = np.eye(sys.A.shape[0])

    def dev(z):
        zb = np.conj(z)
        lhs = pair.F_bridge @ matrix_function(I - zb * pair.T_cog, Power(-s))
        mu = (1 - zb) / (1 + zb)
        rhs = sys.C @ matrix_function(mu * I - sys.A, Power(-s)) * np.exp(-s * np.log(1 + zb))
        return float(np.linalg.norm(lhs - rhs, 2) / max(1.0, np.linalg.norm(rhs, 2)))

    devs = pmap(dev, list(zs))
    return BridgeReport(pair, max(devs) if devs else 0.0, mobius_identity_deviation(zs),
                        int(zs.size))


# ---------------------------------------------------------------------------
# Weiss experiment


def _ratio(a, b):
    if a == 0 and b == 0:
        return 1.0
    return a / b if b != 0 else math.inf


@dataclass(frozen=True)
class ContinuousWeissReport:
    beta: float
    cont_adm: float
    cont_resolvent_sup: float
    disc_adm: float
    disc_resolvent_sup: float
    ratios: dict
    cogenerator_adjoint_hypercontractive: bool
    lower_bound_holds: bool
    quadrature_error_estimate: float


def continuous_weiss_experiment(sys, beta, tol=1e-12, grid=None, disc_grid=None):
    """Continuous constant and half-plane sup next to the discrete constant
    and disc sup of the Cayley-bridge pair, with their pairwise ratios."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    _, rep = cont_obs_gramian(sys, beta, tol)
    cres = resolvent_sup_halfplane(sys, beta, grid).sup_value
    pair = bridge_pair(sys, beta)
    dsys = DiscreteSystem(pair.T_cog, pair.F_bridge)
    _, drep = obs_gramian(dsys, beta)
    dres = resolvent_sup(dsys, beta, disc_grid).sup_value
    hc = bool(adjoint_hypercontractive(pair.T_cog)) if op_norm(pair.T_cog) < 1 else False
    ratios = {
        "cont_adm_over_res": _ratio(rep.constant, cres),
        "disc_adm_over_res": _ratio(drep.constant, dres),
        "adm_cont_over_disc": _ratio(rep.constant, drep.constant),
        "res_cont_over_disc": _ratio(cres, dres),
    }
    slack = 1 + 1e-9
    holds = (cres <= continuous_lower_bound_constant(beta) * rep.constant * slack + 1e-300
             and dres <= lower_bound_constant(beta) * drep.constant * slack + 1e-300)
    return ContinuousWeissReport(float(beta), rep.constant, cres, drep.constant, dres,
                                 ratios, hc, bool(holds), rep.quadrature_error_estimate)


@dataclass(frozen=True)
class ControlDualityReport:
    beta: float
    direct_constant: float
    dual_constant: float
    relative_gap: float
    resolvent_sup: float
    literal_resolvent_sup: float


def continuous_control_experiment(sys, beta, tol=1e-12, grid=None):
    """Control side through duality.

    ``direct_constant`` integrates ``t^(-beta) e^{tA} B B* e^{tA*}``;
    ``dual_constant`` is the ``(-beta)``-observation constant of ``(A*, B*)``.
    ``resolvent_sup`` is the dual half-plane quantity
    ``(Re l)^((1-beta)/2) ||(l - A)^-(1-beta) B||``; ``literal_resolvent_sup``
    uses the exponent ``1+beta`` instead.
    """
    _, drct = cont_control_gramian(sys, beta, tol)
    dual = sys.dual()
    _, obs = cont_obs_gramian(dual, -beta, tol)
    gap = abs(drct.constant - obs.constant) / max(obs.constant, 1e-300)
    res = resolvent_sup_halfplane(dual, -beta, grid).sup_value
    lit = resolvent_sup_halfplane(dual, beta, grid).sup_value
    return ControlDualityReport(float(beta), drct.constant, obs.constant,
                                0.0 if obs.constant == 0 else gap, res, lit)

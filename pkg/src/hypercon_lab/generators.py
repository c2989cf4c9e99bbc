"""Seeded random test operators.

Every generator takes a ``numpy.random.Generator`` so that descriptors
with the same seed reproduce the same matrices.
"""
from __future__ import annotations

import numpy as np
from scipy.stats import unitary_group

from .bergman import BergmanModel, adjoint_shift_matrix
from .operator_core import op_norm

CLASSES = ("normal", "strict-contraction", "dissipative", "bergman-adjoint-shift")


def _cgauss(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_unitary(rng, n):
    return unitary_group.rvs(n, random_state=rng) if n > 1 else np.exp(
        2j * np.pi * rng.random()) * np.ones((1, 1))


def random_normal_contraction(rng, n, r_max=0.99):
    """``U diag(mu) U*`` with ``|mu_i| <= r_max``."""
    mu = r_max * np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))
    U = random_unitary(rng, n)
    return (U * mu) @ U.conj().T


def random_strict_contraction(rng, n, norm=0.9):
    """Complex Gaussian matrix rescaled to operator norm ``norm``."""
    M = _cgauss(rng, (n, n))
    return norm * M / op_norm(M)


def random_dissipative(rng, n, delta=0.1):
    """``N - (lambda_max((N + N*)/2) + delta) I`` for complex Gaussian ``N``."""
    N = _cgauss(rng, (n, n))
    H = (N + N.conj().T) / 2
    return N - (np.linalg.eigvalsh(H)[-1] + delta) * np.eye(n)


def random_dissipative_mixed(rng, n, eps, delta=0.1):
    """Normal part ``U diag(lambda) U*`` with ``Re lambda < 0`` plus
    ``eps`` times a Gaussian perturbation, shifted to be dissipative with
    margin ``delta``.  Small ``eps`` keeps the semigroup 2-hypercontractive,
    large ``eps`` breaks it."""
    lam = -rng.uniform(0.2, 3.0, n) + 1j * rng.uniform(-3.0, 3.0, n)
    U = random_unitary(rng, n)
    A = (U * lam) @ U.conj().T + eps * _cgauss(rng, (n, n))
    H = (A + A.conj().T) / 2
    shift = np.linalg.eigvalsh(H)[-1] + delta
    return A - max(shift, 0.0) * np.eye(n)


def random_stable_diagonalizable(rng, n):
    """``V diag(lambda) V^{-1}`` with ``Re lambda < 0`` and a moderately
    conditioned ``V`` (not necessarily dissipative)."""
    lam = -rng.uniform(0.2, 3.0, n) + 1j * rng.uniform(-2.0, 2.0, n)
    V = np.eye(n) + 0.3 * _cgauss(rng, (n, n)) / np.sqrt(n)
    return V @ np.diag(lam) @ np.linalg.inv(V)


def bergman_adjoint_shift(alpha, n):
    return adjoint_shift_matrix(BergmanModel(alpha, n))


def random_operator(cls, seed, dim, alpha=0.0):
    """Operator of class ``cls`` from ``default_rng(seed)``."""
    rng = np.random.default_rng(seed)
    if cls == "normal":
        return random_normal_contraction(rng, dim)
    if cls == "strict-contraction":
        return random_strict_contraction(rng, dim)
    if cls == "dissipative":
        return random_dissipative(rng, dim)
    if cls == "bergman-adjoint-shift":
        return bergman_adjoint_shift(alpha, dim)
    raise ValueError(f"unknown operator class {cls!r}")


def random_observation(seed, rows, dim):
    """Observation matrix drawn after the operator, from an independent stream."""
    rng = np.random.default_rng([seed, 1])
    return _cgauss(rng, (rows, dim)) / np.sqrt(dim)

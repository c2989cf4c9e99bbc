"""Pure numpy implementations of the series kernels.

These are the fallback for :mod:`hypercon_lab._kernels` and define the
reference semantics; the compiled versions must agree to rounding.
All inputs are complex128; callers in :mod:`hypercon_lab.kernels` take
care of dtype and contiguity.
"""
import numpy as np

_CHUNK = 512


def power_series(X, coeffs):
    """Return ``sum_n coeffs[n] X**n`` by Horner's rule."""
    n = X.shape[0]
    eye = np.eye(n, dtype=complex)
    if len(coeffs) == 0:
        return np.zeros((n, n), dtype=complex)
    out = coeffs[-1] * eye
    for c in coeffs[-2::-1]:
        out = out @ X
        out[np.diag_indices(n)] += c
    return out


def congruence_series(T, Y0, coeffs):
    """Return ``sum_k coeffs[k] (T^H)^k Y0 T^k``."""
    TH = T.conj().T
    Y = Y0.astype(complex, copy=True)
    out = np.zeros_like(Y)
    for k, c in enumerate(coeffs):
        if k:
            Y = TH @ (Y @ T)
        if c != 0:
            out += c * Y
    return out


def power_series_grid(T, scales, coeffs, nterms):
    """Evaluate ``sum_{n < nterms[p]} coeffs[n] (scales[p] T)**n`` for every p.

    Powers of ``T`` are shared across grid points and contracted in
    blocks against the per-point weights, so the cost is one matrix
    product per power plus a GEMM per block.
    """
    n = T.shape[0]
    npts = len(scales)
    kmax = int(nterms.max()) if npts else 0
    out = np.zeros((npts, n * n), dtype=complex)
    power = np.eye(n, dtype=complex)
    zpow = np.ones(npts, dtype=complex)
    idx = np.arange(_CHUNK)
    for start in range(0, kmax, _CHUNK):
        stop = min(start + _CHUNK, kmax)
        m = stop - start
        block = np.empty((m, n * n), dtype=complex)
        for j in range(m):
            block[j] = power.ravel()
            power = power @ T
        # weights[p, j] = coeffs[start+j] * scales[p]**(start+j), masked
        w = scales[:, None] ** idx[None, :m] * zpow[:, None]
        w *= coeffs[None, start:stop]
        w[(start + idx[None, :m]) >= nterms[:, None]] = 0.0
        out += w @ block
        zpow = zpow * scales ** m
    return out.reshape(npts, n, n)

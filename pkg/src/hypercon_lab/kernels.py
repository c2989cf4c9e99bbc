"""Series kernels with backend selection.

The compiled extension is used when it imports; otherwise the numpy
versions in :mod:`hypercon_lab._pykernels` are used.  Setting
``HYPERCONLAB_PURE=1`` forces the fallback.  ``BACKEND`` records the
choice.
"""
import os

import numpy as np

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("HYPERCONLAB_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None
    else:
        _impl = _compiled
        BACKEND = "cython"
else:
    _compiled = None


def _c2(a):
    return np.ascontiguousarray(a, dtype=complex)


def _c1(a):
    return np.ascontiguousarray(np.asarray(a, dtype=complex).ravel())


def power_series(X, coeffs, backend=None):
    """``sum_n coeffs[n] X**n``."""
    return _get(backend).power_series(_c2(X), _c1(coeffs))


def congruence_series(T, Y0, coeffs, backend=None):
    """``sum_k coeffs[k] (T^H)^k Y0 T^k``."""
    return _get(backend).congruence_series(_c2(T), _c2(Y0), _c1(coeffs))


def power_series_grid(T, scales, coeffs, nterms, backend=None):
    """Stacked ``sum_{n < nterms[p]} coeffs[n] (scales[p] T)**n``."""
    nterms = np.ascontiguousarray(nterms, dtype=np.intp).ravel()
    return _get(backend).power_series_grid(_c2(T), _c1(scales), _c1(coeffs), nterms)


def _get(backend):
    if backend is None:
        return _impl
    if backend == "python":
        return _pykernels
    if backend == "cython":
        if _compiled is None:
            raise ImportError("compiled kernels are not available")
        return _compiled
    raise ValueError(f"unknown backend {backend!r}")


def available_backends():
    return ["python"] + (["cython"] if _compiled is not None else [])

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled series kernels (see _pykernels.py for the reference versions).

The series are long and the matrices small, so per-term numpy dispatch
dominates the pure-Python cost.  Here the loop runs in C and every matrix
product goes straight to BLAS ``zgemm`` (through scipy's Cython BLAS
table, so no extra link dependency).  Row-major buffers are handed to
column-major BLAS by computing the transposed product.
"""
import numpy as np
cimport numpy as cnp
from scipy.linalg.cython_blas cimport zgemm

cnp.import_array()

ctypedef double complex cplx

DEF CHUNK = 512


cdef inline void _matmul(cplx* A, cplx* B, cplx* C, int n) noexcept nogil:
    # C = A @ B (row-major)  <=>  C^T = B^T A^T (column-major)
    cdef char tn = b'N'
    cdef cplx one = 1.0, zero = 0.0
    zgemm(&tn, &tn, &n, &n, &n, &one, B, &n, A, &n, &zero, C, &n)


cdef inline void _matmul_hn(cplx* A, cplx* B, cplx* C, int n) noexcept nogil:
    # C = A^H @ B (row-major)  <=>  C^T = B^T conj(A)
    cdef char tn = b'N'
    cdef char tc = b'C'
    cdef cplx one = 1.0, zero = 0.0
    zgemm(&tn, &tc, &n, &n, &n, &one, B, &n, A, &n, &zero, C, &n)


def power_series(const cplx[:, ::1] X, const cplx[::1] coeffs):
    """Return ``sum_n coeffs[n] X**n`` by Horner's rule."""
    cdef int n = X.shape[0]
    cdef Py_ssize_t K = coeffs.shape[0]
    cdef cnp.ndarray[cplx, ndim=2] out = np.zeros((n, n), dtype=complex)
    cdef cnp.ndarray[cplx, ndim=2] tmp = np.zeros((n, n), dtype=complex)
    cdef cnp.ndarray[cplx, ndim=2] Xc = np.array(X, dtype=complex, copy=True)
    cdef cplx* po
    cdef cplx* pt
    cdef cplx* px
    cdef cplx* swap
    cdef Py_ssize_t k
    cdef int i
    if K == 0 or n == 0:
        return out
    po = &out[0, 0]
    pt = &tmp[0, 0]
    px = &Xc[0, 0]
    with nogil:
        for i in range(n):
            po[i * n + i] = coeffs[K - 1]
        for k in range(K - 2, -1, -1):
            _matmul(po, px, pt, n)
            for i in range(n):
                pt[i * n + i] = pt[i * n + i] + coeffs[k]
            swap = po
            po = pt
            pt = swap
    if po != &out[0, 0]:
        return tmp
    return out


def congruence_series(const cplx[:, ::1] T, const cplx[:, ::1] Y0, const cplx[::1] coeffs):
    """Return ``sum_k coeffs[k] (T^H)^k Y0 T^k``."""
    cdef int n = T.shape[0]
    cdef Py_ssize_t K = coeffs.shape[0]
    cdef cnp.ndarray[cplx, ndim=2] out = np.zeros((n, n), dtype=complex)
    cdef cnp.ndarray[cplx, ndim=2] Y = np.array(Y0, dtype=complex, copy=True)
    cdef cnp.ndarray[cplx, ndim=2] W = np.zeros((n, n), dtype=complex)
    cdef cnp.ndarray[cplx, ndim=2] Tc = np.array(T, dtype=complex, copy=True)
    cdef cplx* po
    cdef cplx* py
    cdef cplx* pw
    cdef cplx* pT
    cdef Py_ssize_t k, i
    cdef cplx c
    if K == 0 or n == 0:
        return out
    po = &out[0, 0]
    py = &Y[0, 0]
    pw = &W[0, 0]
    pT = &Tc[0, 0]
    with nogil:
        for k in range(K):
            if k:
                _matmul(py, pT, pw, n)       # W = Y T
                _matmul_hn(pT, pw, py, n)    # Y = T^H W
            c = coeffs[k]
            if c != 0:
                for i in range(n * n):
                    po[i] = po[i] + c * py[i]
    return out


def power_series_grid(const cplx[:, ::1] T, const cplx[::1] scales,
                      const cplx[::1] coeffs, const Py_ssize_t[::1] nterms):
    """Evaluate ``sum_{n < nterms[p]} coeffs[n] (scales[p] T)**n`` for every p.

    Same blocking as the reference: a block of powers of ``T`` is
    contracted against the masked per-point weights with one GEMM.
    """
    cdef int n = T.shape[0]
    cdef int nn = n * n
    cdef int npts = scales.shape[0]
    cdef Py_ssize_t kmax = 0
    cdef Py_ssize_t p, j, start
    cdef int m
    for p in range(npts):
        if nterms[p] > kmax:
            kmax = nterms[p]
    cdef cnp.ndarray[cplx, ndim=2] out = np.zeros((npts, nn), dtype=complex)
    if npts == 0 or n == 0 or kmax == 0:
        return out.reshape(npts, n, n)
    cdef cnp.ndarray[cplx, ndim=2] block = np.zeros((CHUNK, nn), dtype=complex)
    cdef cnp.ndarray[cplx, ndim=2] wts = np.zeros((npts, CHUNK), dtype=complex)
    cdef cnp.ndarray[cplx, ndim=2] P = np.eye(n, dtype=complex)
    cdef cnp.ndarray[cplx, ndim=2] Q = np.zeros((n, n), dtype=complex)
    cdef cnp.ndarray[cplx, ndim=2] Tc = np.array(T, dtype=complex, copy=True)
    cdef cnp.ndarray[cplx, ndim=1] zpow = np.ones(npts, dtype=complex)
    cdef cplx* pp = &P[0, 0]
    cdef cplx* pq = &Q[0, 0]
    cdef cplx* swap
    cdef cplx* pT = &Tc[0, 0]
    cdef cplx* pb = &block[0, 0]
    cdef cplx* pw = &wts[0, 0]
    cdef cplx* po = &out[0, 0]
    cdef cplx* pz = &zpow[0]
    cdef cplx zk
    cdef char tn = b'N'
    cdef cplx one = 1.0
    cdef int ldw = CHUNK
    cdef int i
    with nogil:
        start = 0
        while start < kmax:
            m = <int>min(CHUNK, kmax - start)
            for j in range(m):
                for i in range(nn):
                    pb[j * nn + i] = pp[i]
                _matmul(pp, pT, pq, n)
                swap = pp
                pp = pq
                pq = swap
            for p in range(npts):
                zk = pz[p]
                for j in range(m):
                    if start + j < nterms[p]:
                        pw[p * CHUNK + j] = coeffs[start + j] * zk
                    else:
                        pw[p * CHUNK + j] = 0
                    zk = zk * scales[p]
                pz[p] = zk
            # out (npts x nn) += wts[:, :m] (npts x m) @ block[:m] (m x nn)
            zgemm(&tn, &tn, &nn, &npts, &m, &one, pb, &nn, pw, &ldw, &one, po, &nn)
            start += m
    return out.reshape(npts, n, n)

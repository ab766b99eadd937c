# cython: language_level=3
# cython: boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled kernels for the hot loops: outcome-space min-sums, decision-table
fills and channel trial streams.

``biasfuse._kernels_py`` is the pure-python twin. Both backends perform the
same IEEE operations in the same association order (products fold the
highest-indexed channel in first; sums pair outcomes differing in channel 0
first), so their results match bit for bit. tests/test_backends.py and the
benchmark assert this.
"""

from libc.math cimport fmin

import numpy as np


cdef double _minsum(const double* alpha, const double* beta, double rho0,
                    double rho1, int k, double pa, double pb) noexcept nogil:
    cdef double v0, v1
    if k == 0:
        v0 = fmin(rho0 * (pa * (1.0 - alpha[0])), rho1 * (pb * beta[0]))
        v1 = fmin(rho0 * (pa * alpha[0]), rho1 * (pb * (1.0 - beta[0])))
        return v0 + v1
    v0 = _minsum(alpha, beta, rho0, rho1, k - 1,
                 pa * (1.0 - alpha[k]), pb * beta[k])
    v1 = _minsum(alpha, beta, rho0, rho1, k - 1,
                 pa * alpha[k], pb * (1.0 - beta[k]))
    return v0 + v1


cdef void _fill_table(const double* alpha, const double* beta, double rho0,
                      double rho1, int k, double pa, double pb,
                      unsigned char* out, size_t base) noexcept nogil:
    if k == 0:
        out[base] = rho0 * (pa * (1.0 - alpha[0])) < rho1 * (pb * beta[0])
        out[base + 1] = rho0 * (pa * alpha[0]) < rho1 * (pb * (1.0 - beta[0]))
        return
    _fill_table(alpha, beta, rho0, rho1, k - 1,
                pa * (1.0 - alpha[k]), pb * beta[k], out, base)
    _fill_table(alpha, beta, rho0, rho1, k - 1,
                pa * alpha[k], pb * (1.0 - beta[k]), out,
                base + ((<size_t>1) << k))


def minsum_total(alpha, beta, double rho0, double rho1):
    """Sum over all outcomes of min(rho0 * A(y), rho1 * B(y))."""
    a = np.ascontiguousarray(alpha, dtype=np.float64)
    b = np.ascontiguousarray(beta, dtype=np.float64)
    cdef double[::1] av = a
    cdef double[::1] bv = b
    cdef int n = av.shape[0]
    if bv.shape[0] != n or n < 1:
        raise ValueError("alpha and beta must be equal-length, non-empty vectors")
    cdef double total
    with nogil:
        total = _minsum(&av[0], &bv[0], rho0, rho1, n - 1, 1.0, 1.0)
    return total


def map_table(alpha, beta, double rho0, double rho1):
    """Posterior-optimal decision per outcome: 1 iff rho0*A(y) < rho1*B(y)."""
    a = np.ascontiguousarray(alpha, dtype=np.float64)
    b = np.ascontiguousarray(beta, dtype=np.float64)
    cdef double[::1] av = a
    cdef double[::1] bv = b
    cdef int n = av.shape[0]
    if bv.shape[0] != n or n < 1:
        raise ValueError("alpha and beta must be equal-length, non-empty vectors")
    if n > 30:
        raise ValueError("decision table for n > 30 channels would not fit memory")
    table = np.empty(1 << n, dtype=np.uint8)
    cdef unsigned char[::1] tv = table
    with nogil:
        _fill_table(&av[0], &bv[0], rho0, rho1, n - 1, 1.0, 1.0, &tv[0], 0)
    return table


def sim_indices(u, alpha, beta, double rho1):
    """Turn a block of uniforms into (source bits, outcome indices).

    ``u`` has one row per trial and n+1 columns: column 0 draws the source
    bit (X = 1 iff u < rho1), column i+1 draws channel i's output given X.
    """
    a = np.ascontiguousarray(alpha, dtype=np.float64)
    b = np.ascontiguousarray(beta, dtype=np.float64)
    uu = np.ascontiguousarray(u, dtype=np.float64)
    cdef double[::1] av = a
    cdef double[::1] bv = b
    cdef double[:, ::1] uv = uu
    cdef int n = av.shape[0]
    cdef Py_ssize_t trials = uv.shape[0]
    if bv.shape[0] != n or n < 1:
        raise ValueError("alpha and beta must be equal-length, non-empty vectors")
    if uv.shape[1] != n + 1:
        raise ValueError(f"uniform block must have {n + 1} columns")
    x = np.empty(trials, dtype=np.uint8)
    idx = np.empty(trials, dtype=np.longlong)
    cdef unsigned char[::1] xv = x
    cdef long long[::1] iv = idx
    cdef Py_ssize_t t
    cdef int i
    cdef long long j
    with nogil:
        for t in range(trials):
            j = 0
            if uv[t, 0] < rho1:
                xv[t] = 1
                for i in range(n):
                    if uv[t, i + 1] >= bv[i]:
                        j |= (<long long>1) << i
            else:
                xv[t] = 0
                for i in range(n):
                    if uv[t, i + 1] < av[i]:
                        j |= (<long long>1) << i
            iv[t] = j
    return x, idx

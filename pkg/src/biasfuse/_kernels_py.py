"""Pure-python (numpy) twin of the compiled kernels.

The compiled backend in ``_kernels.pyx`` walks the outcome tree depth-first,
branching the highest-indexed channel at the root, so its products associate
as ((f_n * f_{n-1}) * ...) * f_1 and its sums pair outcomes that differ in
channel 0 first. The vectorized code below reproduces exactly that
association order, which makes the two backends agree bit for bit.
"""

from __future__ import annotations

import numpy as np


def _coerce(alpha, beta):
    a = np.ascontiguousarray(alpha, dtype=np.float64)
    b = np.ascontiguousarray(beta, dtype=np.float64)
    if a.ndim != 1 or a.shape != b.shape or a.size < 1:
        raise ValueError("alpha and beta must be equal-length, non-empty vectors")
    return a, b


def likelihood_arrays(alpha, beta):
    """Conditional outcome distributions over {0,1}**n.

    Returns ``(A, B)`` with ``A[idx] = P(y | X=0)`` and ``B[idx] = P(y | X=1)``
    where outcome ``y`` packs channel i's bit at position i of ``idx``.
    """
    a, b = _coerce(alpha, beta)
    A = np.ones(1)
    B = np.ones(1)
    for i in range(a.size - 1, -1, -1):
        fa = np.array([1.0 - a[i], a[i]])
        fb = np.array([b[i], 1.0 - b[i]])
        A = (A[:, None] * fa).reshape(-1)
        B = (B[:, None] * fb).reshape(-1)
    return A, B


def minsum_total(alpha, beta, rho0, rho1):
    """Sum over all outcomes of min(rho0 * A(y), rho1 * B(y))."""
    A, B = likelihood_arrays(alpha, beta)
    A *= rho0
    B *= rho1
    m = np.minimum(A, B, out=A)
    # Strided fold = the compiled kernel's summation tree: outcomes that
    # differ in channel 0 are paired first.
    while m.size > 1:
        m = m[0::2] + m[1::2]
    return float(m[0])


def map_table(alpha, beta, rho0, rho1):
    """Posterior-optimal decision per outcome: 1 iff rho0*A(y) < rho1*B(y).

    Ties decide 0 (the a-priori likely value), matching the comparison used
    by the compiled kernel.
    """
    A, B = likelihood_arrays(alpha, beta)
    A *= rho0
    B *= rho1
    return (A < B).astype(np.uint8)


def sim_indices(u, alpha, beta, rho1):
    """Turn a block of uniforms into (source bits, outcome indices).

    ``u`` has one row per trial and n+1 columns: column 0 draws the source
    bit (X = 1 iff u < rho1), column i+1 draws channel i's output given X.
    """
    a, b = _coerce(alpha, beta)
    u = np.asarray(u, dtype=np.float64)
    n = a.size
    if u.ndim != 2 or u.shape[1] != n + 1:
        raise ValueError(f"uniform block must have {n + 1} columns")
    x = u[:, 0] < rho1
    y_given_0 = u[:, 1:] < a
    y_given_1 = u[:, 1:] >= b
    y = np.where(x[:, None], y_given_1, y_given_0)
    pows = np.int64(1) << np.arange(n, dtype=np.int64)
    idx = y.astype(np.int64) @ pows
    return x.astype(np.uint8), idx.astype(np.longlong)

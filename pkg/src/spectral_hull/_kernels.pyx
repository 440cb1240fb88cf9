# cython: boundscheck=False, wraparound=False, cdivision=True
"""Hot kernels for pseudometric distance evaluation.

The pure-Python fallback (``_kernels_py``) must stay bitwise-identical:
both accumulate terms in ascending j order and take the complex modulus
as sqrt(re^2 + im^2), whose multiply/add/sqrt steps are IEEE correctly
rounded (coordinate magnitudes stay far from overflow), so either backend
can serve the same test expectations.
"""

import numpy as np

from libc.math cimport sqrt


def pairwise_block(double[::1] w, double complex[:, ::1] V, Py_ssize_t a0, Py_ssize_t a1):
    """Distances d(a, b) = sum_j w[j] * |V[a, j] - V[b, j]| for a in [a0, a1).

    V is the (n_atoms, n_terms) coordinate matrix, w the per-term weights.
    Returns an (a1 - a0, n_atoms) float64 array.
    """
    cdef Py_ssize_t n = V.shape[0]
    cdef Py_ssize_t m = V.shape[1]
    cdef Py_ssize_t a, b, j
    cdef double acc, dr, di
    cdef double complex za, zb
    out = np.empty((a1 - a0, n), dtype=np.float64)
    cdef double[:, ::1] D = out
    for a in range(a0, a1):
        for b in range(n):
            acc = 0.0
            for j in range(m):
                za = V[a, j]
                zb = V[b, j]
                dr = za.real - zb.real
                di = za.imag - zb.imag
                acc = acc + w[j] * sqrt(dr * dr + di * di)
            D[a - a0, b] = acc
    return out

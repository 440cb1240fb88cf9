"""NumPy fallback for the compiled distance kernels.

Term accumulation runs in ascending j order and the complex modulus is
sqrt(re^2 + im^2) elementwise, matching the compiled kernel bit for bit
(multiply, add and sqrt are IEEE correctly rounded).
"""

import numpy as np


def pairwise_block(w, V, a0, a1):
    """Distances d(a, b) = sum_j w[j] * |V[a, j] - V[b, j]| for a in [a0, a1).

    Same contract as the compiled kernel: V is (n_atoms, n_terms) complex,
    w is (n_terms,) float64; returns an (a1 - a0, n_atoms) float64 array.
    """
    n, m = V.shape
    out = np.zeros((a1 - a0, n), dtype=np.float64)
    block = V[a0:a1]
    for j in range(m):
        d = block[:, j, None] - V[None, :, j]
        dr = d.real
        di = d.imag
        out += w[j] * np.sqrt(dr * dr + di * di)
    return out

"""Backend dispatch for the distance kernels.

The compiled extension is preferred; SPECTRAL_HULL_FORCE_PY=1 or a missing
build selects the NumPy fallback. Both backends produce bitwise-identical
output, so the choice never affects results, only speed.
"""

import os

import numpy as np

from . import _kernels_py

if os.environ.get("SPECTRAL_HULL_FORCE_PY") == "1":
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py


def backend_name():
    return "compiled" if _impl.__name__.endswith("._kernels") else "numpy"


def pairwise_block(w, V, a0, a1):
    """Block of pseudometric distances; see the kernel docstrings."""
    w = np.ascontiguousarray(w, dtype=np.float64)
    V = np.ascontiguousarray(V, dtype=np.complex128)
    return _impl.pairwise_block(w, V, a0, a1)


def dist_row(w, V, k):
    """Distances from atom k to every atom."""
    return pairwise_block(w, V, k, k + 1)[0]

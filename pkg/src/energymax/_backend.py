"""Kernel backend selection: compiled extension if available, NumPy otherwise.

Set ENERGYMAX_PURE=1 to force the NumPy fallback (used by the benchmark
and by tests that compare the two implementations).
"""

import os

import numpy as np

from . import _kernels_py

USING_COMPILED = False

if os.environ.get("ENERGYMAX_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl

        USING_COMPILED = True
    except ImportError:
        _impl = _kernels_py
else:
    _impl = _kernels_py


def backend_name():
    return "compiled" if USING_COMPILED else "numpy"


def dist_pow_matrix(X, r, p):
    return _impl.dist_pow_matrix(np.ascontiguousarray(X, dtype=np.float64), r, p)


def lq_norm_pow(X, q, p):
    return _impl.lq_norm_pow(np.ascontiguousarray(X, dtype=np.float64), q, p)


def cms_transform(u, e, r):
    return _impl.cms_transform(
        np.ascontiguousarray(u, dtype=np.float64),
        np.ascontiguousarray(e, dtype=np.float64),
        r,
    )

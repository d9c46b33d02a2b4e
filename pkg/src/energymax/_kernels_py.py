"""Pure NumPy fallbacks for the compiled kernels in _kernels.pyx.

Chunked so that no temporary exceeds ~100 MB even for a few thousand
points in dimension a few hundred.
"""

import numpy as np

_CHUNK = 64


def dist_pow_matrix(X, r, p):
    """D[i,j] = ||X[i] - X[j]||_r ** p for finite r, zero diagonal."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    N = X.shape[0]
    D = np.zeros((N, N))
    for start in range(0, N, _CHUNK):
        stop = min(start + _CHUNK, N)
        diff = np.abs(X[start:stop, None, :] - X[None, :, :])
        D[start:stop] = np.sum(diff**r, axis=2) ** (p / r)
    np.fill_diagonal(D, 0.0)
    return D


def lq_norm_pow(X, q, p):
    """out[i] = ||X[i]||_q ** p for finite q >= 1."""
    X = np.asarray(X, dtype=np.float64)
    return np.sum(np.abs(X) ** q, axis=1) ** (p / q)


def cms_transform(u, e, r):
    """Chambers-Mallows-Stuck map of (uniform, exponential) pairs to r-stable draws."""
    u = np.asarray(u, dtype=np.float64)
    e = np.asarray(e, dtype=np.float64)
    return (np.sin(r * u) / np.cos(u) ** (1.0 / r)) * (
        np.cos((1.0 - r) * u) / e
    ) ** ((1.0 - r) / r)

# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot loops: pairwise distance powers, norm powers, stable transforms.

Mirrors the NumPy implementations in _kernels_py.py; the two must stay
numerically interchangeable (same formulas, tolerance-level agreement).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, pow, sqrt, sin, cos

cnp.import_array()


def dist_pow_matrix(double[:, ::1] X, double r, double p):
    """D[i,j] = ||X[i] - X[j]||_r ** p for finite r, zero diagonal."""
    cdef Py_ssize_t N = X.shape[0]
    cdef Py_ssize_t n = X.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.zeros((N, N))
    cdef double[:, ::1] D = out
    cdef Py_ssize_t i, j, k
    cdef double acc, d
    for i in range(N):
        for j in range(i + 1, N):
            acc = 0.0
            for k in range(n):
                acc += pow(fabs(X[i, k] - X[j, k]), r)
            d = pow(acc, p / r)
            D[i, j] = d
            D[j, i] = d
    return out


def lq_norm_pow(double[:, ::1] X, double q, double p):
    """out[i] = ||X[i]||_q ** p for finite q >= 1."""
    cdef Py_ssize_t N = X.shape[0]
    cdef Py_ssize_t n = X.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(N)
    cdef double[::1] o = out
    cdef Py_ssize_t i, k
    cdef double acc
    for i in range(N):
        acc = 0.0
        for k in range(n):
            acc += pow(fabs(X[i, k]), q)
        o[i] = pow(acc, p / q)
    return out


def cms_transform(double[::1] u, double[::1] e, double r):
    """Chambers-Mallows-Stuck map of (uniform, exponential) pairs to r-stable draws.

    u in (-pi/2, pi/2), e standard exponential; 1 < r < 2 (the r=1 and r=2
    cases are handled upstream in closed form).
    """
    cdef Py_ssize_t N = u.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(N)
    cdef double[::1] o = out
    cdef Py_ssize_t i
    cdef double a = 1.0 / r
    cdef double b = (1.0 - r) / r
    for i in range(N):
        o[i] = (sin(r * u[i]) / pow(cos(u[i]), a)) * pow(cos((1.0 - r) * u[i]) / e[i], b)
    return out

# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled pairwise kernels for point-cloud matrix assembly.

Hot loops behind :mod:`shellbound.kernels`; every function has a numpy
fallback with identical semantics there.
"""

from libc.math cimport exp

import numpy as np


def squared_distances(const double[:, ::1] p, const double[:, ::1] q):
    """Pairwise squared Euclidean distances, exact accumulation per pair."""
    cdef Py_ssize_t rows = p.shape[0]
    cdef Py_ssize_t cols = q.shape[0]
    cdef Py_ssize_t dim = p.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double acc, diff
    out = np.empty((rows, cols), dtype=np.float64)
    cdef double[:, ::1] o = out
    for i in range(rows):
        for j in range(cols):
            acc = 0.0
            for k in range(dim):
                diff = p[i, k] - q[j, k]
                acc += diff * diff
            o[i, j] = acc
    return out


def gaussian_mix(const double[:, ::1] p, const double[:, ::1] q,
                 const double[::1] amplitudes, const double[::1] rates):
    """Matrix sum_m amplitudes[m] * exp(-rates[m] * |p_i - q_j|^2), fused.

    Avoids materializing the distance matrix separately from the kernel
    values; this is the dominant cost of tube-cloud form assembly.
    """
    cdef Py_ssize_t rows = p.shape[0]
    cdef Py_ssize_t cols = q.shape[0]
    cdef Py_ssize_t dim = p.shape[1]
    cdef Py_ssize_t terms = amplitudes.shape[0]
    cdef Py_ssize_t i, j, k, m
    cdef double acc, diff, val
    out = np.empty((rows, cols), dtype=np.float64)
    cdef double[:, ::1] o = out
    for i in range(rows):
        for j in range(cols):
            acc = 0.0
            for k in range(dim):
                diff = p[i, k] - q[j, k]
                acc += diff * diff
            val = 0.0
            for m in range(terms):
                val += amplitudes[m] * exp(-rates[m] * acc)
            o[i, j] = val
    return out

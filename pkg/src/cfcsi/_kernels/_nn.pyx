# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled nearest-codeword assignment (hot kernel of LBG and quantization)."""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()


def assign_nearest(points, codebook):
    """Index of the nearest codeword (squared Euclidean) for each row of `points`.

    Returns (indices, squared_distances); ties go to the lowest index.
    """
    x_arr = np.ascontiguousarray(points, dtype=np.float64)
    cb_arr = np.ascontiguousarray(codebook, dtype=np.float64)
    if x_arr.ndim != 2 or cb_arr.ndim != 2 or x_arr.shape[1] != cb_arr.shape[1]:
        raise ValueError(f"incompatible shapes {x_arr.shape} vs {cb_arr.shape}")

    cdef const double[:, ::1] x = x_arr
    cdef const double[:, ::1] cb = cb_arr
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t dim = x.shape[1]
    cdef Py_ssize_t size = cb.shape[0]

    indices_arr = np.empty(n, dtype=np.int64)
    dists_arr = np.empty(n, dtype=np.float64)
    cdef cnp.int64_t[::1] indices = indices_arr
    cdef double[::1] dists = dists_arr

    cdef Py_ssize_t i, j, k, best_j
    cdef double acc, diff, best

    for i in range(n):
        best = INFINITY
        best_j = 0
        for j in range(size):
            acc = 0.0
            for k in range(dim):
                diff = x[i, k] - cb[j, k]
                acc += diff * diff
            if acc < best:
                best = acc
                best_j = j
        indices[i] = best_j
        dists[i] = best
    return indices_arr, dists_arr

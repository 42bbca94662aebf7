"""Pure-numpy nearest-codeword assignment, chunked to bound peak memory."""

from __future__ import annotations

import numpy as np

_CHUNK = 8192


def assign_nearest(points: np.ndarray, codebook: np.ndarray):
    """Index of the nearest codeword (squared Euclidean) for each row of `points`.

    Returns (indices, squared_distances). Ties go to the lowest index. The
    squared distance is accumulated one dimension at a time so the rounding
    matches the compiled kernel exactly.
    """
    x = np.ascontiguousarray(points, dtype=np.float64)
    cb = np.ascontiguousarray(codebook, dtype=np.float64)
    if x.ndim != 2 or cb.ndim != 2 or x.shape[1] != cb.shape[1]:
        raise ValueError(f"incompatible shapes {x.shape} vs {cb.shape}")
    n, dim = x.shape
    indices = np.empty(n, dtype=np.int64)
    dists = np.empty(n, dtype=np.float64)
    for start in range(0, n, _CHUNK):
        chunk = x[start : start + _CHUNK]
        acc = np.zeros((chunk.shape[0], cb.shape[0]))
        for k in range(dim):
            diff = chunk[:, k, None] - cb[None, :, k]
            acc += diff * diff
        best = np.argmin(acc, axis=1)
        indices[start : start + _CHUNK] = best
        dists[start : start + _CHUNK] = acc[np.arange(chunk.shape[0]), best]
    return indices, dists

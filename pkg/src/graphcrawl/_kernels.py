"""Compiled walk kernels.  All randomness is passed in as uniform arrays."""

import numba
import numpy as np


@numba.njit(cache=True)
def walk(indptr, indices, start, uniforms):
    n = uniforms.size
    path = np.empty(n, dtype=np.int64)
    x = start
    for i in range(n):
        lo = indptr[x]
        d = indptr[x + 1] - lo
        j = int(uniforms[i] * d)
        if j == d:
            j = d - 1
        x = indices[lo + j]
        path[i] = x
    return path


@numba.njit(cache=True)
def weighted_walk(indptr, indices, cumw, start, uniforms):
    # cumw[k] is the running weight sum within the row of entry k
    n = uniforms.size
    path = np.empty(n, dtype=np.int64)
    x = start
    for i in range(n):
        lo = indptr[x]
        hi = indptr[x + 1]
        target = uniforms[i] * cumw[hi - 1]
        a = lo
        b = hi - 1
        while a < b:
            mid = (a + b) // 2
            if cumw[mid] > target:
                b = mid
            else:
                a = mid + 1
        x = indices[a]
        path[i] = x
    return path


@numba.njit(cache=True)
def row_cumsum(indptr, weights):
    out = np.empty(weights.size, dtype=np.float64)
    for r in range(indptr.size - 1):
        acc = 0.0
        for k in range(indptr[r], indptr[r + 1]):
            acc += weights[k]
            out[k] = acc
    return out

# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled alignment kernels; semantics mirror _fallback exactly."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def dtw_path(cost):
    """See _fallback.dtw_path; identical contract and tie-breaking."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] c = np.ascontiguousarray(cost, dtype=np.float64)
    cdef Py_ssize_t n = c.shape[0]
    cdef Py_ssize_t m = c.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] acc = np.empty((n, m), dtype=np.float64)
    cdef Py_ssize_t i, j
    cdef double best, d, v, h

    acc[0, 0] = c[0, 0]
    for j in range(1, m):
        acc[0, j] = acc[0, j - 1] + c[0, j]
    for i in range(1, n):
        acc[i, 0] = acc[i - 1, 0] + c[i, 0]
        for j in range(1, m):
            best = acc[i - 1, j - 1]
            if acc[i - 1, j] < best:
                best = acc[i - 1, j]
            if acc[i, j - 1] < best:
                best = acc[i, j - 1]
            acc[i, j] = c[i, j] + best

    cdef cnp.ndarray[cnp.int64_t, ndim=1, mode="c"] rev_i = np.empty(n + m, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1, mode="c"] rev_j = np.empty(n + m, dtype=np.int64)
    cdef Py_ssize_t k = 0
    i = n - 1
    j = m - 1
    while True:
        rev_i[k] = i
        rev_j[k] = j
        k += 1
        if i == 0 and j == 0:
            break
        if i == 0:
            j -= 1
        elif j == 0:
            i -= 1
        else:
            d = acc[i - 1, j - 1]
            v = acc[i - 1, j]
            h = acc[i, j - 1]
            if d <= v and d <= h:
                i -= 1
                j -= 1
            elif v <= h:
                i -= 1
            else:
                j -= 1
    return rev_i[:k][::-1].copy(), rev_j[:k][::-1].copy(), float(acc[n - 1, m - 1])


def window_assign(dist, radius, maximize):
    """See _fallback.window_assign; identical contract and tie-breaking."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] d = np.ascontiguousarray(dist, dtype=np.float64)
    cdef Py_ssize_t T = d.shape[0]
    cdef Py_ssize_t r = radius
    cdef bint maxmode = 1 if maximize else 0
    cdef cnp.ndarray[cnp.int64_t, ndim=1, mode="c"] out = np.empty(T, dtype=np.int64)
    cdef Py_ssize_t i, j, j0, j1, arg
    cdef double ext, val

    for i in range(T):
        j0 = i - r if i - r > 0 else 0
        j1 = i + r if i + r < T - 1 else T - 1
        arg = j0
        ext = d[i, j0]
        for j in range(j0 + 1, j1 + 1):
            val = d[i, j]
            if (maxmode and val > ext) or (not maxmode and val < ext):
                ext = val
                arg = j
        out[i] = arg
    return out

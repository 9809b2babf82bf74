"""Pure-Python reference implementation of the alignment kernels.

Kept operation-for-operation identical to the compiled extension so both
backends return bit-identical results.
"""

import numpy as np


def dtw_path(cost):
    """Minimal-cost monotone path through a pairwise cost matrix.

    ``cost[i, j]`` is the frame cost of pairing source index i with
    template index j. The path starts at (0, 0), ends at (n-1, m-1), and
    steps by (1,0), (0,1), or (1,1). Traceback ties prefer the diagonal
    step, then the vertical (source-advancing) step.

    Returns (idx_i, idx_j, total_cost) with the path in forward order.
    """
    cost = np.ascontiguousarray(cost, dtype=np.float64)
    n, m = cost.shape
    acc = np.empty((n, m), dtype=np.float64)
    acc[0, 0] = cost[0, 0]
    for j in range(1, m):
        acc[0, j] = acc[0, j - 1] + cost[0, j]
    for i in range(1, n):
        acc[i, 0] = acc[i - 1, 0] + cost[i, 0]
        for j in range(1, m):
            best = acc[i - 1, j - 1]
            if acc[i - 1, j] < best:
                best = acc[i - 1, j]
            if acc[i, j - 1] < best:
                best = acc[i, j - 1]
            acc[i, j] = cost[i, j] + best

    rev_i, rev_j = [], []
    i, j = n - 1, m - 1
    while True:
        rev_i.append(i)
        rev_j.append(j)
        if i == 0 and j == 0:
            break
        if i == 0:
            j -= 1
        elif j == 0:
            i -= 1
        else:
            d, v, h = acc[i - 1, j - 1], acc[i - 1, j], acc[i, j - 1]
            if d <= v and d <= h:
                i -= 1
                j -= 1
            elif v <= h:
                i -= 1
            else:
                j -= 1
    idx_i = np.asarray(rev_i[::-1], dtype=np.int64)
    idx_j = np.asarray(rev_j[::-1], dtype=np.int64)
    return idx_i, idx_j, float(acc[n - 1, m - 1])


def window_assign(dist, radius, maximize):
    """Per-row windowed arg-extremum over a square distance matrix.

    For each i, scans j in [max(0, i-radius), min(T-1, i+radius)] of
    ``dist[i, :]`` and returns the first j attaining the minimum
    (``maximize`` falsy) or maximum (truthy).
    """
    dist = np.ascontiguousarray(dist, dtype=np.float64)
    T = dist.shape[0]
    out = np.empty(T, dtype=np.int64)
    for i in range(T):
        j0 = i - radius if i - radius > 0 else 0
        j1 = i + radius if i + radius < T - 1 else T - 1
        w = dist[i, j0 : j1 + 1]
        out[i] = j0 + (np.argmax(w) if maximize else np.argmin(w))
    return out

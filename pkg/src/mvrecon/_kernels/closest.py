"""Brute-force nearest-vertex queries (the ICP correspondence kernel).

Ties in squared distance resolve to the lowest vertex index on both paths
(strict ``<`` in the loop, first-argmin in numpy).
"""

import numpy as np

from ._select import USE_NUMBA, njit


def _nearest_loops(queries, points):
    m = queries.shape[0]
    n = points.shape[0]
    idx = np.empty(m, np.int64)
    d2 = np.empty(m, np.float64)
    for i in range(m):
        qx = queries[i, 0]
        qy = queries[i, 1]
        qz = queries[i, 2]
        best = np.inf
        best_j = -1
        for j in range(n):
            dx = qx - points[j, 0]
            dy = qy - points[j, 1]
            dz = qz - points[j, 2]
            d = (dx * dx + dy * dy) + dz * dz
            if d < best:
                best = d
                best_j = j
        idx[i] = best_j
        d2[i] = best
    return idx, d2


def nearest_vertex_numpy(queries, points, chunk=2048):
    """Vectorized fallback; chunked to bound the (chunk, n) workspace."""
    queries = np.ascontiguousarray(queries, dtype=np.float64)
    points = np.ascontiguousarray(points, dtype=np.float64)
    m = queries.shape[0]
    idx = np.empty(m, np.int64)
    d2 = np.empty(m, np.float64)
    for lo in range(0, m, chunk):
        hi = min(lo + chunk, m)
        diff = queries[lo:hi, None, :] - points[None, :, :]
        dist = (diff[..., 0] * diff[..., 0] + diff[..., 1] * diff[..., 1]) + \
            diff[..., 2] * diff[..., 2]
        j = np.argmin(dist, axis=1)
        idx[lo:hi] = j
        d2[lo:hi] = dist[np.arange(hi - lo), j]
    return idx, d2


if USE_NUMBA:
    _nearest_njit = njit(cache=True)(_nearest_loops)

    def nearest_vertex(queries, points):
        queries = np.ascontiguousarray(queries, dtype=np.float64)
        points = np.ascontiguousarray(points, dtype=np.float64)
        return _nearest_njit(queries, points)
else:
    def nearest_vertex(queries, points):
        return nearest_vertex_numpy(queries, points)

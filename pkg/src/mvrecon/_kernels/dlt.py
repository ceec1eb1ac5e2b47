"""Two-view DLT triangulation of RANSAC hypothesis pairs.

Inputs are 3x4 projection matrices and pixel observations; each hypothesis
row gives the indices of the two observations to intersect. Output rows are
Euclidean 3D candidates (NaN when the homogeneous solution is at infinity).
"""

import numpy as np

from ._select import USE_NUMBA, njit


def _dlt_loops(P, pixels, pairs):
    H = pairs.shape[0]
    out = np.empty((H, 3), np.float64)
    A = np.empty((4, 4), np.float64)
    for h in range(H):
        for s in range(2):
            o = pairs[h, s]
            for c in range(4):
                A[2 * s + 0, c] = pixels[o, 0] * P[o, 2, c] - P[o, 0, c]
                A[2 * s + 1, c] = pixels[o, 1] * P[o, 2, c] - P[o, 1, c]
        _, _, Vt = np.linalg.svd(A.copy())
        w = Vt[3]
        if abs(w[3]) < 1e-12:
            out[h, 0] = np.nan
            out[h, 1] = np.nan
            out[h, 2] = np.nan
        else:
            out[h, 0] = w[0] / w[3]
            out[h, 1] = w[1] / w[3]
            out[h, 2] = w[2] / w[3]
    return out


def dlt_triangulate_pairs_numpy(P, pixels, pairs):
    P = np.ascontiguousarray(P, dtype=np.float64)
    pixels = np.ascontiguousarray(pixels, dtype=np.float64)
    pairs = np.ascontiguousarray(pairs, dtype=np.int64)
    H = pairs.shape[0]
    A = np.empty((H, 4, 4), np.float64)
    for s in range(2):
        o = pairs[:, s]
        A[:, 2 * s + 0, :] = pixels[o, 0, None] * P[o, 2, :] - P[o, 0, :]
        A[:, 2 * s + 1, :] = pixels[o, 1, None] * P[o, 2, :] - P[o, 1, :]
    w = np.linalg.svd(A)[2][:, 3, :]
    out = np.full((H, 3), np.nan)
    ok = np.abs(w[:, 3]) >= 1e-12
    out[ok] = w[ok, :3] / w[ok, 3:4]
    return out


if USE_NUMBA:
    _dlt_njit = njit(cache=True)(_dlt_loops)

    def dlt_triangulate_pairs(P, pixels, pairs):
        P = np.ascontiguousarray(P, dtype=np.float64)
        pixels = np.ascontiguousarray(pixels, dtype=np.float64)
        pairs = np.ascontiguousarray(pairs, dtype=np.int64)
        return _dlt_njit(P, pixels, pairs)
else:
    def dlt_triangulate_pairs(P, pixels, pairs):
        return dlt_triangulate_pairs_numpy(P, pixels, pairs)

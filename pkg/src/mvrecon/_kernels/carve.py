"""Silhouette voting for voxel carving.

For every voxel center and camera: project with the pinhole model, look the
mask up at the nearest pixel, and accumulate (a) how many cameras see the
voxel inside their image and (b) how many of those vote foreground.
"""

import numpy as np

from ._select import USE_NUMBA, njit


def _carve_loops(centers, K, R, t, masks):
    n = centers.shape[0]
    ncam = K.shape[0]
    height = masks.shape[1]
    width = masks.shape[2]
    seen = np.zeros(n, np.int32)
    votes = np.zeros(n, np.int32)
    for v in range(n):
        cx = centers[v, 0]
        cy = centers[v, 1]
        cz = centers[v, 2]
        for c in range(ncam):
            z = R[c, 2, 0] * cx + R[c, 2, 1] * cy + R[c, 2, 2] * cz + t[c, 2]
            if z <= 0.0:
                continue
            x = R[c, 0, 0] * cx + R[c, 0, 1] * cy + R[c, 0, 2] * cz + t[c, 0]
            y = R[c, 1, 0] * cx + R[c, 1, 1] * cy + R[c, 1, 2] * cz + t[c, 1]
            xn = x / z
            yn = y / z
            u = K[c, 0, 0] * xn + K[c, 0, 1] * yn + K[c, 0, 2]
            w = K[c, 1, 1] * yn + K[c, 1, 2]
            iu = int(np.rint(u))
            iv = int(np.rint(w))
            if 0 <= iu < width and 0 <= iv < height:
                seen[v] += 1
                if masks[c, iv, iu]:
                    votes[v] += 1
    return seen, votes


def carve_votes_numpy(centers, K, R, t, masks):
    centers = np.ascontiguousarray(centers, dtype=np.float64)
    n = centers.shape[0]
    height, width = masks.shape[1], masks.shape[2]
    seen = np.zeros(n, np.int32)
    votes = np.zeros(n, np.int32)
    X, Y, Z = centers[:, 0], centers[:, 1], centers[:, 2]
    for c in range(K.shape[0]):
        # explicit left-to-right sums so results match the loop path bitwise
        z = R[c, 2, 0] * X + R[c, 2, 1] * Y + R[c, 2, 2] * Z + t[c, 2]
        x = R[c, 0, 0] * X + R[c, 0, 1] * Y + R[c, 0, 2] * Z + t[c, 0]
        y = R[c, 1, 0] * X + R[c, 1, 1] * Y + R[c, 1, 2] * Z + t[c, 1]
        front = z > 0.0
        zsafe = np.where(front, z, 1.0)
        xn = np.where(front, x / zsafe, 0.0)
        yn = np.where(front, y / zsafe, 0.0)
        u = K[c, 0, 0] * xn + K[c, 0, 1] * yn + K[c, 0, 2]
        w = K[c, 1, 1] * yn + K[c, 1, 2]
        iu = np.rint(u).astype(np.int64)
        iv = np.rint(w).astype(np.int64)
        inside = front & (iu >= 0) & (iu < width) & (iv >= 0) & (iv < height)
        seen[inside] += 1
        fg = np.zeros(n, bool)
        fg[inside] = masks[c, iv[inside], iu[inside]]
        votes[fg] += 1
    return seen, votes


if USE_NUMBA:
    _carve_njit = njit(cache=True)(_carve_loops)

    def carve_votes(centers, K, R, t, masks):
        centers = np.ascontiguousarray(centers, dtype=np.float64)
        K = np.ascontiguousarray(K, dtype=np.float64)
        R = np.ascontiguousarray(R, dtype=np.float64)
        t = np.ascontiguousarray(t, dtype=np.float64)
        masks = np.ascontiguousarray(masks, dtype=np.bool_)
        return _carve_njit(centers, K, R, t, masks)
else:
    def carve_votes(centers, K, R, t, masks):
        return carve_votes_numpy(centers, K, R, t, masks)

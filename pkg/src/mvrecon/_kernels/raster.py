"""Software triangle rasterization with a z-buffer.

Two variants: a face-index pass (masks, visibility, part labels) and a
per-vertex color pass with perspective-correct interpolation (synthetic
view rendering). Pixel centers sit at integer coordinates; a pixel is
covered when its center lies inside the triangle (boundary inclusive), and
depth ties keep the earlier face. Faces touching the camera plane
(any vertex depth <= 0) are skipped rather than clipped.
"""

import numpy as np

from ._select import USE_NUMBA, njit


def _faceid_loops(verts, depths, tris, height, width):
    zbuf = np.full((height, width), np.inf, np.float64)
    fid = np.full((height, width), -1, np.int32)
    for f in range(tris.shape[0]):
        i0, i1, i2 = tris[f, 0], tris[f, 1], tris[f, 2]
        z0, z1, z2 = depths[i0], depths[i1], depths[i2]
        if z0 <= 0.0 or z1 <= 0.0 or z2 <= 0.0:
            continue
        x0, y0 = verts[i0, 0], verts[i0, 1]
        x1, y1 = verts[i1, 0], verts[i1, 1]
        x2, y2 = verts[i2, 0], verts[i2, 1]
        denom = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)
        if denom == 0.0:
            continue
        minx = min(x0, min(x1, x2))
        maxx = max(x0, max(x1, x2))
        miny = min(y0, min(y1, y2))
        maxy = max(y0, max(y1, y2))
        ix0 = max(0, int(np.ceil(minx)))
        ix1 = min(width - 1, int(np.floor(maxx)))
        iy0 = max(0, int(np.ceil(miny)))
        iy1 = min(height - 1, int(np.floor(maxy)))
        iz0, iz1_, iz2 = 1.0 / z0, 1.0 / z1, 1.0 / z2
        for py in range(iy0, iy1 + 1):
            for px in range(ix0, ix1 + 1):
                a0 = (x1 - px) * (y2 - py) - (x2 - px) * (y1 - py)
                a1 = (x2 - px) * (y0 - py) - (x0 - px) * (y2 - py)
                a2 = (x0 - px) * (y1 - py) - (x1 - px) * (y0 - py)
                if denom > 0.0:
                    if a0 < 0.0 or a1 < 0.0 or a2 < 0.0:
                        continue
                else:
                    if a0 > 0.0 or a1 > 0.0 or a2 > 0.0:
                        continue
                l0 = a0 / denom
                l1 = a1 / denom
                l2 = a2 / denom
                inv_z = l0 * iz0 + l1 * iz1_ + l2 * iz2
                z = 1.0 / inv_z
                if z < zbuf[py, px]:
                    zbuf[py, px] = z
                    fid[py, px] = f
    return zbuf, fid


def _colors_loops(verts, depths, tris, colors, height, width):
    zbuf = np.full((height, width), np.inf, np.float64)
    img = np.zeros((height, width, 3), np.float64)
    for f in range(tris.shape[0]):
        i0, i1, i2 = tris[f, 0], tris[f, 1], tris[f, 2]
        z0, z1, z2 = depths[i0], depths[i1], depths[i2]
        if z0 <= 0.0 or z1 <= 0.0 or z2 <= 0.0:
            continue
        x0, y0 = verts[i0, 0], verts[i0, 1]
        x1, y1 = verts[i1, 0], verts[i1, 1]
        x2, y2 = verts[i2, 0], verts[i2, 1]
        denom = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)
        if denom == 0.0:
            continue
        minx = min(x0, min(x1, x2))
        maxx = max(x0, max(x1, x2))
        miny = min(y0, min(y1, y2))
        maxy = max(y0, max(y1, y2))
        ix0 = max(0, int(np.ceil(minx)))
        ix1 = min(width - 1, int(np.floor(maxx)))
        iy0 = max(0, int(np.ceil(miny)))
        iy1 = min(height - 1, int(np.floor(maxy)))
        iz0, iz1_, iz2 = 1.0 / z0, 1.0 / z1, 1.0 / z2
        for py in range(iy0, iy1 + 1):
            for px in range(ix0, ix1 + 1):
                a0 = (x1 - px) * (y2 - py) - (x2 - px) * (y1 - py)
                a1 = (x2 - px) * (y0 - py) - (x0 - px) * (y2 - py)
                a2 = (x0 - px) * (y1 - py) - (x1 - px) * (y0 - py)
                if denom > 0.0:
                    if a0 < 0.0 or a1 < 0.0 or a2 < 0.0:
                        continue
                else:
                    if a0 > 0.0 or a1 > 0.0 or a2 > 0.0:
                        continue
                l0 = a0 / denom
                l1 = a1 / denom
                l2 = a2 / denom
                inv_z = l0 * iz0 + l1 * iz1_ + l2 * iz2
                z = 1.0 / inv_z
                if z < zbuf[py, px]:
                    zbuf[py, px] = z
                    for c in range(3):
                        num = (l0 * (colors[i0, c] * iz0) +
                               l1 * (colors[i1, c] * iz1_) +
                               l2 * (colors[i2, c] * iz2))
                        img[py, px, c] = num * z
    return zbuf, img


def _face_pixel_grid(verts, depths, tri, height, width):
    """Shared numpy helper: per-face candidate pixels and barycentrics."""
    i0, i1, i2 = tri
    z0, z1, z2 = depths[i0], depths[i1], depths[i2]
    if z0 <= 0.0 or z1 <= 0.0 or z2 <= 0.0:
        return None
    x0, y0 = verts[i0, 0], verts[i0, 1]
    x1, y1 = verts[i1, 0], verts[i1, 1]
    x2, y2 = verts[i2, 0], verts[i2, 1]
    denom = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)
    if denom == 0.0:
        return None
    ix0 = max(0, int(np.ceil(min(x0, min(x1, x2)))))
    ix1 = min(width - 1, int(np.floor(max(x0, max(x1, x2)))))
    iy0 = max(0, int(np.ceil(min(y0, min(y1, y2)))))
    iy1 = min(height - 1, int(np.floor(max(y0, max(y1, y2)))))
    if ix1 < ix0 or iy1 < iy0:
        return None
    px, py = np.meshgrid(np.arange(ix0, ix1 + 1, dtype=np.float64),
                         np.arange(iy0, iy1 + 1, dtype=np.float64))
    a0 = (x1 - px) * (y2 - py) - (x2 - px) * (y1 - py)
    a1 = (x2 - px) * (y0 - py) - (x0 - px) * (y2 - py)
    a2 = (x0 - px) * (y1 - py) - (x1 - px) * (y0 - py)
    if denom > 0.0:
        inside = (a0 >= 0.0) & (a1 >= 0.0) & (a2 >= 0.0)
    else:
        inside = (a0 <= 0.0) & (a1 <= 0.0) & (a2 <= 0.0)
    if not inside.any():
        return None
    l0 = a0[inside] / denom
    l1 = a1[inside] / denom
    l2 = a2[inside] / denom
    iz0, iz1_, iz2 = 1.0 / z0, 1.0 / z1, 1.0 / z2
    inv_z = l0 * iz0 + l1 * iz1_ + l2 * iz2
    z = 1.0 / inv_z
    rows = (py[inside]).astype(np.int64)
    cols = (px[inside]).astype(np.int64)
    return rows, cols, (l0, l1, l2), (iz0, iz1_, iz2), z


def rasterize_faceid_numpy(verts, depths, tris, height, width):
    verts = np.asarray(verts, dtype=np.float64)
    depths = np.asarray(depths, dtype=np.float64)
    tris = np.asarray(tris, dtype=np.int64)
    zbuf = np.full((height, width), np.inf, np.float64)
    fid = np.full((height, width), -1, np.int32)
    for f in range(tris.shape[0]):
        hit = _face_pixel_grid(verts, depths, tris[f], height, width)
        if hit is None:
            continue
        rows, cols, _, _, z = hit
        closer = z < zbuf[rows, cols]
        zbuf[rows[closer], cols[closer]] = z[closer]
        fid[rows[closer], cols[closer]] = f
    return zbuf, fid


def rasterize_colors_numpy(verts, depths, tris, colors, height, width):
    verts = np.asarray(verts, dtype=np.float64)
    depths = np.asarray(depths, dtype=np.float64)
    tris = np.asarray(tris, dtype=np.int64)
    colors = np.asarray(colors, dtype=np.float64)
    zbuf = np.full((height, width), np.inf, np.float64)
    img = np.zeros((height, width, 3), np.float64)
    for f in range(tris.shape[0]):
        hit = _face_pixel_grid(verts, depths, tris[f], height, width)
        if hit is None:
            continue
        rows, cols, (l0, l1, l2), (iz0, iz1_, iz2), z = hit
        closer = z < zbuf[rows, cols]
        rows, cols = rows[closer], cols[closer]
        zbuf[rows, cols] = z[closer]
        i0, i1, i2 = tris[f]
        for c in range(3):
            num = (l0[closer] * (colors[i0, c] * iz0) +
                   l1[closer] * (colors[i1, c] * iz1_) +
                   l2[closer] * (colors[i2, c] * iz2))
            img[rows, cols, c] = num * z[closer]
    return zbuf, img


if USE_NUMBA:
    _faceid_njit = njit(cache=True)(_faceid_loops)
    _colors_njit = njit(cache=True)(_colors_loops)

    def rasterize_faceid(verts, depths, tris, height, width):
        verts = np.ascontiguousarray(verts, dtype=np.float64)
        depths = np.ascontiguousarray(depths, dtype=np.float64)
        tris = np.ascontiguousarray(tris, dtype=np.int64)
        return _faceid_njit(verts, depths, tris, height, width)

    def rasterize_colors(verts, depths, tris, colors, height, width):
        verts = np.ascontiguousarray(verts, dtype=np.float64)
        depths = np.ascontiguousarray(depths, dtype=np.float64)
        tris = np.ascontiguousarray(tris, dtype=np.int64)
        colors = np.ascontiguousarray(colors, dtype=np.float64)
        return _colors_njit(verts, depths, tris, colors, height, width)
else:
    rasterize_faceid = rasterize_faceid_numpy
    rasterize_colors = rasterize_colors_numpy

"""Small rotation / rigid-alignment toolbox used by every fitting stage.

Conventions:
  * rotations act on column vectors, ``x_new = R @ x``
  * axis-angle vectors ("rotvec") have angle = norm, axis = direction
  * Euler triples are intrinsic XYZ: ``R = Rx(a) @ Ry(b) @ Rz(c)``
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateCorrespondences

__all__ = [
    "skew",
    "normalized",
    "rotvec_to_matrix",
    "matrix_to_rotvec",
    "rotvec_gradients",
    "euler_xyz_to_matrix",
    "matrix_to_euler_xyz",
    "euler_xyz_gradients",
    "polar_rotation",
    "similarity_procrustes",
    "look_at",
    "random_rotation",
]


def skew(v):
    """Cross-product matrix: skew(v) @ u == cross(v, u)."""
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def normalized(v, eps=0.0):
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n <= eps:
        raise ZeroDivisionError("cannot normalize a zero vector")
    return v / n


def rotvec_to_matrix(w):
    """Rodrigues formula, numerically safe near zero angle."""
    w = np.asarray(w, dtype=float)
    theta = np.linalg.norm(w)
    K = skew(w)
    if theta < 1e-12:
        return np.eye(3) + K + 0.5 * (K @ K)
    a = np.sin(theta) / theta
    b = (1.0 - np.cos(theta)) / (theta * theta)
    return np.eye(3) + a * K + b * (K @ K)


def matrix_to_rotvec(R):
    R = np.asarray(R, dtype=float)
    cos_t = np.clip((np.trace(R) - 1.0) / 2.0, -1.0, 1.0)
    theta = np.arccos(cos_t)
    if theta < 1e-12:
        return 0.5 * np.array([R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]])
    if np.pi - theta < 1e-6:
        # near pi the off-diagonal difference vanishes; use the symmetric part
        A = (R + np.eye(3)) / 2.0
        axis = np.sqrt(np.maximum(np.diag(A), 0.0))
        # fix signs from off-diagonals using the largest axis component
        k = int(np.argmax(axis))
        if axis[k] > 0:
            for i in range(3):
                if i != k and A[k, i] < 0:
                    axis[i] = -axis[i]
        axis = axis / np.linalg.norm(axis)
        return theta * axis
    v = np.array([R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]])
    return theta / (2.0 * np.sin(theta)) * v


def rotvec_gradients(w):
    """Return (R, dR) with dR[k] = dR/dw_k for the exponential map.

    Uses the closed form of Gallego & Yezzi; the k-th derivative is
    ((w_k [w]x + [w x (I - R) e_k]x) / |w|^2) @ R, with limit [e_k]x at w=0.
    """
    w = np.asarray(w, dtype=float)
    R = rotvec_to_matrix(w)
    dR = np.empty((3, 3, 3))
    n2 = float(w @ w)
    if n2 < 1e-16:
        for k in range(3):
            e = np.zeros(3)
            e[k] = 1.0
            dR[k] = skew(e)
        return R, dR
    ImR = np.eye(3) - R
    for k in range(3):
        e = np.zeros(3)
        e[k] = 1.0
        dR[k] = (w[k] * skew(w) + skew(np.cross(w, ImR @ e))) @ R / n2
    return R, dR


def _rx(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[1, 0, 0], [0, c, -s], [0, s, c]], dtype=float)


def _ry(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, 0, s], [0, 1, 0], [-s, 0, c]], dtype=float)


def _rz(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]], dtype=float)


def euler_xyz_to_matrix(angles):
    """Intrinsic XYZ Euler angles (radians) to a rotation matrix."""
    a, b, c = np.asarray(angles, dtype=float)
    return _rx(a) @ _ry(b) @ _rz(c)


def matrix_to_euler_xyz(R):
    """Inverse of euler_xyz_to_matrix; returns angles in (-pi, pi]."""
    R = np.asarray(R, dtype=float)
    sb = np.clip(R[0, 2], -1.0, 1.0)
    b = np.arcsin(sb)
    if abs(sb) < 1.0 - 1e-10:
        a = np.arctan2(-R[1, 2], R[2, 2])
        c = np.arctan2(-R[0, 1], R[0, 0])
    else:
        # gimbal lock: fold c into a
        a = np.arctan2(R[1, 0], R[1, 1])
        c = 0.0
    return np.array([a, b, c])


def euler_xyz_gradients(angles):
    """Return (R, dR) with dR[k] = dR/dangle_k for intrinsic XYZ."""
    a, b, c = np.asarray(angles, dtype=float)
    Rx, Ry, Rz = _rx(a), _ry(b), _rz(c)
    ca, sa = np.cos(a), np.sin(a)
    cb, sb = np.cos(b), np.sin(b)
    cc, sc = np.cos(c), np.sin(c)
    dRx = np.array([[0, 0, 0], [0, -sa, -ca], [0, ca, -sa]], dtype=float)
    dRy = np.array([[-sb, 0, cb], [0, 0, 0], [-cb, 0, -sb]], dtype=float)
    dRz = np.array([[-sc, -cc, 0], [cc, -sc, 0], [0, 0, 0]], dtype=float)
    R = Rx @ Ry @ Rz
    dR = np.stack([dRx @ Ry @ Rz, Rx @ dRy @ Rz, Rx @ Ry @ dRz])
    return R, dR


def polar_rotation(M):
    """Nearest rotation matrix in Frobenius norm (det forced to +1)."""
    U, _, Vt = np.linalg.svd(np.asarray(M, dtype=float))
    R = U @ Vt
    if np.linalg.det(R) < 0:
        U = U.copy()
        U[:, -1] = -U[:, -1]
        R = U @ Vt
    return R


def similarity_procrustes(source, target, degeneracy_tol=1e-9):
    """Least-squares similarity aligning source onto target.

    Returns (s, R, t) with target_i ~= s * R @ source_i + t (Umeyama
    construction with the reflection correction).

    Raises DegenerateCorrespondences when fewer than 3 points are given or
    the source points are (numerically) collinear.
    """
    src = np.asarray(source, dtype=float)
    dst = np.asarray(target, dtype=float)
    if src.shape != dst.shape:
        raise DegenerateCorrespondences(
            f"point sets differ in shape: {src.shape} vs {dst.shape}")
    n = src.shape[0]
    if n < 3:
        raise DegenerateCorrespondences(f"need >= 3 correspondences, got {n}")
    mu_s = src.mean(axis=0)
    mu_d = dst.mean(axis=0)
    ds = src - mu_s
    dd = dst - mu_d
    cov = dd.T @ ds / n
    U, d, Vt = np.linalg.svd(cov)
    var_s = (ds * ds).sum() / n
    if var_s <= 0 or d[1] <= degeneracy_tol * max(d[0], degeneracy_tol):
        raise DegenerateCorrespondences("source points are collinear or coincident")
    S = np.eye(3)
    if np.linalg.det(U) * np.linalg.det(Vt) < 0:
        S[2, 2] = -1.0
    R = U @ S @ Vt
    s = float((d * np.diag(S)).sum() / var_s)
    t = mu_d - s * R @ mu_s
    return s, R, t


def look_at(position, target, up=(0.0, 0.0, 1.0)):
    """World-to-camera rotation for a camera at `position` aimed at `target`.

    Row convention: R rows are the camera x (right), y (down), z (forward)
    axes expressed in world coordinates; t = -R @ position.
    """
    position = np.asarray(position, dtype=float)
    forward = normalized(np.asarray(target, dtype=float) - position)
    up = np.asarray(up, dtype=float)
    right = np.cross(forward, up)
    if np.linalg.norm(right) < 1e-9:
        # forward parallel to up: fall back to a different reference
        up = np.array([0.0, 1.0, 0.0])
        right = np.cross(forward, up)
    right = normalized(right)
    down = np.cross(forward, right)
    R = np.stack([right, down, forward])
    t = -R @ position
    return R, t


def random_rotation(rng):
    """Uniform random rotation (QR of a Gaussian matrix, det fixed)."""
    A = rng.standard_normal((3, 3))
    Q, r = np.linalg.qr(A)
    Q = Q * np.sign(np.diag(r))
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q

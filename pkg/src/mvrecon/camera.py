"""Calibrated pinhole cameras and the multi-camera rig.

A camera stores the world-to-camera rotation/translation and an
upper-triangular intrinsic matrix in pixels. Pixel coordinates follow the
usual image convention: x right, y down, pixel centers at integers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BehindCamera,
    DuplicateCameraId,
    NonOrthonormalRotation,
    SchemaMismatch,
)

DEFAULT_SYNC_BOUND_MS = 7.0


@dataclass(frozen=True)
class Camera:
    id: str
    intrinsics: np.ndarray        # (3,3) upper-triangular, focal/pp in px
    rotation: np.ndarray          # (3,3) world-to-camera
    translation: np.ndarray       # (3,) meters
    image_size: tuple[int, int]   # (width, height) px
    sync_offset_ms: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "intrinsics", np.asarray(self.intrinsics, dtype=float))
        object.__setattr__(self, "rotation", np.asarray(self.rotation, dtype=float))
        object.__setattr__(self, "translation", np.asarray(self.translation, dtype=float))

    def validate(self, sync_bound_ms: float = DEFAULT_SYNC_BOUND_MS):
        K, R = self.intrinsics, self.rotation
        if K.shape != (3, 3) or R.shape != (3, 3) or self.translation.shape != (3,):
            raise SchemaMismatch(f"camera {self.id}: matrix shapes are wrong")
        lower = np.array([K[1, 0], K[2, 0], K[2, 1]])
        if np.any(np.abs(lower) > 1e-9) or abs(K[2, 2] - 1.0) > 1e-9:
            raise SchemaMismatch(
                f"camera {self.id}: intrinsics not upper-triangular with K[2,2]=1")
        if K[0, 0] <= 0 or K[1, 1] <= 0:
            raise SchemaMismatch(
                f"camera {self.id}: focal lengths must be positive")
        err = np.abs(R.T @ R - np.eye(3)).max()
        if err > 1e-8 or abs(np.linalg.det(R) - 1.0) > 1e-8:
            raise NonOrthonormalRotation(
                f"camera {self.id}: rotation not orthonormal with det 1 "
                f"(orthonormality error {err:.3g}, det {np.linalg.det(R):.6f})")
        if abs(self.sync_offset_ms) > sync_bound_ms:
            raise SchemaMismatch(
                f"camera {self.id}: sync offset {self.sync_offset_ms} ms exceeds "
                f"bound {sync_bound_ms} ms")
        w, h = self.image_size
        if w <= 0 or h <= 0:
            raise SchemaMismatch(f"camera {self.id}: bad image size")

    @property
    def center(self) -> np.ndarray:
        """Camera center in world coordinates."""
        return -self.rotation.T @ self.translation

    @property
    def projection_matrix(self) -> np.ndarray:
        """3x4 matrix K [R | t]."""
        return self.intrinsics @ np.hstack([self.rotation, self.translation[:, None]])

    def camera_coords(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return pts @ self.rotation.T + self.translation

    def project(self, point) -> np.ndarray:
        """Project one world point; raises BehindCamera when depth <= 0."""
        p = self.camera_coords(point)[0]
        if p[2] <= 0:
            raise BehindCamera(
                f"camera {self.id}: point has non-positive depth {p[2]:.6g}")
        uvw = self.intrinsics @ p
        return uvw[:2] / uvw[2]

    def project_many(self, points):
        """Vectorized projection; returns (pixels (N,2), depths (N,)).

        Points at depth <= 0 get NaN pixels instead of raising.
        """
        cam = self.camera_coords(points)
        z = cam[:, 2]
        front = z > 0
        uvw = cam @ self.intrinsics.T
        px = np.full((cam.shape[0], 2), np.nan)
        px[front] = uvw[front, :2] / uvw[front, 2:3]
        return px, z


def project(camera: Camera, point):
    """Functional alias for Camera.project."""
    return camera.project(point)


@dataclass
class CameraRig:
    cameras: list[Camera]
    reference_camera: str
    _by_id: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._by_id = {}
        for cam in self.cameras:
            if cam.id in self._by_id:
                raise DuplicateCameraId(f"camera id {cam.id!r} appears twice")
            self._by_id[cam.id] = cam

    def validate(self, sync_bound_ms: float = DEFAULT_SYNC_BOUND_MS):
        if len(self.cameras) < 2:
            raise SchemaMismatch("a rig needs at least 2 cameras")
        if self.reference_camera not in self._by_id:
            raise SchemaMismatch(
                f"reference camera {self.reference_camera!r} not in rig")
        for cam in self.cameras:
            cam.validate(sync_bound_ms)

    def __len__(self):
        return len(self.cameras)

    def __contains__(self, cam_id: str):
        return cam_id in self._by_id

    def __getitem__(self, cam_id: str) -> Camera:
        return self._by_id[cam_id]

    @property
    def camera_ids(self):
        return [c.id for c in self.cameras]

"""Head coordinate frame, gaze direction, and face-crop geometry.

The head frame is anchored at the eye midpoint: x along the eye line,
z forward (perpendicular to the eyes-chin plane), y = z x x. Gaze is the
unit vector toward a world point of regard, expressed in head coordinates.
A face cylinder (axis along head y) covering all facial landmarks drives
rectified face / eye crop boxes per camera.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .camera import Camera
from .errors import BehindCamera, CoincidentTarget, DegenerateFace

DEFAULT_CYLINDER_MARGIN = 0.1
DEFAULT_MIN_RADIUS = 0.01   # meters
DEFAULT_EYE_PAD_PX = 12.0


@dataclass(frozen=True)
class GazeIndexConfig:
    """Which facial landmark indices play each geometric role.

    Detector schemas differ, so these are data, not constants. Defaults
    match the synthetic face schema used by the test oracle.
    """
    left_eye: int = 0
    right_eye: int = 1
    chin: int = 2
    left_contour: int = 3
    right_contour: int = 4


@dataclass
class HeadFrame:
    origin: np.ndarray
    a_x: np.ndarray
    a_y: np.ndarray
    a_z: np.ndarray

    @property
    def rotation(self) -> np.ndarray:
        """World-to-head rotation; rows are the head axes."""
        return np.stack([self.a_x, self.a_y, self.a_z])


@dataclass
class GazeSample:
    direction: np.ndarray      # unit, in head coordinates
    point_of_regard: np.ndarray


@dataclass
class FaceCylinder:
    center: np.ndarray
    axis: np.ndarray
    radius: float
    height: float


@dataclass
class CropBoxes:
    """Per-camera rectified boxes: arrays are (min_u, min_v, max_u, max_v)."""
    face_box: dict[str, np.ndarray]
    eye_box: dict[str, np.ndarray]
    rectifying_rotation: dict[str, float]  # radians


def head_frame(p_left_eye, p_right_eye, p_chin, tol: float = 1e-12) -> HeadFrame:
    """Build the head frame from the two eyes and the chin point."""
    p_l = np.asarray(p_left_eye, dtype=float)
    p_r = np.asarray(p_right_eye, dtype=float)
    p_c = np.asarray(p_chin, dtype=float)
    origin = (p_l + p_r) / 2.0
    ex = p_l - origin
    nx = np.linalg.norm(ex)
    if nx < tol:
        raise DegenerateFace("eye landmarks coincide")
    a_x = ex / nx
    cz = np.cross(p_c - origin, a_x)
    nz = np.linalg.norm(cz)
    if nz < tol:
        raise DegenerateFace("chin is collinear with the eye line")
    a_z = cz / nz
    a_y = np.cross(a_z, a_x)
    return HeadFrame(origin, a_x, a_y, a_z)


def head_frame_from_landmarks(landmarks: dict[int, np.ndarray],
                              indices: GazeIndexConfig = GazeIndexConfig()) -> HeadFrame:
    try:
        return head_frame(landmarks[indices.left_eye],
                          landmarks[indices.right_eye],
                          landmarks[indices.chin])
    except KeyError as e:
        raise DegenerateFace(f"landmark {e.args[0]} needed for the head frame "
                             "is missing") from None


def gaze_direction(frame: HeadFrame, point_of_regard) -> GazeSample:
    m = np.asarray(point_of_regard, dtype=float)
    d = m - frame.origin
    n = np.linalg.norm(d)
    if n < 1e-12:
        raise CoincidentTarget("point of regard coincides with the head origin")
    return GazeSample(frame.rotation @ (d / n), m)


def fit_cylinder(landmarks, frame: HeadFrame,
                 indices: GazeIndexConfig = GazeIndexConfig(),
                 margin: float = DEFAULT_CYLINDER_MARGIN,
                 min_radius: float = DEFAULT_MIN_RADIUS) -> FaceCylinder:
    """Cylinder along the head y-axis covering every facial landmark.

    `landmarks` maps landmark index -> 3D position and must include the
    leftmost/rightmost contour points, whose midpoint is the center.
    """
    if len(landmarks) < 3:
        raise DegenerateFace(f"need >= 3 landmarks, got {len(landmarks)}")
    try:
        left = np.asarray(landmarks[indices.left_contour], dtype=float)
        right = np.asarray(landmarks[indices.right_contour], dtype=float)
    except KeyError as e:
        raise DegenerateFace(f"contour landmark {e.args[0]} missing") from None
    center = (left + right) / 2.0
    pts = np.stack([np.asarray(p, dtype=float) for _, p in sorted(landmarks.items())])
    rel = pts - center
    axial = rel @ frame.a_y
    radial = np.linalg.norm(rel - axial[:, None] * frame.a_y[None, :], axis=1)
    radius = max(float(radial.max()) * (1.0 + margin), min_radius)
    half = max(float(np.abs(axial).max()) * (1.0 + margin), min_radius)
    return FaceCylinder(center, frame.a_y.copy(), radius, 2.0 * half)


def _cylinder_samples(cyl: FaceCylinder, n: int = 64) -> np.ndarray:
    """Points on the two rim circles plus the axis endpoints."""
    axis = cyl.axis / np.linalg.norm(cyl.axis)
    ref = np.array([1.0, 0.0, 0.0])
    if abs(axis @ ref) > 0.9:
        ref = np.array([0.0, 1.0, 0.0])
    u = np.cross(axis, ref)
    u /= np.linalg.norm(u)
    v = np.cross(axis, u)
    phi = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    ring = cyl.radius * (np.cos(phi)[:, None] * u + np.sin(phi)[:, None] * v)
    half = 0.5 * cyl.height * axis
    top = cyl.center + half + ring
    bottom = cyl.center - half + ring
    caps = np.stack([cyl.center + half, cyl.center - half])
    return np.concatenate([top, bottom, caps])


def _rotate_about(points, center, angle):
    c, s = np.cos(angle), np.sin(angle)
    R = np.array([[c, -s], [s, c]])
    return (points - center) @ R.T + center


def crop_regions(cylinder: FaceCylinder, p_left_eye, p_right_eye,
                 camera: Camera, eye_pad_px: float = DEFAULT_EYE_PAD_PX,
                 rim_samples: int = 64) -> CropBoxes:
    """Rectified face and eye boxes for one camera.

    The rectifying rotation (about the principal point) turns the projected
    cylinder axis upright (pointing toward -v); boxes are axis-aligned in
    the rotated frame. The eye box is clipped into the face box.
    """
    samples = _cylinder_samples(cylinder, rim_samples)
    px, z = camera.project_many(samples)
    if np.any(z <= 0):
        raise BehindCamera(f"camera {camera.id}: face cylinder extends behind "
                           "the camera")
    half = 0.5 * cylinder.height * cylinder.axis
    top_px, zt = camera.project_many((cylinder.center + half)[None, :])
    bot_px, zb = camera.project_many((cylinder.center - half)[None, :])
    d = top_px[0] - bot_px[0]
    if np.linalg.norm(d) < 1e-12:
        angle = 0.0
    else:
        # wanted: rotated axis points along -v (image up)
        angle = -np.pi / 2.0 - np.arctan2(d[1], d[0])
    angle = float((angle + np.pi) % (2.0 * np.pi) - np.pi)

    pp = camera.intrinsics[:2, 2]
    rot = _rotate_about(px, pp, angle)
    face_box = np.array([rot[:, 0].min(), rot[:, 1].min(),
                         rot[:, 0].max(), rot[:, 1].max()])

    eyes = np.stack([np.asarray(p_left_eye, dtype=float),
                     np.asarray(p_right_eye, dtype=float)])
    eye_px, eye_z = camera.project_many(eyes)
    if np.any(eye_z <= 0):
        raise BehindCamera(f"camera {camera.id}: eyes behind the camera")
    eye_rot = _rotate_about(eye_px, pp, angle)
    eye_box = np.array([eye_rot[:, 0].min() - eye_pad_px,
                        eye_rot[:, 1].min() - eye_pad_px,
                        eye_rot[:, 0].max() + eye_pad_px,
                        eye_rot[:, 1].max() + eye_pad_px])
    eye_box[0] = max(eye_box[0], face_box[0])
    eye_box[1] = max(eye_box[1], face_box[1])
    eye_box[2] = min(eye_box[2], face_box[2])
    eye_box[3] = min(eye_box[3], face_box[3])
    return CropBoxes({camera.id: face_box}, {camera.id: eye_box},
                     {camera.id: angle})


def crop_regions_for_rig(cylinder: FaceCylinder, p_left_eye, p_right_eye,
                         cameras, eye_pad_px: float = DEFAULT_EYE_PAD_PX) -> CropBoxes:
    """Crop boxes for every camera that sees the cylinder in front of it."""
    out = CropBoxes({}, {}, {})
    for cam in cameras:
        try:
            one = crop_regions(cylinder, p_left_eye, p_right_eye, cam,
                               eye_pad_px)
        except BehindCamera:
            continue
        out.face_box.update(one.face_box)
        out.eye_box.update(one.eye_box)
        out.rectifying_rotation.update(one.rectifying_rotation)
    return out

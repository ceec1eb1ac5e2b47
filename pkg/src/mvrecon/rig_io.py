"""On-disk formats: rig files, per-frame keypoint files, and mask images.

Layout (all under a dataset root):

    rig.json                             camera rig
    markers.json                         gaze target positions (tag id -> xyz)
    frame_000123/{cam_id}.kp.json        2D detections for one camera
    frame_000123/{cam_id}.mask.png       binary mask (single channel, 0/255)

JSON numbers round-trip bit-exactly (Python emits shortest-repr floats),
which the save/load tests rely on.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .camera import DEFAULT_SYNC_BOUND_MS, Camera, CameraRig
from .errors import MaskSizeMismatch, MissingField, SchemaMismatch

RIG_SCHEMA = "mvrecon-rig"
KEYPOINT_SCHEMA = "mvrecon-keypoints"
SCHEMA_VERSION = 1

KIND_BODY = "body"
KIND_FACE = "face"
KIND_LEFT_HAND = "left_hand"
KIND_RIGHT_HAND = "right_hand"
KEYPOINT_KINDS = (KIND_BODY, KIND_FACE, KIND_LEFT_HAND, KIND_RIGHT_HAND)


@dataclass(frozen=True)
class KeypointSchema:
    """Landmark counts per detection kind (face size is configurable)."""
    body_size: int = 18
    face_size: int = 70
    hand_size: int = 21

    def size_of(self, kind: str) -> int:
        if kind == KIND_BODY:
            return self.body_size
        if kind == KIND_FACE:
            return self.face_size
        return self.hand_size


@dataclass
class KeypointSet2D:
    """One detected landmark set in one view.

    points rows are (landmark_index, x_px, y_px, confidence).
    """
    kind: str
    points: np.ndarray
    person_hint: int | None = None

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float).reshape(-1, 4)

    def validate(self, schema: KeypointSchema):
        if self.kind not in KEYPOINT_KINDS:
            raise SchemaMismatch(f"unknown keypoint kind {self.kind!r}")
        idx = self.points[:, 0]
        if len(np.unique(idx.astype(int))) != len(idx):
            raise SchemaMismatch(f"{self.kind}: duplicate landmark indices")
        if np.any(idx != np.round(idx)) or np.any(idx < 0):
            raise SchemaMismatch(f"{self.kind}: landmark indices must be ints >= 0")
        size = schema.size_of(self.kind)
        if np.any(idx >= size):
            raise SchemaMismatch(
                f"{self.kind}: landmark index out of range for schema size {size}")

    def indices(self):
        return self.points[:, 0].astype(int)

    def pixels(self):
        return self.points[:, 1:3]

    def confidences(self):
        return self.points[:, 3]


@dataclass
class FrameBundle:
    frame_index: int
    detections: dict[str, list[KeypointSet2D]] = field(default_factory=dict)
    masks: dict[str, np.ndarray] = field(default_factory=dict)


# ---------------------------------------------------------------------------
# rig file

def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise MissingField(f"{where}: missing field {key!r}")
    return obj[key]


def _camera_to_dict(cam: Camera) -> dict:
    return {
        "id": cam.id,
        "intrinsics": cam.intrinsics.tolist(),
        "rotation": cam.rotation.tolist(),
        "translation": cam.translation.tolist(),
        "image_size": [int(cam.image_size[0]), int(cam.image_size[1])],
        "sync_offset_ms": float(cam.sync_offset_ms),
    }


def _camera_from_dict(obj: dict) -> Camera:
    where = f"camera {obj.get('id', '?')}"
    return Camera(
        id=str(_require(obj, "id", "camera")),
        intrinsics=np.array(_require(obj, "intrinsics", where), dtype=float),
        rotation=np.array(_require(obj, "rotation", where), dtype=float),
        translation=np.array(_require(obj, "translation", where), dtype=float),
        image_size=tuple(int(v) for v in _require(obj, "image_size", where)),
        sync_offset_ms=float(obj.get("sync_offset_ms", 0.0)),
    )


def save_rig(rig: CameraRig, path) -> None:
    doc = {
        "schema": RIG_SCHEMA,
        "version": SCHEMA_VERSION,
        "reference_camera": rig.reference_camera,
        "cameras": [_camera_to_dict(c) for c in rig.cameras],
    }
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True))


def load_rig(path, sync_bound_ms: float = DEFAULT_SYNC_BOUND_MS) -> CameraRig:
    """Load and fully validate a rig file."""
    doc = json.loads(Path(path).read_text())
    if doc.get("schema") != RIG_SCHEMA:
        raise SchemaMismatch(f"{path}: not a rig file (schema={doc.get('schema')!r})")
    if doc.get("version") != SCHEMA_VERSION:
        raise SchemaMismatch(f"{path}: unsupported version {doc.get('version')!r}")
    cams = [_camera_from_dict(c) for c in _require(doc, "cameras", str(path))]
    rig = CameraRig(cams, reference_camera=_require(doc, "reference_camera", str(path)))
    rig.validate(sync_bound_ms)
    return rig


# ---------------------------------------------------------------------------
# per-frame detections + masks

def frame_dir(root, frame_index: int) -> Path:
    return Path(root) / f"frame_{frame_index:06d}"


def save_mask(mask: np.ndarray, path) -> None:
    arr = (np.asarray(mask).astype(np.uint8)) * 255
    Image.fromarray(arr, mode="L").save(path)


def load_mask(path) -> np.ndarray:
    img = Image.open(path)
    if img.mode != "L":
        img = img.convert("L")
    return np.asarray(img) >= 128


def save_keypoint_file(sets: list[KeypointSet2D], path) -> None:
    doc = {
        "schema": KEYPOINT_SCHEMA,
        "version": SCHEMA_VERSION,
        "sets": [
            {
                "kind": s.kind,
                "person_hint": s.person_hint,
                "points": s.points.tolist(),
            }
            for s in sets
        ],
    }
    Path(path).write_text(json.dumps(doc, sort_keys=True))


def load_keypoint_file(path, schema: KeypointSchema) -> list[KeypointSet2D]:
    doc = json.loads(Path(path).read_text())
    if doc.get("schema") != KEYPOINT_SCHEMA:
        raise SchemaMismatch(f"{path}: not a keypoint file")
    if doc.get("version") != SCHEMA_VERSION:
        raise SchemaMismatch(f"{path}: unsupported version {doc.get('version')!r}")
    out = []
    for raw in doc.get("sets", []):
        points = np.asarray(_require(raw, "points", str(path)), dtype=float)
        points = points.reshape(-1, 4)
        # clamp confidences on ingest; upstream detectors overshoot
        points[:, 3] = np.clip(points[:, 3], 0.0, 1.0)
        ks = KeypointSet2D(
            kind=_require(raw, "kind", str(path)),
            points=points,
            person_hint=raw.get("person_hint"),
        )
        ks.validate(schema)
        out.append(ks)
    return out


def save_frame_bundle(bundle: FrameBundle, root) -> None:
    d = frame_dir(root, bundle.frame_index)
    d.mkdir(parents=True, exist_ok=True)
    for cam_id, sets in sorted(bundle.detections.items()):
        save_keypoint_file(sets, d / f"{cam_id}.kp.json")
    for cam_id, mask in sorted(bundle.masks.items()):
        save_mask(mask, d / f"{cam_id}.mask.png")


def load_frame_bundle(rig: CameraRig, frame_index: int, root,
                      schema: KeypointSchema | None = None) -> FrameBundle:
    """Collect all per-camera files for one frame.

    Cameras with no keypoint file, or an empty one, are simply absent from
    the bundle. Masks are optional per camera but must match image size.
    """
    schema = schema or KeypointSchema()
    d = frame_dir(root, frame_index)
    bundle = FrameBundle(frame_index=frame_index)
    for cam in rig.cameras:
        kp_path = d / f"{cam.id}.kp.json"
        if kp_path.exists():
            sets = load_keypoint_file(kp_path, schema)
            if sets:
                bundle.detections[cam.id] = sets
        mask_path = d / f"{cam.id}.mask.png"
        if mask_path.exists():
            mask = load_mask(mask_path)
            w, h = cam.image_size
            if mask.shape != (h, w):
                raise MaskSizeMismatch(
                    f"frame {frame_index} camera {cam.id}: mask is "
                    f"{mask.shape[1]}x{mask.shape[0]}, camera is {w}x{h}")
            bundle.masks[cam.id] = mask
    return bundle


# ---------------------------------------------------------------------------
# gaze marker file

def save_markers(markers: dict[str, np.ndarray], path) -> None:
    doc = {
        "schema": "mvrecon-markers",
        "version": SCHEMA_VERSION,
        "markers": {k: np.asarray(v, dtype=float).tolist() for k, v in markers.items()},
    }
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True))


def load_markers(path) -> dict[str, np.ndarray]:
    doc = json.loads(Path(path).read_text())
    if doc.get("schema") != "mvrecon-markers":
        raise SchemaMismatch(f"{path}: not a marker file")
    return {k: np.asarray(v, dtype=float) for k, v in doc.get("markers", {}).items()}

"""Robust multiview triangulation and cross-view person association.

Per landmark: RANSAC over minimal two-view DLT hypotheses, then a damped
least-squares refinement of the reprojection error over the consensus
inliers, weighted by detection confidence. People are grouped across views
greedily by the triangulation inlier count of their torso keypoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ._kernels import dlt_triangulate_pairs
from .camera import CameraRig
from .errors import InsufficientViews, NoConsensus, SchemaMismatch
from .rig_io import (
    KIND_BODY,
    KIND_FACE,
    KIND_LEFT_HAND,
    KIND_RIGHT_HAND,
    FrameBundle,
    KeypointSet2D,
)

DEFAULT_TORSO_INDICES = (1, 2, 5, 8, 11)  # neck, both shoulders, both hips

_KIND_CODE = {KIND_BODY: 0, KIND_FACE: 1, KIND_LEFT_HAND: 2, KIND_RIGHT_HAND: 3}


@dataclass(frozen=True)
class Observation:
    camera_id: str
    pixel: np.ndarray
    confidence: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "pixel", np.asarray(self.pixel, dtype=float))


@dataclass
class Landmark3D:
    landmark_index: int
    position: np.ndarray
    inlier_cameras: tuple[str, ...]
    reprojection_rmse: float

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float)


@dataclass
class SkeletonFrame:
    person_id: int
    body: dict[int, Landmark3D] = field(default_factory=dict)
    face: dict[int, Landmark3D] = field(default_factory=dict)
    left_hand: dict[int, Landmark3D] = field(default_factory=dict)
    right_hand: dict[int, Landmark3D] = field(default_factory=dict)
    failures: dict[str, dict[int, str]] = field(default_factory=dict)

    def landmarks(self, kind: str) -> dict[int, Landmark3D]:
        return {
            KIND_BODY: self.body,
            KIND_FACE: self.face,
            KIND_LEFT_HAND: self.left_hand,
            KIND_RIGHT_HAND: self.right_hand,
        }[kind]


@dataclass(frozen=True)
class RansacConfig:
    max_iterations: int = 200
    inlier_threshold_px: float = 4.0
    min_inlier_views: int = 3
    rng_seed: int = 0
    confidence_floor: float = 0.05
    hand_min_inlier_views: int = 2
    degenerate_angle_deg: float = 1.0
    refine_max_iterations: int = 50
    refine_step_tol: float = 1e-10

    def validate(self):
        if self.inlier_threshold_px <= 0:
            raise SchemaMismatch("inlier threshold must be > 0")
        if self.min_inlier_views < 2 or self.hand_min_inlier_views < 2:
            raise SchemaMismatch("min inlier views must be >= 2")
        if self.max_iterations < 1:
            raise SchemaMismatch("need at least one RANSAC iteration")


def _projection_stack(rig: CameraRig, observations) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    P = np.stack([rig[o.camera_id].projection_matrix for o in observations])
    pixels = np.stack([o.pixel for o in observations])
    weights = np.array([o.confidence for o in observations])
    return P, pixels, weights


def _rays(rig: CameraRig, observations) -> np.ndarray:
    """World-space unit back-projection ray per observation."""
    dirs = np.empty((len(observations), 3))
    for i, o in enumerate(observations):
        cam = rig[o.camera_id]
        d = np.linalg.solve(cam.intrinsics, np.array([o.pixel[0], o.pixel[1], 1.0]))
        d = cam.rotation.T @ d
        dirs[i] = d / np.linalg.norm(d)
    return dirs


def _reprojection_errors(P, pixels, X):
    """Squared pixel errors of candidates X (H,3) in every view (H,n)."""
    Xh = np.concatenate([X, np.ones((X.shape[0], 1))], axis=1)
    proj = np.einsum("nrc,hc->hnr", P, Xh)
    w = proj[:, :, 2]
    ok = w > 1e-12
    wsafe = np.where(ok, w, 1.0)
    u = proj[:, :, 0] / wsafe
    v = proj[:, :, 1] / wsafe
    du = u - pixels[None, :, 0]
    dv = v - pixels[None, :, 1]
    err2 = du * du + dv * dv
    err2[~ok] = np.inf
    return err2


def _refine_point(P, pixels, weights, X0, config: RansacConfig):
    """Damped Gauss-Newton on the weighted reprojection error."""

    def residuals(X):
        Xh = np.append(X, 1.0)
        proj = P @ Xh
        w = proj[:, 2]
        if np.any(w <= 1e-12):
            return None, None
        u = proj[:, 0] / w
        v = proj[:, 1] / w
        r = np.stack([u - pixels[:, 0], v - pixels[:, 1]], axis=1)
        # d(u)/dX = (P0 - u P2)/w, likewise for v
        Ju = (P[:, 0, :3] - u[:, None] * P[:, 2, :3]) / w[:, None]
        Jv = (P[:, 1, :3] - v[:, None] * P[:, 2, :3]) / w[:, None]
        sw = np.sqrt(weights)[:, None]
        res = (r * sw).ravel()
        J = np.stack([Ju, Jv], axis=1).reshape(-1, 3) * np.repeat(sw, 2, axis=0)
        return res, J

    X = X0.astype(float).copy()
    res, J = residuals(X)
    if res is None:
        return X
    cost = float(res @ res)
    damping = 1e-4
    for _ in range(config.refine_max_iterations):
        H = J.T @ J + damping * np.eye(3)
        g = J.T @ res
        try:
            step = np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            break
        X_try = X - step
        res_try, J_try = residuals(X_try)
        if res_try is not None and float(res_try @ res_try) < cost:
            X = X_try
            res, J = res_try, J_try
            cost = float(res_try @ res_try)
            damping = max(damping * 0.5, 1e-12)
        else:
            damping *= 10.0
        if np.linalg.norm(step) < config.refine_step_tol:
            break
    return X


def triangulate(observations, rig: CameraRig, config: RansacConfig,
                landmark_index: int = -1) -> Landmark3D:
    """RANSAC + refined triangulation of one landmark.

    Raises InsufficientViews with < 2 usable observations and NoConsensus
    when the best hypothesis has fewer inliers than min_inlier_views.
    Deterministic for a fixed config.rng_seed and observation order.
    """
    config.validate()
    obs = [o for o in observations if o.confidence >= config.confidence_floor]
    n = len(obs)
    if n < 2:
        raise InsufficientViews(f"{n} usable observation(s); need >= 2")
    P, pixels, weights = _projection_stack(rig, obs)

    rng = np.random.default_rng(np.random.SeedSequence(config.rng_seed))
    H = config.max_iterations
    a = rng.integers(0, n, H)
    b = rng.integers(0, n - 1, H)
    b = b + (b >= a)
    pairs = np.stack([a, b], axis=1)

    rays = _rays(rig, obs)
    cosang = np.abs(np.sum(rays[pairs[:, 0]] * rays[pairs[:, 1]], axis=1))
    valid = cosang <= math.cos(math.radians(config.degenerate_angle_deg))
    if not valid.any():
        raise NoConsensus("all hypothesis pairs are degenerate (near-parallel rays)")
    pairs = pairs[valid]

    candidates = dlt_triangulate_pairs(P, pixels, pairs)
    finite = np.isfinite(candidates).all(axis=1)
    if not finite.any():
        raise NoConsensus("no finite triangulation hypothesis")
    candidates = candidates[finite]

    err2 = _reprojection_errors(P, pixels, candidates)
    inlier = err2 <= config.inlier_threshold_px ** 2
    counts = inlier.sum(axis=1)
    best = int(np.argmax(counts))
    if counts[best] < config.min_inlier_views:
        raise NoConsensus(
            f"best hypothesis has {counts[best]} inliers; "
            f"need {config.min_inlier_views}")

    mask = inlier[best]
    X = _refine_point(P[mask], pixels[mask], weights[mask], candidates[best], config)

    final_err2 = _reprojection_errors(P[mask], pixels[mask], X[None, :])[0]
    rmse = float(np.sqrt(final_err2.mean()))
    inlier_ids = tuple(obs[i].camera_id for i in np.flatnonzero(mask))
    return Landmark3D(landmark_index, X, inlier_ids, rmse)


# ---------------------------------------------------------------------------
# person association

@dataclass
class PersonGroup:
    """Body detections across views believed to be the same person."""
    members: list[tuple[str, int]]  # (camera_id, index into that camera's sets)

    def cameras(self):
        return [m[0] for m in self.members]


@dataclass
class AssociationResult:
    groups: list[PersonGroup]
    ungrouped: list[tuple[str, int]]


def _body_sets(frame: FrameBundle) -> list[tuple[str, int, KeypointSet2D]]:
    out = []
    for cam_id in sorted(frame.detections):
        for i, ks in enumerate(frame.detections[cam_id]):
            if ks.kind == KIND_BODY:
                out.append((cam_id, i, ks))
    return out


def _torso_observations(members, frame, torso_indices, floor):
    """Per torso landmark: list of Observation over the member detections."""
    per_landmark = {idx: [] for idx in torso_indices}
    for cam_id, set_idx in members:
        ks = frame.detections[cam_id][set_idx]
        indices = ks.indices()
        pix = ks.pixels()
        conf = ks.confidences()
        for j, idx in enumerate(indices):
            if idx in per_landmark and conf[j] >= floor:
                per_landmark[idx].append(Observation(cam_id, pix[j], conf[j]))
    return per_landmark


def _torso_inlier_count(members, frame, rig, config, torso_indices):
    assoc_cfg = replace(config, min_inlier_views=2,
                        max_iterations=min(config.max_iterations, 64))
    per_landmark = _torso_observations(members, frame, torso_indices,
                                       config.confidence_floor)
    total = 0
    for idx, obs in per_landmark.items():
        if len(obs) < 2:
            continue
        cfg = replace(assoc_cfg, rng_seed=_mix_seed(config.rng_seed, 97, idx))
        try:
            lm = triangulate(obs, rig, cfg, landmark_index=idx)
        except (InsufficientViews, NoConsensus):
            continue
        total += len(lm.inlier_cameras)
    return total


def _mix_seed(*parts) -> int:
    return int(np.random.SeedSequence(list(parts)).generate_state(1)[0])


def associate_people(frame: FrameBundle, rig: CameraRig, config: RansacConfig,
                     torso_indices=DEFAULT_TORSO_INDICES) -> AssociationResult:
    """Greedy cross-view grouping of body detections.

    Starting from the first unassigned detection (cameras in sorted id
    order), each remaining camera contributes the candidate that maximizes
    the torso triangulation inlier count; a candidate joins only when the
    gain clears a floor scaled by how many torso landmarks it carries.
    Detections that never pair up are returned ungrouped.
    """
    body = _body_sets(frame)
    unassigned = {(cam_id, i) for cam_id, i, _ in body}
    order = [(cam_id, i) for cam_id, i, _ in body]
    cam_order = sorted({cam_id for cam_id, _, _ in body})
    groups: list[PersonGroup] = []
    ungrouped: list[tuple[str, int]] = []

    for seed in order:
        if seed not in unassigned:
            continue
        unassigned.discard(seed)
        members = [seed]
        score = 0
        for cam_id in cam_order:
            if cam_id == seed[0]:
                continue
            cands = [key for key in order
                     if key in unassigned and key[0] == cam_id]
            if not cands:
                continue
            best_key, best_gain, best_score = None, 0, score
            for key in cands:
                trial = _torso_inlier_count(members + [key], frame, rig, config,
                                            torso_indices)
                gain = trial - score
                ks = frame.detections[key[0]][key[1]]
                torso_present = sum(1 for idx in ks.indices() if idx in torso_indices)
                floor = max(2, math.ceil(0.6 * torso_present))
                if gain >= floor and gain > best_gain:
                    best_key, best_gain, best_score = key, gain, trial
            if best_key is not None:
                members.append(best_key)
                unassigned.discard(best_key)
                score = best_score
        if len(members) >= 2:
            groups.append(PersonGroup(members))
        else:
            ungrouped.append(seed)
    return AssociationResult(groups, ungrouped)


# ---------------------------------------------------------------------------
# full-frame reconstruction

def _attach_sets(frame: FrameBundle, group: PersonGroup, kind: str,
                 single_person: bool) -> list[tuple[str, KeypointSet2D]]:
    """Face/hand sets belonging to a person group.

    A set is attached when its person_hint matches the body detection's
    hint in the same camera; with a single person in the scene, unhinted
    sets attach too.
    """
    out = []
    for cam_id, set_idx in group.members:
        body_hint = frame.detections[cam_id][set_idx].person_hint
        for ks in frame.detections[cam_id]:
            if ks.kind != kind:
                continue
            if ks.person_hint is not None and ks.person_hint == body_hint:
                out.append((cam_id, ks))
            elif ks.person_hint is None and single_person:
                out.append((cam_id, ks))
    return out


def _triangulate_set(sets, rig, config, seed_tag, kind) -> tuple[dict, dict]:
    """Triangulate every landmark index appearing in the given sets."""
    per_landmark: dict[int, list[Observation]] = {}
    for cam_id, ks in sets:
        pix = ks.pixels()
        conf = ks.confidences()
        for j, idx in enumerate(ks.indices()):
            per_landmark.setdefault(int(idx), []).append(
                Observation(cam_id, pix[j], conf[j]))
    landmarks: dict[int, Landmark3D] = {}
    failures: dict[int, str] = {}
    min_views = (config.hand_min_inlier_views
                 if kind in (KIND_LEFT_HAND, KIND_RIGHT_HAND)
                 else config.min_inlier_views)
    for idx in sorted(per_landmark):
        cfg = replace(config, min_inlier_views=min_views,
                      rng_seed=_mix_seed(config.rng_seed, seed_tag,
                                         _KIND_CODE[kind], idx))
        try:
            landmarks[idx] = triangulate(per_landmark[idx], rig, cfg,
                                         landmark_index=idx)
        except (InsufficientViews, NoConsensus) as e:
            failures[idx] = type(e).__name__
    return landmarks, failures


def reconstruct_skeleton(frame: FrameBundle, rig: CameraRig,
                         config: RansacConfig,
                         torso_indices=DEFAULT_TORSO_INDICES) -> list[SkeletonFrame]:
    """Per person: triangulate body, face, and hand landmarks independently.

    Landmarks that fail consensus are absent from the output (recorded in
    SkeletonFrame.failures, never zero-filled).
    """
    assoc = associate_people(frame, rig, config, torso_indices)
    single = len(assoc.groups) == 1
    skeletons = []
    for pid, group in enumerate(assoc.groups):
        sk = SkeletonFrame(person_id=pid)
        body_sets = [(cam_id, frame.detections[cam_id][i])
                     for cam_id, i in group.members]
        sk.body, fb = _triangulate_set(body_sets, rig, config, pid, KIND_BODY)
        if fb:
            sk.failures[KIND_BODY] = fb
        for kind, store in ((KIND_FACE, "face"),
                            (KIND_LEFT_HAND, "left_hand"),
                            (KIND_RIGHT_HAND, "right_hand")):
            sets = _attach_sets(frame, group, kind, single)
            landmarks, fails = _triangulate_set(sets, rig, config, pid, kind)
            setattr(sk, store, landmarks)
            if fails:
                sk.failures[kind] = fails
        skeletons.append(sk)
    return skeletons


# ---------------------------------------------------------------------------
# serialization for skeleton_%06d.json

def skeleton_to_dict(sk: SkeletonFrame) -> dict:
    def pack(landmarks: dict[int, Landmark3D]):
        return {
            str(i): {
                "position": lm.position.tolist(),
                "inlier_cameras": list(lm.inlier_cameras),
                "reprojection_rmse": lm.reprojection_rmse,
            }
            for i, lm in sorted(landmarks.items())
        }

    return {
        "person_id": sk.person_id,
        "body": pack(sk.body),
        "face": pack(sk.face),
        "left_hand": pack(sk.left_hand),
        "right_hand": pack(sk.right_hand),
        "failures": sk.failures,
    }


def skeleton_from_dict(doc: dict) -> SkeletonFrame:
    def unpack(obj):
        return {
            int(i): Landmark3D(int(i), np.array(v["position"], dtype=float),
                               tuple(v["inlier_cameras"]),
                               float(v["reprojection_rmse"]))
            for i, v in obj.items()
        }

    return SkeletonFrame(
        person_id=int(doc["person_id"]),
        body=unpack(doc.get("body", {})),
        face=unpack(doc.get("face", {})),
        left_hand=unpack(doc.get("left_hand", {})),
        right_hand=unpack(doc.get("right_hand", {})),
        failures={k: {int(i): v for i, v in d.items()}
                  for k, d in doc.get("failures", {}).items()},
    )

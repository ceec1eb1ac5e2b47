"""Exception hierarchy shared across the reconstruction stages.

Every named failure mode raised by the library derives from ReconError so
callers (and the pipeline's per-frame isolation) can catch one base class.
"""


class ReconError(Exception):
    """Base class for all reconstruction errors."""


# ---- input / schema validation -------------------------------------------

class MissingField(ReconError):
    """A required field is absent from an input file."""


class SchemaMismatch(ReconError):
    """An input file does not match the expected schema or version."""


class NonOrthonormalRotation(ReconError):
    """A rotation matrix fails the orthonormality / det(+1) check."""


class DuplicateCameraId(ReconError):
    """Two cameras in a rig share the same id."""


class MaskSizeMismatch(ReconError):
    """A mask image's dimensions disagree with its camera's image size."""


class DimensionMismatch(ReconError):
    """Array shapes disagree with the model or basis dimensions."""


class ConfigInvalid(ReconError):
    """Pipeline configuration failed validation."""


# ---- geometry -------------------------------------------------------------

class BehindCamera(ReconError):
    """A point (or object) lies at or behind the camera plane."""


class DegenerateFace(ReconError):
    """Facial landmarks are coincident or collinear; no head frame exists."""


class CoincidentTarget(ReconError):
    """The gaze target coincides with the head-frame origin."""


class DegenerateCorrespondences(ReconError):
    """Too few or collinear correspondences; similarity is under-determined."""


class DegenerateNormal(ReconError):
    """A vertex has a zero-area one-ring; its normal is undefined."""


# ---- estimation -----------------------------------------------------------

class InsufficientViews(ReconError):
    """Fewer than two usable observations for triangulation."""


class NoConsensus(ReconError):
    """RANSAC found no hypothesis with enough inlier views."""


class InsufficientKeypoints(ReconError):
    """Not enough keypoints to constrain the requested fit."""


class EmptyKeypoints(ReconError):
    """No keypoints available at all for a fit."""


class DivergedOptimization(ReconError):
    """A solver failed to make progress (non-finite or repeatedly rejected)."""


class NoVisibleVertices(ReconError):
    """No model vertex is visible in any view."""


class EmptyVolume(ReconError):
    """Voxel carving left no occupied voxel, or the grid is empty."""


class NoCorrespondences(ReconError):
    """Every closest-point correspondence was pruned."""


class EmptyInput(ReconError):
    """An aggregate operation received an empty collection."""


class EmptyMesh(ReconError):
    """A mesh with no vertices where one is required."""


class NoConstraints(ReconError):
    """A deformation solve was requested with no active constraints."""


class MissingStage(ReconError):
    """An export requires a stage result that was not computed."""

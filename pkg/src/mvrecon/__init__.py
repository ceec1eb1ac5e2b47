"""mvrecon: per-frame 3D behavioral reconstruction from calibrated multiview 2D inputs."""

__version__ = "0.1.0"

from .camera import Camera, CameraRig, project
from .errors import ReconError

__all__ = ["Camera", "CameraRig", "project", "ReconError", "__version__"]

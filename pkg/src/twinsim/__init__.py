"""twinsim: deterministic two-site simulation-twin teleoperation testbed."""

from .geometry import Bounds, Disk, LaserScan, Pose2D, Rect, ScanSpec, Twist, WorldModel
from .kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = [
    "Bounds", "Disk", "LaserScan", "Pose2D", "Rect", "ScanSpec", "Twist",
    "WorldModel", "KERNEL_BACKEND", "__version__",
]

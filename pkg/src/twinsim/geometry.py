"""Core 2D types: poses, velocity commands, scans, and world geometry."""

from __future__ import annotations

import math
from dataclasses import dataclass, field


def normalize_angle(a: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    a = math.fmod(a + math.pi, 2.0 * math.pi)
    if a <= 0.0:
        a += 2.0 * math.pi
    return a - math.pi


class InvalidStateError(ValueError):
    """Raised when an operation receives a non-finite or out-of-world state."""


@dataclass(frozen=True)
class Pose2D:
    x: float
    y: float
    theta: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.theta)):
            raise InvalidStateError(f"non-finite pose ({self.x}, {self.y}, {self.theta})")
        object.__setattr__(self, "theta", normalize_angle(self.theta))


@dataclass(frozen=True)
class Twist:
    v: float
    omega: float

    def __post_init__(self):
        if not (math.isfinite(self.v) and math.isfinite(self.omega)):
            raise InvalidStateError(f"non-finite twist ({self.v}, {self.omega})")


ZERO_TWIST = Twist(0.0, 0.0)


@dataclass(frozen=True)
class LaserScan:
    """One 2D rangefinder sweep.

    ``ranges[i]`` is the distance along bearing ``angle_min + i*angle_increment``
    (relative to the robot heading). A beam that saw nothing is clamped to
    ``range_max`` with ``no_return[i]`` set.
    """

    stamp: float
    angle_min: float
    angle_increment: float
    range_max: float
    ranges: tuple[float, ...]
    no_return: tuple[bool, ...]

    def __post_init__(self):
        if len(self.ranges) != len(self.no_return):
            raise ValueError("ranges and no_return lengths differ")

    def __len__(self) -> int:
        return len(self.ranges)


@dataclass(frozen=True)
class Disk:
    cx: float
    cy: float
    radius: float


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle, corners (x0, y0) <= (x1, y1)."""

    x0: float
    y0: float
    x1: float
    y1: float


@dataclass(frozen=True)
class Bounds:
    x0: float
    y0: float
    x1: float
    y1: float

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0

    def contains(self, x: float, y: float) -> bool:
        return self.x0 <= x <= self.x1 and self.y0 <= y <= self.y1


@dataclass(frozen=True)
class WorldModel:
    """Walled rectangular world with static disk/rect obstacles."""

    bounds: Bounds
    obstacles: tuple[Disk | Rect, ...] = ()
    robot_radius: float = 0.18

    def __post_init__(self):
        if self.robot_radius <= 0:
            raise ValueError("robot_radius must be positive")
        if self.bounds.width <= 0 or self.bounds.height <= 0:
            raise ValueError("bounds area must be positive")
        for ob in self.obstacles:
            if isinstance(ob, Disk):
                inside = (self.bounds.x0 <= ob.cx <= self.bounds.x1
                          and self.bounds.y0 <= ob.cy <= self.bounds.y1)
            else:
                inside = (self.bounds.x0 <= ob.x0 and ob.x1 <= self.bounds.x1
                          and self.bounds.y0 <= ob.y0 and ob.y1 <= self.bounds.y1)
            if not inside:
                raise ValueError(f"obstacle {ob} lies outside bounds")


@dataclass(frozen=True)
class ScanSpec:
    """Lidar envelope: 360 beams over a full turn, 3.5 m reach by default."""

    beams: int = 360
    angle_min: float = -math.pi
    range_max: float = 3.5

    @property
    def angle_increment(self) -> float:
        return 2.0 * math.pi / self.beams


def distance_to_obstacle(ob: Disk | Rect, x: float, y: float) -> float:
    """Euclidean distance from a point to the obstacle surface (<= 0 inside)."""
    if isinstance(ob, Disk):
        return math.hypot(x - ob.cx, y - ob.cy) - ob.radius
    dx = max(ob.x0 - x, 0.0, x - ob.x1)
    dy = max(ob.y0 - y, 0.0, y - ob.y1)
    if dx == 0.0 and dy == 0.0:
        # inside: negative distance to the nearest edge
        return -min(x - ob.x0, ob.x1 - x, y - ob.y0, ob.y1 - y)
    return math.hypot(dx, dy)


def clearance(world: WorldModel, x: float, y: float) -> float:
    """Distance from a point to the nearest obstacle surface or wall."""
    b = world.bounds
    d = min(x - b.x0, b.x1 - x, y - b.y0, b.y1 - y)
    for ob in world.obstacles:
        d = min(d, distance_to_obstacle(ob, x, y))
    return d

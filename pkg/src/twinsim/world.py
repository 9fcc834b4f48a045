"""Differential-drive kinematics, lidar simulation, and collision checks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from random import Random

import numpy as np

from . import kernels
from .geometry import (
    Disk,
    InvalidStateError,
    LaserScan,
    Pose2D,
    Rect,
    ScanSpec,
    Twist,
    WorldModel,
    clearance,
    normalize_angle,
)


def step_kinematics(pose: Pose2D, cmd: Twist, dt: float) -> Pose2D:
    """Exact-Euler unicycle update over one tick."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    x = pose.x + cmd.v * math.cos(pose.theta) * dt
    y = pose.y + cmd.v * math.sin(pose.theta) * dt
    theta = normalize_angle(pose.theta + cmd.omega * dt)
    return Pose2D(x, y, theta)


@lru_cache(maxsize=32)
def _packed_obstacles(world: WorldModel) -> tuple[np.ndarray, np.ndarray]:
    disks = [(o.cx, o.cy, o.radius) for o in world.obstacles if isinstance(o, Disk)]
    rects = [(o.x0, o.y0, o.x1, o.y1) for o in world.obstacles if isinstance(o, Rect)]
    return (np.array(disks, dtype=np.float64).reshape(-1, 3),
            np.array(rects, dtype=np.float64).reshape(-1, 4))


def raycast_scan(world: WorldModel, pose: Pose2D, spec: ScanSpec, stamp: float = 0.0) -> LaserScan:
    """Simulate one lidar sweep from ``pose``; beams are body-frame bearings."""
    if not world.bounds.contains(pose.x, pose.y):
        raise InvalidStateError(f"pose ({pose.x}, {pose.y}) outside world bounds")
    if check_collision(world, pose):
        raise InvalidStateError("scan pose is in collision")
    disks, rects = _packed_obstacles(world)
    b = world.bounds
    ranges, no_ret = kernels.raycast(
        (b.x0, b.y0, b.x1, b.y1), disks, rects,
        pose.x, pose.y, pose.theta,
        spec.angle_min, spec.angle_increment, spec.beams, spec.range_max)
    return LaserScan(
        stamp=stamp,
        angle_min=spec.angle_min,
        angle_increment=spec.angle_increment,
        range_max=spec.range_max,
        ranges=tuple(float(r) for r in ranges),
        no_return=tuple(bool(f) for f in no_ret),
    )


def check_collision(world: WorldModel, pose: Pose2D) -> bool:
    """True iff the robot disk strictly intersects an obstacle or leaves bounds.

    Tangency (clearance exactly equal to the radius) is non-colliding.
    """
    return clearance(world, pose.x, pose.y) < world.robot_radius


@dataclass
class OdometryNoiseModel:
    """Seeded multiplicative Gaussian perturbation of executed velocities."""

    sigma_v: float = 0.0
    sigma_omega: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.sigma_v < 0 or self.sigma_omega < 0:
            raise ValueError("noise sigmas must be non-negative")
        self._rng = Random(self.seed)

    def apply(self, cmd: Twist) -> Twist:
        gv = self._rng.gauss(0.0, 1.0)
        gw = self._rng.gauss(0.0, 1.0)
        return Twist(cmd.v * (1.0 + self.sigma_v * gv),
                     cmd.omega * (1.0 + self.sigma_omega * gw))

    def reset(self) -> None:
        self._rng = Random(self.seed)


def apply_odometry_noise(model: OdometryNoiseModel, cmd: Twist) -> Twist:
    return model.apply(cmd)

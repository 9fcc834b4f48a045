from __future__ import annotations

import math
import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from twinsim.geometry import Bounds, Disk, Pose2D, Rect, WorldModel, clearance


@pytest.fixture
def square_world():
    """Empty 6x6 m walled world centred on the origin."""
    return WorldModel(Bounds(-3.0, -3.0, 3.0, 3.0))


def random_world(rng: random.Random, side: float = 3.0, n_obstacles: int = 3,
                 robot_radius: float = 0.18) -> WorldModel:
    half = side / 2.0
    obstacles = []
    for _ in range(n_obstacles):
        if rng.random() < 0.5:
            r = rng.uniform(0.1, 0.3)
            cx = rng.uniform(-half + r + 0.05, half - r - 0.05)
            cy = rng.uniform(-half + r + 0.05, half - r - 0.05)
            obstacles.append(Disk(cx, cy, r))
        else:
            w = rng.uniform(0.15, 0.5)
            h = rng.uniform(0.15, 0.5)
            x0 = rng.uniform(-half + 0.05, half - w - 0.05)
            y0 = rng.uniform(-half + 0.05, half - h - 0.05)
            obstacles.append(Rect(x0, y0, x0 + w, y0 + h))
    return WorldModel(Bounds(-half, -half, half, half), tuple(obstacles), robot_radius)


def random_free_pose(rng: random.Random, world: WorldModel,
                     margin: float = 0.05) -> Pose2D:
    b = world.bounds
    for _ in range(1000):
        x = rng.uniform(b.x0 + world.robot_radius, b.x1 - world.robot_radius)
        y = rng.uniform(b.y0 + world.robot_radius, b.y1 - world.robot_radius)
        if clearance(world, x, y) >= world.robot_radius + margin:
            return Pose2D(x, y, rng.uniform(-math.pi, math.pi))
    raise RuntimeError("could not sample a free pose")

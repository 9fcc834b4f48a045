"""Log-odds occupancy grid: scan integration, inflation, and map export."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np
from scipy import ndimage

from . import kernels
from .geometry import Bounds, Disk, LaserScan, Pose2D, WorldModel

# conventional trinary map-file thresholds and byte values
PGM_OCCUPIED_THRESH = 0.65
PGM_FREE_THRESH = 0.196
_PGM_OCC, _PGM_FREE, _PGM_UNKNOWN = 0, 254, 205


class GridOutOfBoundsError(IndexError):
    pass


class GridIndex(NamedTuple):
    col: int
    row: int


@dataclass(frozen=True)
class InverseSensorModel:
    """Binary-Bayes increments: p_hit 0.7 / p_miss 0.3, clamped at +/-5."""

    l_occ: float = math.log(0.7 / 0.3)
    l_free: float = -math.log(0.7 / 0.3)
    l_max: float = 5.0

    def __post_init__(self):
        if not (self.l_occ > 0.0 > self.l_free) or self.l_max <= 0.0:
            raise ValueError("require l_occ > 0 > l_free and l_max > 0")


class OccupancyGrid:
    """Row-major log-odds grid; cell (0, 0) corner sits at ``origin``."""

    def __init__(self, origin: Pose2D, resolution: float, width: int, height: int,
                 logodds: np.ndarray | None = None):
        if resolution <= 0:
            raise ValueError("resolution must be positive")
        self.origin = origin
        self.resolution = resolution
        self.width = width
        self.height = height
        if logodds is None:
            logodds = np.zeros((height, width), dtype=np.float64)
        assert logodds.shape == (height, width)
        self.logodds = np.ascontiguousarray(logodds, dtype=np.float64)

    @classmethod
    def for_bounds(cls, bounds: Bounds, resolution: float) -> "OccupancyGrid":
        """Grid covering ``bounds`` exactly (ceil to whole cells)."""
        width = max(1, math.ceil(bounds.width / resolution - 1e-9))
        height = max(1, math.ceil(bounds.height / resolution - 1e-9))
        return cls(Pose2D(bounds.x0, bounds.y0, 0.0), resolution, width, height)

    def copy(self) -> "OccupancyGrid":
        return OccupancyGrid(self.origin, self.resolution, self.width, self.height,
                             self.logodds.copy())

    def cell_center(self, idx: GridIndex) -> tuple[float, float]:
        return (self.origin.x + (idx.col + 0.5) * self.resolution,
                self.origin.y + (idx.row + 0.5) * self.resolution)

    def contains_point(self, x: float, y: float) -> bool:
        fx = x - self.origin.x
        fy = y - self.origin.y
        return (0.0 <= fx <= self.width * self.resolution
                and 0.0 <= fy <= self.height * self.resolution)


def world_to_cell(grid: OccupancyGrid, point: tuple[float, float]) -> GridIndex:
    """Floor-quantized cell index, half-open except the closed outer edge."""
    x, y = point
    if not grid.contains_point(x, y):
        raise GridOutOfBoundsError(f"point {point} outside grid extent")
    col = min(int(math.floor((x - grid.origin.x) / grid.resolution)), grid.width - 1)
    row = min(int(math.floor((y - grid.origin.y) / grid.resolution)), grid.height - 1)
    return GridIndex(col, row)


def update_with_scan(grid: OccupancyGrid, pose: Pose2D, scan: LaserScan,
                     model: InverseSensorModel) -> OccupancyGrid:
    """Fold one scan into the grid (in place); returns the grid.

    Cells crossed by a beam (excluding the robot's own cell and the endpoint
    cell) receive ``l_free``; each hit endpoint receives ``l_occ``. Beams
    leaving the grid are truncated at the boundary.
    """
    if not grid.contains_point(pose.x, pose.y):
        raise GridOutOfBoundsError("scan pose outside grid extent")
    kernels.integrate_scan(
        grid.logodds, grid.origin.x, grid.origin.y, grid.resolution,
        pose.x, pose.y, pose.theta, scan.angle_min, scan.angle_increment,
        np.asarray(scan.ranges, dtype=np.float64),
        np.asarray(scan.no_return, dtype=np.uint8),
        model.l_occ, model.l_free, model.l_max)
    return grid


def occupancy_probability(grid: OccupancyGrid, idx: GridIndex) -> float:
    if not (0 <= idx.col < grid.width and 0 <= idx.row < grid.height):
        raise GridOutOfBoundsError(f"index {idx} outside grid")
    return 1.0 - 1.0 / (1.0 + math.exp(grid.logodds[idx.row, idx.col]))


def _logit(p: float) -> float:
    return math.log(p / (1.0 - p))


def occupied_mask(grid: OccupancyGrid, occupied_threshold: float) -> np.ndarray:
    """Boolean mask of cells with occupancy probability >= threshold."""
    return grid.logodds >= _logit(occupied_threshold)


def inflate(grid: OccupancyGrid, occupied_threshold: float, radius: float) -> np.ndarray:
    """Binary blocked grid: cell blocked iff an occupied cell centre lies
    within Euclidean ``radius`` of its centre."""
    if radius < 0:
        raise ValueError("radius must be non-negative")
    occ = occupied_mask(grid, occupied_threshold)
    if radius == 0.0:
        return occ.astype(np.uint8)
    reach = int(math.floor(radius / grid.resolution)) + 1
    offs = np.arange(-reach, reach + 1)
    dj, di = np.meshgrid(offs, offs)
    structure = np.hypot(di * grid.resolution, dj * grid.resolution) <= radius
    out = ndimage.binary_dilation(occ, structure=structure)
    return out.astype(np.uint8)


def distance_to_occupied(grid: OccupancyGrid, occupied_threshold: float) -> np.ndarray:
    """Metres from each cell centre to the nearest occupied cell centre."""
    occ = occupied_mask(grid, occupied_threshold)
    if not occ.any():
        return np.full(grid.logodds.shape, 1e9, dtype=np.float64)
    dist = ndimage.distance_transform_edt(~occ)
    return np.ascontiguousarray(dist * grid.resolution, dtype=np.float64)


@dataclass(frozen=True)
class PlanningSnapshot:
    """Immutable planner view of a grid: inflated blocked mask + clearance field."""

    origin_x: float
    origin_y: float
    resolution: float
    width: int
    height: int
    robot_radius: float
    blocked: np.ndarray      # uint8 (h, w), robot-radius inflated
    dist: np.ndarray         # float64 (h, w), metres to nearest occupied centre


def make_planning_snapshot(grid: OccupancyGrid, occupied_threshold: float,
                           robot_radius: float, inflation_margin: float = 0.0) -> PlanningSnapshot:
    return PlanningSnapshot(
        origin_x=grid.origin.x, origin_y=grid.origin.y,
        resolution=grid.resolution, width=grid.width, height=grid.height,
        robot_radius=robot_radius,
        blocked=inflate(grid, occupied_threshold, robot_radius + inflation_margin),
        dist=distance_to_occupied(grid, occupied_threshold))


def stamp_occupied_disk(grid: OccupancyGrid, x: float, y: float, radius: float,
                        l_value: float) -> None:
    """Force cells within ``radius`` of the point to at least ``l_value``
    log-odds (virtual obstacle registration, e.g. from remote feedback).
    Radius 0 stamps exactly the containing cell."""
    res = grid.resolution
    col = int(math.floor((x - grid.origin.x) / res))
    row = int(math.floor((y - grid.origin.y) / res))
    if radius <= 0.0:
        if 0 <= col < grid.width and 0 <= row < grid.height:
            grid.logodds[row, col] = max(grid.logodds[row, col], l_value)
        return
    reach = int(radius / res) + 1
    c0, c1 = max(0, col - reach), min(grid.width, col + reach + 1)
    r0, r1 = max(0, row - reach), min(grid.height, row + reach + 1)
    if c0 >= c1 or r0 >= r1:
        return
    cx = grid.origin.x + (np.arange(c0, c1) + 0.5) * res
    cy = grid.origin.y + (np.arange(r0, r1) + 0.5) * res
    hit = np.hypot(cx[None, :] - x, cy[:, None] - y) <= radius
    sub = grid.logodds[r0:r1, c0:c1]
    np.maximum(sub, np.where(hit, l_value, -np.inf), out=sub)


def rasterize_world(world: WorldModel, resolution: float,
                    model: InverseSensorModel = InverseSensorModel()) -> OccupancyGrid:
    """Ground-truth grid: obstacle-touching cells and the wall ring saturated
    occupied, everything else saturated free."""
    grid = OccupancyGrid.for_bounds(world.bounds, resolution)
    lo = np.full((grid.height, grid.width), -model.l_max, dtype=np.float64)
    lo[0, :] = model.l_max
    lo[-1, :] = model.l_max
    lo[:, 0] = model.l_max
    lo[:, -1] = model.l_max
    cx = world.bounds.x0 + (np.arange(grid.width) + 0.5) * resolution
    cy = world.bounds.y0 + (np.arange(grid.height) + 0.5) * resolution
    half = 0.5 * resolution
    for ob in world.obstacles:
        # occupied iff the obstacle comes within half a cell of the centre
        # (i.e. it intersects the cell box, measured conservatively)
        if isinstance(ob, Disk):
            dx = np.abs(cx[None, :] - ob.cx)
            dy = np.abs(cy[:, None] - ob.cy)
            hit = np.hypot(dx, dy) <= ob.radius + half
        else:
            dx = np.maximum(np.maximum(ob.x0 - cx[None, :], cx[None, :] - ob.x1), 0.0)
            dy = np.maximum(np.maximum(ob.y0 - cy[:, None], cy[:, None] - ob.y1), 0.0)
            hit = np.hypot(dx, dy) <= half
        lo[hit] = model.l_max
    grid.logodds = np.ascontiguousarray(lo)
    return grid


def export_pgm(grid: OccupancyGrid, pgm_path: str | Path, yaml_path: str | Path) -> None:
    """Write the conventional trinary map pair (binary PGM + YAML sidecar)."""
    p = 1.0 - 1.0 / (1.0 + np.exp(grid.logodds))
    img = np.full(p.shape, _PGM_UNKNOWN, dtype=np.uint8)
    img[p >= PGM_OCCUPIED_THRESH] = _PGM_OCC
    img[p <= PGM_FREE_THRESH] = _PGM_FREE
    img = img[::-1, :]  # image rows run top-to-bottom
    pgm_path = Path(pgm_path)
    with pgm_path.open("wb") as f:
        f.write(f"P5\n{grid.width} {grid.height}\n255\n".encode("ascii"))
        f.write(img.tobytes())
    meta = (
        f"image: {pgm_path.name}\n"
        f"resolution: {grid.resolution}\n"
        f"origin: [{grid.origin.x}, {grid.origin.y}, 0.0]\n"
        "negate: 0\n"
        f"occupied_thresh: {PGM_OCCUPIED_THRESH}\n"
        f"free_thresh: {PGM_FREE_THRESH}\n"
    )
    Path(yaml_path).write_text(meta, encoding="ascii")

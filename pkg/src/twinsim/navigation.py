"""Autonomy stack: A* global planning, DWA local planning, waypoint missions."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

from . import kernels
from .geometry import Pose2D, Twist, normalize_angle
from .mapping import PlanningSnapshot

SQRT2 = math.sqrt(2.0)


class UnreachableGoalError(RuntimeError):
    pass


class InvalidEndpointError(ValueError):
    pass


@dataclass(frozen=True)
class DWAParams:
    v_max: float = 0.5
    v_min: float = 0.0
    omega_max: float = 1.0
    a_v: float = 0.5
    a_omega: float = 2.0
    sim_horizon: float = 1.5
    control_dt: float = 0.25
    rollout_dt: float = 0.05
    n_v: int = 11
    n_omega: int = 21
    alpha: float = 0.8          # heading weight
    beta: float = 0.1           # clearance weight
    gamma: float = 0.1          # velocity weight
    goal_xy_tol: float = 0.05
    goal_yaw_tol: float = 0.2
    clearance_cutoff: float = 1.0
    lookahead: float = 1.0

    def __post_init__(self):
        if self.v_min < 0 or self.v_max <= 0 or self.omega_max <= 0:
            raise ValueError("velocity limits must be positive (v_min >= 0)")
        if self.n_v < 2 or self.n_omega < 2:
            raise ValueError("need at least 2 samples per axis")
        if self.alpha + self.beta + self.gamma <= 0:
            raise ValueError("objective weights must sum positive")


@dataclass(frozen=True)
class TrajectoryScore:
    heading: float
    clearance: float
    velocity: float
    total: float
    admissible: bool


def _cell_of(snap: PlanningSnapshot, x: float, y: float) -> tuple[int, int]:
    col = int(math.floor((x - snap.origin_x) / snap.resolution))
    row = int(math.floor((y - snap.origin_y) / snap.resolution))
    return col, row


def _nearest_free_cell(snap: PlanningSnapshot, col: int, row: int,
                       max_radius_cells: int) -> tuple[int, int] | None:
    if 0 <= col < snap.width and 0 <= row < snap.height and not snap.blocked[row, col]:
        return col, row
    best = None
    best_d2 = max_radius_cells * max_radius_cells + 1
    for dr in range(-max_radius_cells, max_radius_cells + 1):
        for dc in range(-max_radius_cells, max_radius_cells + 1):
            d2 = dr * dr + dc * dc
            if d2 >= best_d2:
                continue
            c, r = col + dc, row + dr
            if 0 <= c < snap.width and 0 <= r < snap.height and not snap.blocked[r, c]:
                best = (c, r)
                best_d2 = d2
    return best


def plan_global(snap: PlanningSnapshot, start: tuple[float, float],
                goal: tuple[float, float], snap_to_free: bool = True) -> list[tuple[float, float]]:
    """Optimal 8-connected A* path (unit straight / sqrt(2) diagonal cost),
    returned as cell-centre waypoints ending at the exact goal point."""
    sc = _cell_of(snap, *start)
    gc = _cell_of(snap, *goal)
    if snap_to_free:
        reach = int(0.5 / snap.resolution)
        s = _nearest_free_cell(snap, sc[0], sc[1], reach)
        g = _nearest_free_cell(snap, gc[0], gc[1], reach)
    else:
        s = sc if _in_free(snap, sc) else None
        g = gc if _in_free(snap, gc) else None
    if s is None or g is None:
        raise InvalidEndpointError(f"start {start} or goal {goal} not in free space")

    blocked = snap.blocked
    width, height = snap.width, snap.height

    def h(c: int, r: int) -> float:
        dx = abs(c - g[0])
        dy = abs(r - g[1])
        return (dx + dy) + (SQRT2 - 2.0) * min(dx, dy)

    g_score = {s: 0.0}
    came: dict[tuple[int, int], tuple[int, int]] = {}
    open_heap: list[tuple[float, int, tuple[int, int]]] = [(h(*s), 0, s)]
    tie = 0
    closed: set[tuple[int, int]] = set()
    while open_heap:
        _, _, cur = heapq.heappop(open_heap)
        if cur in closed:
            continue
        if cur == g:
            break
        closed.add(cur)
        cc, cr = cur
        base = g_score[cur]
        for dc, dr, cost in ((1, 0, 1.0), (-1, 0, 1.0), (0, 1, 1.0), (0, -1, 1.0),
                             (1, 1, SQRT2), (1, -1, SQRT2), (-1, 1, SQRT2), (-1, -1, SQRT2)):
            nc, nr = cc + dc, cr + dr
            if not (0 <= nc < width and 0 <= nr < height) or blocked[nr, nc]:
                continue
            tentative = base + cost
            nxt = (nc, nr)
            if tentative < g_score.get(nxt, math.inf):
                g_score[nxt] = tentative
                came[nxt] = cur
                tie += 1
                heapq.heappush(open_heap, (tentative + h(nc, nr), tie, nxt))
    else:
        raise UnreachableGoalError(f"no path from {start} to {goal}")

    cells = [g]
    while cells[-1] != s:
        cells.append(came[cells[-1]])
    cells.reverse()

    half = 0.5 * snap.resolution
    path = [(snap.origin_x + (c + 0.5) * snap.resolution,
             snap.origin_y + (r + 0.5) * snap.resolution) for c, r in cells]
    gx, gy = goal
    if math.hypot(gx - path[-1][0], gy - path[-1][1]) > 1e-12:
        # land on the exact requested goal point, not just its cell centre
        if math.hypot(gx - path[-1][0], gy - path[-1][1]) <= half * SQRT2 + 1e-9:
            path[-1] = (gx, gy)
        else:
            path.append((gx, gy))
    return path


def path_cost(snap: PlanningSnapshot, start: tuple[float, float],
              goal: tuple[float, float]) -> float:
    """Cost of the optimal cell path between the start/goal cells."""
    path = plan_global(snap, start, goal, snap_to_free=False)
    cells = [_cell_of(snap, x, y) for x, y in path]
    cost = 0.0
    for a, b in zip(cells, cells[1:]):
        if a == b:
            continue
        cost += 1.0 if abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1 else SQRT2
    return cost


def _in_free(snap: PlanningSnapshot, cell: tuple[int, int]) -> bool:
    c, r = cell
    return 0 <= c < snap.width and 0 <= r < snap.height and not snap.blocked[r, c]


def _line_free(snap: PlanningSnapshot, x0: float, y0: float,
               x1: float, y1: float) -> bool:
    """True iff the straight segment stays in unblocked cells (the start
    cell itself is exempt so an escape from a blocked cell can still aim)."""
    length = math.hypot(x1 - x0, y1 - y0)
    n = max(1, int(length / (0.5 * snap.resolution)))
    for k in range(1, n + 1):
        t = k / n
        x = x0 + (x1 - x0) * t
        y = y0 + (y1 - y0) * t
        col = int(math.floor((x - snap.origin_x) / snap.resolution))
        row = int(math.floor((y - snap.origin_y) / snap.resolution))
        if not (0 <= col < snap.width and 0 <= row < snap.height):
            return False
        if snap.blocked[row, col]:
            return False
    return True


def dynamic_window(current: Twist, params: DWAParams) -> tuple[float, float, float, float]:
    """Reachable (v_lo, v_hi, w_lo, w_hi) within one control period."""
    dv = params.a_v * params.control_dt
    dw = params.a_omega * params.control_dt
    v = min(max(current.v, params.v_min), params.v_max)
    w = min(max(current.omega, -params.omega_max), params.omega_max)
    v_lo = max(params.v_min, v - dv)
    v_hi = min(params.v_max, v + dv)
    w_lo = max(-params.omega_max, w - dw)
    w_hi = min(params.omega_max, w + dw)
    return v_lo, v_hi, w_lo, w_hi


def evaluate_candidate(pose: Pose2D, candidate: Twist, goal: tuple[float, float],
                       snap: PlanningSnapshot, params: DWAParams) -> TrajectoryScore:
    """Score one velocity candidate by forward-simulating it for sim_horizon."""
    n_steps = max(1, round(params.sim_horizon / params.rollout_dt))
    ex, ey, etheta, min_clear, collided = kernels.rollout(
        pose.x, pose.y, pose.theta, candidate.v, candidate.omega,
        params.rollout_dt, n_steps, snap.dist, snap.blocked,
        snap.origin_x, snap.origin_y, snap.resolution, snap.robot_radius)
    clearance_raw = max(0.0, min_clear)
    bearing_err = normalize_angle(math.atan2(goal[1] - ey, goal[0] - ex) - etheta)
    heading = 1.0 - abs(bearing_err) / math.pi
    clearance = min(clearance_raw, params.clearance_cutoff) / params.clearance_cutoff
    velocity = candidate.v / params.v_max
    admissible = (not collided) and candidate.v <= math.sqrt(2.0 * clearance_raw * params.a_v)
    total = params.alpha * heading + params.beta * clearance + params.gamma * velocity
    return TrajectoryScore(heading, clearance, velocity, total, admissible)


def recovery_command(params: DWAParams) -> Twist:
    return Twist(0.0, params.omega_max / 2.0)


def _samples(lo: float, hi: float, n: int) -> list[float]:
    if n == 1:
        return [lo]
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def select_velocity(pose: Pose2D, current: Twist, local_goal: tuple[float, float],
                    snap: PlanningSnapshot, params: DWAParams) -> tuple[Twist, bool]:
    """Best admissible sampled command; falls back to the recovery rotation.

    Returns (twist, any_admissible). Ties break toward lower |omega|, then
    lower v, then positive omega, making selection total and deterministic.
    """
    v_lo, v_hi, w_lo, w_hi = dynamic_window(current, params)
    best: Twist | None = None
    best_key: tuple[float, float, float, float] | None = None
    for v in _samples(v_lo, v_hi, params.n_v):
        for w in _samples(w_lo, w_hi, params.n_omega):
            cand = Twist(v, w)
            score = evaluate_candidate(pose, cand, local_goal, snap, params)
            if not score.admissible:
                continue
            key = (score.total, -abs(w), -v, 1.0 if w > 0 else 0.0)
            if best_key is None or key > best_key:
                best_key = key
                best = cand
    if best is None:
        return recovery_command(params), False
    return best, True


@dataclass
class MissionStatus:
    state: str = "running"           # running | reached | failed
    active_goal: int = 0
    goals_done: list[float] = field(default_factory=list)   # completion sim-times


class MissionExecutor:
    """Waypoint mission over a goal list, one DWA decision per control tick.

    Phases per goal: drive (DWA toward a lookahead point on the global path),
    for the final goal align yaw, then hold still for ``dwell_time`` so a
    tracking robot can settle before the next goal. A recovery rotation runs
    whenever no sampled candidate is admissible and gives up after three full
    turns without progress.
    """

    def __init__(self, goals: list[tuple[float, float, float]], params: DWAParams,
                 dwell_time: float = 0.0):
        if not goals:
            raise ValueError("mission needs at least one goal")
        self.goals = goals
        self.params = params
        self.dwell_time = dwell_time
        self.status = MissionStatus()
        self.path: list[tuple[float, float]] = []
        self._dwell_until: float | None = None
        self._recovering = False
        self._recovery_accum = 0.0
        self._recovery_cycles = 0
        self._needs_plan = True
        self.plan_invocations = 0
        self.recovery_triggers = 0

    def request_replan(self) -> None:
        self._needs_plan = True

    def _local_goal(self, pose: Pose2D, snap: PlanningSnapshot) -> tuple[float, float]:
        gx, gy, _ = self.goals[self.status.active_goal]
        if self.path:
            # farthest path point in lookahead range that the robot can see
            # in a straight free line; a carrot across blocked space parks
            # the robot (every move toward it is inadmissible)
            best = self.path[0]
            for pt in self.path:
                if math.hypot(pt[0] - pose.x, pt[1] - pose.y) > self.params.lookahead:
                    continue
                if _line_free(snap, pose.x, pose.y, pt[0], pt[1]):
                    best = pt
            if best != self.path[-1]:
                return best
        # end-game: carry the carrot a little past the goal, otherwise the
        # parked candidate's heading score beats every moving candidate and
        # the robot stalls just outside goal_xy_tol
        d = math.hypot(gx - pose.x, gy - pose.y)
        zone = max(3.0 * self.params.goal_xy_tol, 0.15)
        if 1e-9 < d < zone:
            return (gx + 0.2 * (gx - pose.x) / d, gy + 0.2 * (gy - pose.y) / d)
        return (gx, gy)

    def step(self, pose: Pose2D, current: Twist, snap: PlanningSnapshot,
             now: float) -> Twist:
        """Advance the mission one control tick; returns the command to run."""
        p = self.params
        if self.status.state != "running":
            return Twist(0.0, 0.0)

        if self._dwell_until is not None:
            if now < self._dwell_until:
                return Twist(0.0, 0.0)
            self._dwell_until = None
            if self.status.active_goal == len(self.goals) - 1:
                self.status.state = "reached"
                return Twist(0.0, 0.0)
            self.status.active_goal += 1
            self._needs_plan = True
            self._recovering = False
            self._recovery_cycles = 0

        gx, gy, gyaw = self.goals[self.status.active_goal]
        final = self.status.active_goal == len(self.goals) - 1
        if math.hypot(gx - pose.x, gy - pose.y) <= p.goal_xy_tol:
            if final:
                yaw_err = normalize_angle(gyaw - pose.theta)
                if abs(yaw_err) > p.goal_yaw_tol:
                    w = max(-p.omega_max / 2.0, min(p.omega_max / 2.0, 2.0 * yaw_err))
                    return Twist(0.0, w)
            self.status.goals_done.append(now)
            if self.dwell_time > 0.0:
                self._dwell_until = now + self.dwell_time
                return Twist(0.0, 0.0)
            if final:
                self.status.state = "reached"
                return Twist(0.0, 0.0)
            self.status.active_goal += 1
            self._needs_plan = True
            self._recovering = False
            self._recovery_cycles = 0
            gx, gy, gyaw = self.goals[self.status.active_goal]

        if self._needs_plan:
            try:
                self.path = plan_global(snap, (pose.x, pose.y), (gx, gy))
                self.plan_invocations += 1
                self._needs_plan = False
            except (UnreachableGoalError, InvalidEndpointError):
                self.status.state = "failed"
                return Twist(0.0, 0.0)

        cmd, admissible = select_velocity(pose, current, self._local_goal(pose, snap), snap, self.params)
        if admissible:
            self._recovering = False
            self._recovery_accum = 0.0
            return cmd
        # recovery rotation: spin in place until a candidate frees up; replan
        # after each full turn, fail after three fruitless cycles
        if not self._recovering:
            self._recovering = True
            self._recovery_accum = 0.0
            self.recovery_triggers += 1
        self._recovery_accum += abs(cmd.omega) * p.control_dt
        if self._recovery_accum >= 2.0 * math.pi:
            self._recovery_cycles += 1
            self._recovery_accum = 0.0
            self._needs_plan = True
            if self._recovery_cycles >= 3:
                self.status.state = "failed"
                return Twist(0.0, 0.0)
        return cmd

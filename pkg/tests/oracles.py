"""Independent oracles the implementation is checked against.

These deliberately use different mechanisms than the library: per-cell
geometric clipping instead of grid traversal, Dijkstra instead of A*,
all-pairs scans instead of dilation, a hand-rolled rollout loop instead of
the kernels.
"""

from __future__ import annotations

import heapq
import math

import numpy as np

SQRT2 = math.sqrt(2.0)


def ray_cells_geometric(grid, x0, y0, x1, y1):
    """Cells whose open interior the open segment crosses with positive
    length, via per-cell Liang-Barsky clipping (vectorized over all cells)."""
    res = grid.resolution
    ox, oy = grid.origin.x, grid.origin.y
    cols = np.arange(grid.width)
    rows = np.arange(grid.height)
    cx0 = ox + cols * res
    cy0 = oy + rows * res
    dx = x1 - x0
    dy = y1 - y0

    def axis_interval(p0, d, lo, hi):
        if d == 0.0:
            inside = (lo < p0) & (p0 < hi)
            t_in = np.where(inside, -np.inf, np.inf)
            t_out = np.where(inside, np.inf, -np.inf)
            return t_in, t_out
        t_a = (lo - p0) / d
        t_b = (hi - p0) / d
        return np.minimum(t_a, t_b), np.maximum(t_a, t_b)

    tx_in, tx_out = axis_interval(x0, dx, cx0[None, :], cx0[None, :] + res)
    ty_in, ty_out = axis_interval(y0, dy, cy0[:, None], cy0[:, None] + res)
    t_in = np.maximum(tx_in, ty_in)
    t_out = np.minimum(tx_out, ty_out)
    lo = np.maximum(t_in, 0.0)
    hi = np.minimum(t_out, 1.0)
    member = hi > lo
    rr, cc = np.nonzero(member)
    return {(int(c), int(r)) for c, r in zip(cc, rr)}


def endpoint_cell(grid, x, y):
    """Clamped-floor endpoint convention (right edge closes to last cell)."""
    res = grid.resolution
    ce = int(math.floor((x - grid.origin.x) / res))
    re = int(math.floor((y - grid.origin.y) / res))
    if ce == grid.width and x - grid.origin.x <= grid.width * res:
        ce = grid.width - 1
    if re == grid.height and y - grid.origin.y <= grid.height * res:
        re = grid.height - 1
    if 0 <= ce < grid.width and 0 <= re < grid.height:
        return ce, re
    return None


def apply_scan_oracle(grid, pose, scan, model):
    """Reference scan integration over a copy of the grid's log-odds."""
    lo = grid.logodds.copy()
    res = grid.resolution
    start = (int(math.floor((pose.x - grid.origin.x) / res)),
             int(math.floor((pose.y - grid.origin.y) / res)))

    def clamped_add(cell, delta):
        c, r = cell
        v = lo[r, c] + delta
        v = max(-model.l_max, min(model.l_max, v))
        lo[r, c] = v

    for i, rng in enumerate(scan.ranges):
        bearing = pose.theta + scan.angle_min + i * scan.angle_increment
        ex = pose.x + rng * math.cos(bearing)
        ey = pose.y + rng * math.sin(bearing)
        end = endpoint_cell(grid, ex, ey)
        members = ray_cells_geometric(grid, pose.x, pose.y, ex, ey)
        members.discard(start)
        if end is not None:
            members.discard(end)
        for cell in sorted(members):
            clamped_add(cell, model.l_free)
        if end is not None and not scan.no_return[i] and end != start:
            clamped_add(end, model.l_occ)
    return lo


def dijkstra_cost(blocked, start, goal):
    """Optimal 8-connected cost (1 / sqrt2), or inf if unreachable."""
    height, width = blocked.shape
    if blocked[start[1], start[0]] or blocked[goal[1], goal[0]]:
        return math.inf
    dist = {start: 0.0}
    heap = [(0.0, start)]
    seen = set()
    while heap:
        d, cur = heapq.heappop(heap)
        if cur in seen:
            continue
        if cur == goal:
            return d
        seen.add(cur)
        c, r = cur
        for dc, dr, cost in ((1, 0, 1.0), (-1, 0, 1.0), (0, 1, 1.0), (0, -1, 1.0),
                             (1, 1, SQRT2), (1, -1, SQRT2), (-1, 1, SQRT2), (-1, -1, SQRT2)):
            nc, nr = c + dc, r + dr
            if not (0 <= nc < width and 0 <= nr < height) or blocked[nr, nc]:
                continue
            nd = d + cost
            nxt = (nc, nr)
            if nd < dist.get(nxt, math.inf):
                dist[nxt] = nd
                heapq.heappush(heap, (nd, nxt))
    return math.inf


def inflate_oracle(prob, resolution, threshold, radius):
    """All-pairs distance check: blocked iff any occupied cell centre within
    radius (centres differ by integer multiples of the resolution)."""
    height, width = prob.shape
    occ = [(c, r) for r in range(height) for c in range(width)
           if prob[r, c] >= threshold]
    out = np.zeros((height, width), dtype=np.uint8)
    for r in range(height):
        for c in range(width):
            for (oc, orr) in occ:
                if math.hypot((c - oc) * resolution, (r - orr) * resolution) <= radius:
                    out[r, c] = 1
                    break
    return out


def rollout_oracle(pose, v, w, params, snap):
    """Hand-rolled forward simulation + scoring, mirroring the contract."""
    x, y, theta = pose.x, pose.y, pose.theta
    n_steps = max(1, round(params.sim_horizon / params.rollout_dt))
    min_clear = math.inf
    collided = False
    col = int(math.floor((x - snap.origin_x) / snap.resolution))
    row = int(math.floor((y - snap.origin_y) / snap.resolution))
    escaped = not (0 <= col < snap.width and 0 <= row < snap.height
                   and snap.blocked[row, col])
    start_dist = 0.0 if escaped else snap.dist[row, col]
    for _ in range(n_steps):
        x += v * math.cos(theta) * params.rollout_dt
        y += v * math.sin(theta) * params.rollout_dt
        theta = math.atan2(math.sin(theta + w * params.rollout_dt),
                           math.cos(theta + w * params.rollout_dt))
        col = int(math.floor((x - snap.origin_x) / snap.resolution))
        row = int(math.floor((y - snap.origin_y) / snap.resolution))
        if not (0 <= col < snap.width and 0 <= row < snap.height):
            collided = True
            min_clear = 0.0
            break
        if escaped:
            min_clear = min(min_clear, snap.dist[row, col] - snap.robot_radius)
            if snap.blocked[row, col]:
                collided = True
                break
        else:
            if not snap.blocked[row, col]:
                escaped = True
                min_clear = min(min_clear, snap.dist[row, col] - snap.robot_radius)
            elif snap.dist[row, col] < start_dist - 0.051:
                collided = True
                break
    if not escaped:
        collided = True
        min_clear = 0.0
    return x, y, theta, min_clear, collided


def score_oracle(pose, v, w, goal, snap, params):
    ex, ey, etheta, min_clear, collided = rollout_oracle(pose, v, w, params, snap)
    clearance_raw = max(0.0, min_clear)
    err = math.atan2(goal[1] - ey, goal[0] - ex) - etheta
    err = math.atan2(math.sin(err), math.cos(err))
    heading = 1.0 - abs(err) / math.pi
    clear = min(clearance_raw, params.clearance_cutoff) / params.clearance_cutoff
    vel = v / params.v_max
    admissible = (not collided) and v <= math.sqrt(2.0 * clearance_raw * params.a_v)
    total = params.alpha * heading + params.beta * clear + params.gamma * vel
    return total, admissible


def select_oracle(pose, current, goal, snap, params):
    """Exhaustive argmax over the sampled window with the documented
    tie-break (lower |omega|, lower v, positive omega)."""
    dv = params.a_v * params.control_dt
    dw = params.a_omega * params.control_dt
    cv = min(max(current.v, params.v_min), params.v_max)
    cw = min(max(current.omega, -params.omega_max), params.omega_max)
    v_lo, v_hi = max(params.v_min, cv - dv), min(params.v_max, cv + dv)
    w_lo, w_hi = max(-params.omega_max, cw - dw), min(params.omega_max, cw + dw)
    best = None
    best_key = None
    for i in range(params.n_v):
        v = v_lo + (v_hi - v_lo) * i / (params.n_v - 1)
        for j in range(params.n_omega):
            w = w_lo + (w_hi - w_lo) * j / (params.n_omega - 1)
            total, admissible = score_oracle(pose, v, w, goal, snap, params)
            if not admissible:
                continue
            key = (total, -abs(w), -v, 1.0 if w > 0 else 0.0)
            if best_key is None or key > best_key:
                best_key = key
                best = (v, w)
    return best

"""Pure-Python kernels: the reference implementation of the hot loops.

The compiled extension (``_core.pyx``) is a line-for-line transliteration of
this module; both are required to produce bit-identical float results, so any
change here must be mirrored there (the cross-backend test enforces it).
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "pure"

_INF = math.inf


def _normalize(a: float) -> float:
    a = math.fmod(a + math.pi, 2.0 * math.pi)
    if a <= 0.0:
        a += 2.0 * math.pi
    return a - math.pi


def raycast(bounds, disks, rects, x, y, theta,
            angle_min, angle_inc, n_beams, range_max):
    """Cast ``n_beams`` rays from (x, y, theta) against walls and obstacles.

    bounds: (x0, y0, x1, y1); disks: (n, 3) cx cy r; rects: (m, 4) x0 y0 x1 y1.
    Returns (ranges float64[n_beams], no_return uint8[n_beams]).
    """
    bx0, by0, bx1, by1 = float(bounds[0]), float(bounds[1]), float(bounds[2]), float(bounds[3])
    nd = len(disks)
    nr = len(rects)
    ranges = np.empty(n_beams, dtype=np.float64)
    no_ret = np.zeros(n_beams, dtype=np.uint8)

    for i in range(n_beams):
        bearing = theta + angle_min + i * angle_inc
        dx = math.cos(bearing)
        dy = math.sin(bearing)

        # walls: nearest positive exit through the bounding box
        t_hit = _INF
        if dx > 0.0:
            t_hit = (bx1 - x) / dx
        elif dx < 0.0:
            t_hit = (bx0 - x) / dx
        if dy > 0.0:
            t = (by1 - y) / dy
            if t < t_hit:
                t_hit = t
        elif dy < 0.0:
            t = (by0 - y) / dy
            if t < t_hit:
                t_hit = t

        for k in range(nd):
            cx = disks[k, 0] - x
            cy = disks[k, 1] - y
            r = disks[k, 2]
            b = cx * dx + cy * dy
            disc = b * b - (cx * cx + cy * cy - r * r)
            if disc >= 0.0:
                t = b - math.sqrt(disc)
                if 0.0 < t < t_hit:
                    t_hit = t

        for k in range(nr):
            # slab test
            if dx != 0.0:
                inv = 1.0 / dx
                tx0 = (rects[k, 0] - x) * inv
                tx1 = (rects[k, 2] - x) * inv
                if tx0 > tx1:
                    tx0, tx1 = tx1, tx0
            elif rects[k, 0] <= x <= rects[k, 2]:
                tx0, tx1 = -_INF, _INF
            else:
                continue
            if dy != 0.0:
                inv = 1.0 / dy
                ty0 = (rects[k, 1] - y) * inv
                ty1 = (rects[k, 3] - y) * inv
                if ty0 > ty1:
                    ty0, ty1 = ty1, ty0
            elif rects[k, 1] <= y <= rects[k, 3]:
                ty0, ty1 = -_INF, _INF
            else:
                continue
            tmin = tx0 if tx0 > ty0 else ty0
            tmax = tx1 if tx1 < ty1 else ty1
            if tmax >= tmin and 0.0 < tmin < t_hit:
                t_hit = tmin

        if t_hit > range_max:
            ranges[i] = range_max
            no_ret[i] = 1
        else:
            ranges[i] = t_hit
    return ranges, no_ret


def integrate_scan(logodds, origin_x, origin_y, resolution,
                   x, y, theta, angle_min, angle_inc,
                   ranges, no_return, l_occ, l_free, l_max):
    """Fold one scan into a log-odds grid (in place).

    Free update goes to the cells the ray interior crosses, excluding both the
    robot's own cell and the endpoint cell; the endpoint cell gets the
    occupied update unless the beam is a no-return. Beams leaving the grid are
    truncated at the boundary.
    """
    height, width = logodds.shape
    n_beams = len(ranges)
    cs = int(math.floor((x - origin_x) / resolution))
    rs = int(math.floor((y - origin_y) / resolution))

    for i in range(n_beams):
        bearing = theta + angle_min + i * angle_inc
        rng = ranges[i]
        ex = x + rng * math.cos(bearing)
        ey = y + rng * math.sin(bearing)

        # endpoint cell, right-closed at the grid's outer edge (a dead-on wall
        # hit lands exactly on the edge; it belongs to the last inside cell)
        ce = int(math.floor((ex - origin_x) / resolution))
        re = int(math.floor((ey - origin_y) / resolution))
        if ce == width and ex - origin_x <= width * resolution:
            ce = width - 1
        if re == height and ey - origin_y <= height * resolution:
            re = height - 1
        end_inside = 0 <= ce < width and 0 <= re < height

        # grid traversal (Amanatides-Woo), marking interior-crossed cells free
        dx = ex - x
        dy = ey - y
        col = cs
        row = rs
        if dx > 0.0:
            step_c = 1
            t_delta_c = resolution / dx
            t_max_c = (origin_x + (cs + 1) * resolution - x) / dx
        elif dx < 0.0:
            step_c = -1
            t_delta_c = -resolution / dx
            t_max_c = (origin_x + cs * resolution - x) / dx
        else:
            step_c = 0
            t_delta_c = _INF
            t_max_c = _INF
        if dy > 0.0:
            step_r = 1
            t_delta_r = resolution / dy
            t_max_r = (origin_y + (rs + 1) * resolution - y) / dy
        elif dy < 0.0:
            step_r = -1
            t_delta_r = -resolution / dy
            t_max_r = (origin_y + rs * resolution - y) / dy
        else:
            step_r = 0
            t_delta_r = _INF
            t_max_r = _INF

        while not (col == ce and row == re):
            if t_max_c < t_max_r:
                t = t_max_c
                col += step_c
                t_max_c += t_delta_c
            elif t_max_r < t_max_c:
                t = t_max_r
                row += step_r
                t_max_r += t_delta_r
            else:
                # exact corner crossing: step diagonally
                t = t_max_c
                if t == _INF:
                    break
                col += step_c
                row += step_r
                t_max_c += t_delta_c
                t_max_r += t_delta_r
            if t >= 1.0:
                break
            if col < 0 or col >= width or row < 0 or row >= height:
                break
            if col == ce and row == re:
                break
            lo = logodds[row, col] + l_free
            if lo < -l_max:
                lo = -l_max
            elif lo > l_max:
                lo = l_max
            logodds[row, col] = lo

        if end_inside and not no_return[i] and not (ce == cs and re == rs):
            lo = logodds[re, ce] + l_occ
            if lo > l_max:
                lo = l_max
            elif lo < -l_max:
                lo = -l_max
            logodds[re, ce] = lo


def rollout(x, y, theta, v, w, dt, n_steps,
            dist, blocked, origin_x, origin_y, resolution, robot_radius):
    """Forward-simulate a constant (v, w) command and score it against a grid.

    ``dist`` holds metres to the nearest occupied cell centre per cell;
    ``blocked`` is the inflated grid. Returns
    (end_x, end_y, end_theta, min_clearance, collided).

    If the start cell is already blocked (robot inside an inflated bubble,
    e.g. freshly stamped feedback obstacles), the rollout is an escape
    attempt: it must leave blocked space without digging deeper, and
    clearance is measured over the free samples it reaches.
    """
    height, width = dist.shape
    col = int(math.floor((x - origin_x) / resolution))
    row = int(math.floor((y - origin_y) / resolution))
    start_inside = 0 <= col < width and 0 <= row < height
    escaped = 1
    start_dist = 0.0
    if start_inside and blocked[row, col]:
        escaped = 0
        start_dist = dist[row, col]
    min_clear = _INF
    collided = 0
    for _ in range(n_steps):
        x = x + v * math.cos(theta) * dt
        y = y + v * math.sin(theta) * dt
        theta = _normalize(theta + w * dt)
        col = int(math.floor((x - origin_x) / resolution))
        row = int(math.floor((y - origin_y) / resolution))
        if col < 0 or col >= width or row < 0 or row >= height:
            collided = 1
            min_clear = 0.0
            break
        if escaped:
            clear = dist[row, col] - robot_radius
            if clear < min_clear:
                min_clear = clear
            if blocked[row, col]:
                collided = 1
                break
        else:
            if not blocked[row, col]:
                escaped = 1
                clear = dist[row, col] - robot_radius
                if clear < min_clear:
                    min_clear = clear
            elif dist[row, col] < start_dist - 0.051:
                collided = 1
                break
    if not escaped:
        collided = 1
        min_clear = 0.0
    return x, y, theta, min_clear, collided

# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: line-for-line transliteration of ``_purepy``.

Float operation order matches the pure backend exactly (and the extension is
built with -ffp-contract=off), so results are bit-identical.
"""

from libc.math cimport cos, sin, sqrt, fmod, floor, INFINITY, M_PI

import numpy as np

BACKEND = "compiled"


cdef inline double _normalize(double a) nogil:
    a = fmod(a + M_PI, 2.0 * M_PI)
    if a <= 0.0:
        a += 2.0 * M_PI
    return a - M_PI


def raycast(bounds, disks, rects, double x, double y, double theta,
            double angle_min, double angle_inc, int n_beams, double range_max):
    cdef double bx0 = bounds[0], by0 = bounds[1], bx1 = bounds[2], by1 = bounds[3]
    cdef double[:, ::1] dk = np.ascontiguousarray(disks, dtype=np.float64).reshape(-1, 3)
    cdef double[:, ::1] rc = np.ascontiguousarray(rects, dtype=np.float64).reshape(-1, 4)
    cdef int nd = dk.shape[0], nr = rc.shape[0]
    ranges_arr = np.empty(n_beams, dtype=np.float64)
    no_ret_arr = np.zeros(n_beams, dtype=np.uint8)
    cdef double[::1] ranges = ranges_arr
    cdef unsigned char[::1] no_ret = no_ret_arr

    cdef int i, k
    cdef double bearing, dx, dy, t_hit, t, cx, cy, r, b, disc, inv
    cdef double tx0, tx1, ty0, ty1, tmin, tmax, tmp
    with nogil:
        for i in range(n_beams):
            bearing = theta + angle_min + i * angle_inc
            dx = cos(bearing)
            dy = sin(bearing)

            t_hit = INFINITY
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
                cx = dk[k, 0] - x
                cy = dk[k, 1] - y
                r = dk[k, 2]
                b = cx * dx + cy * dy
                disc = b * b - (cx * cx + cy * cy - r * r)
                if disc >= 0.0:
                    t = b - sqrt(disc)
                    if 0.0 < t < t_hit:
                        t_hit = t

            for k in range(nr):
                if dx != 0.0:
                    inv = 1.0 / dx
                    tx0 = (rc[k, 0] - x) * inv
                    tx1 = (rc[k, 2] - x) * inv
                    if tx0 > tx1:
                        tmp = tx0; tx0 = tx1; tx1 = tmp
                elif rc[k, 0] <= x <= rc[k, 2]:
                    tx0 = -INFINITY; tx1 = INFINITY
                else:
                    continue
                if dy != 0.0:
                    inv = 1.0 / dy
                    ty0 = (rc[k, 1] - y) * inv
                    ty1 = (rc[k, 3] - y) * inv
                    if ty0 > ty1:
                        tmp = ty0; ty0 = ty1; ty1 = tmp
                elif rc[k, 1] <= y <= rc[k, 3]:
                    ty0 = -INFINITY; ty1 = INFINITY
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
    return ranges_arr, no_ret_arr


def integrate_scan(logodds, double origin_x, double origin_y, double resolution,
                   double x, double y, double theta, double angle_min, double angle_inc,
                   ranges, no_return, double l_occ, double l_free, double l_max):
    cdef double[:, ::1] grid = logodds
    cdef double[::1] rng_v = np.ascontiguousarray(ranges, dtype=np.float64)
    cdef unsigned char[::1] nret = np.ascontiguousarray(no_return, dtype=np.uint8)
    cdef int height = grid.shape[0], width = grid.shape[1]
    cdef int n_beams = rng_v.shape[0]
    cdef int cs = <int>floor((x - origin_x) / resolution)
    cdef int rs = <int>floor((y - origin_y) / resolution)

    cdef int i, ce, re, col, row, step_c, step_r
    cdef double bearing, rng, ex, ey, dx, dy, t
    cdef double t_delta_c, t_max_c, t_delta_r, t_max_r, lo
    cdef bint end_inside
    with nogil:
        for i in range(n_beams):
            bearing = theta + angle_min + i * angle_inc
            rng = rng_v[i]
            ex = x + rng * cos(bearing)
            ey = y + rng * sin(bearing)

            ce = <int>floor((ex - origin_x) / resolution)
            re = <int>floor((ey - origin_y) / resolution)
            if ce == width and ex - origin_x <= width * resolution:
                ce = width - 1
            if re == height and ey - origin_y <= height * resolution:
                re = height - 1
            end_inside = 0 <= ce < width and 0 <= re < height

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
                t_delta_c = INFINITY
                t_max_c = INFINITY
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
                t_delta_r = INFINITY
                t_max_r = INFINITY

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
                    t = t_max_c
                    if t == INFINITY:
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
                lo = grid[row, col] + l_free
                if lo < -l_max:
                    lo = -l_max
                elif lo > l_max:
                    lo = l_max
                grid[row, col] = lo

            if end_inside and not nret[i] and not (ce == cs and re == rs):
                lo = grid[re, ce] + l_occ
                if lo > l_max:
                    lo = l_max
                elif lo < -l_max:
                    lo = -l_max
                grid[re, ce] = lo


def rollout(double x, double y, double theta, double v, double w,
            double dt, int n_steps, dist, blocked,
            double origin_x, double origin_y, double resolution, double robot_radius):
    cdef double[:, ::1] dist_v = dist
    cdef unsigned char[:, ::1] blk = blocked
    cdef int height = dist_v.shape[0], width = dist_v.shape[1]
    cdef int col = <int>floor((x - origin_x) / resolution)
    cdef int row = <int>floor((y - origin_y) / resolution)
    cdef bint start_inside = 0 <= col < width and 0 <= row < height
    cdef int escaped = 1
    cdef double start_dist = 0.0
    if start_inside and blk[row, col]:
        escaped = 0
        start_dist = dist_v[row, col]
    cdef double min_clear = INFINITY
    cdef int collided = 0
    cdef int k
    cdef double clear
    with nogil:
        for k in range(n_steps):
            x = x + v * cos(theta) * dt
            y = y + v * sin(theta) * dt
            theta = _normalize(theta + w * dt)
            col = <int>floor((x - origin_x) / resolution)
            row = <int>floor((y - origin_y) / resolution)
            if col < 0 or col >= width or row < 0 or row >= height:
                collided = 1
                min_clear = 0.0
                break
            if escaped:
                clear = dist_v[row, col] - robot_radius
                if clear < min_clear:
                    min_clear = clear
                if blk[row, col]:
                    collided = 1
                    break
            else:
                if not blk[row, col]:
                    escaped = 1
                    clear = dist_v[row, col] - robot_radius
                    if clear < min_clear:
                        min_clear = clear
                elif dist_v[row, col] < start_dist - 0.051:
                    collided = 1
                    break
    if not escaped:
        collided = 1
        min_clear = 0.0
    return x, y, theta, min_clear, collided

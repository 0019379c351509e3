"""Numba kernels for the collision/clearance hot path.

These loops replace vectorized numpy for the per-configuration
predicates, where batch sizes are small (2-16) and numpy dispatch
overhead dominates.  Each kernel takes the environment's pre-flattened
segment arrays; obstacle bounding boxes give a cheap reject before the
exact tests.  Semantics match the module-level geometry predicates:
orientation tests with an absolute 1e-12 epsilon, boundary contact
counts as collision.
"""

from __future__ import annotations

import numpy as np
from numba import njit

EPS = 1e-12


@njit(cache=True, fastmath=False)
def _seg_cross(p0x, p0y, p1x, p1y, q0x, q0y, q1x, q1y):
    o1 = (p1x - p0x) * (q0y - p0y) - (p1y - p0y) * (q0x - p0x)
    o2 = (p1x - p0x) * (q1y - p0y) - (p1y - p0y) * (q1x - p0x)
    o3 = (q1x - q0x) * (p0y - q0y) - (q1y - q0y) * (p0x - q0x)
    o4 = (q1x - q0x) * (p1y - q0y) - (q1y - q0y) * (p1x - q0x)
    if ((o1 > EPS and o2 < -EPS) or (o1 < -EPS and o2 > EPS)) and (
        (o3 > EPS and o4 < -EPS) or (o3 < -EPS and o4 > EPS)
    ):
        return True
    # collinear / endpoint touches
    if abs(o1) <= EPS:
        if (
            min(p0x, p1x) - EPS <= q0x <= max(p0x, p1x) + EPS
            and min(p0y, p1y) - EPS <= q0y <= max(p0y, p1y) + EPS
        ):
            return True
    if abs(o2) <= EPS:
        if (
            min(p0x, p1x) - EPS <= q1x <= max(p0x, p1x) + EPS
            and min(p0y, p1y) - EPS <= q1y <= max(p0y, p1y) + EPS
        ):
            return True
    if abs(o3) <= EPS:
        if (
            min(q0x, q1x) - EPS <= p0x <= max(q0x, q1x) + EPS
            and min(q0y, q1y) - EPS <= p0y <= max(q0y, q1y) + EPS
        ):
            return True
    if abs(o4) <= EPS:
        if (
            min(q0x, q1x) - EPS <= p1x <= max(q0x, q1x) + EPS
            and min(q0y, q1y) - EPS <= p1y <= max(q0y, q1y) + EPS
        ):
            return True
    return False


@njit(cache=True, fastmath=False)
def _point_in_polygon(px, py, seg_a, seg_b, lo, hi):
    """Winding-number containment over segments [lo:hi); boundary
    contact (within EPS) counts as inside."""
    wind = 0
    for s in range(lo, hi):
        ax, ay = seg_a[s, 0], seg_a[s, 1]
        bx, by = seg_b[s, 0], seg_b[s, 1]
        cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
        if abs(cross) <= EPS:
            if (
                min(ax, bx) - EPS <= px <= max(ax, bx) + EPS
                and min(ay, by) - EPS <= py <= max(ay, by) + EPS
            ):
                return True
        if ay <= py < by and cross > EPS:
            wind += 1
        elif by <= py < ay and cross < -EPS:
            wind -= 1
    return wind != 0


@njit(cache=True, fastmath=False)
def _point_in_vertex_loop(px, py, verts):
    """Winding of a point against a polygon given as a (K, 2) vertex loop."""
    wind = 0
    k = verts.shape[0]
    for i in range(k):
        ax, ay = verts[i, 0], verts[i, 1]
        j = i + 1 if i + 1 < k else 0
        bx, by = verts[j, 0], verts[j, 1]
        cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
        if ay <= py < by and cross > EPS:
            wind += 1
        elif by <= py < ay and cross < -EPS:
            wind -= 1
    return wind != 0


@njit(cache=True, fastmath=False)
def points_in_obstacles(pts, seg_a, seg_b, cum, bbox, out):
    """Per point: containment in (or boundary contact with) any obstacle."""
    n_obs = cum.shape[0] - 1
    for i in range(pts.shape[0]):
        px, py = pts[i, 0], pts[i, 1]
        hit = False
        for o in range(n_obs):
            if px < bbox[o, 0] or px > bbox[o, 2] or py < bbox[o, 1] or py > bbox[o, 3]:
                continue
            if _point_in_polygon(px, py, seg_a, seg_b, cum[o], cum[o + 1]):
                hit = True
                break
        out[i] = hit


@njit(cache=True, fastmath=False)
def point_valid_full(cfgs, seg_a, seg_b, cum, bbox, xmin, ymin, xmax, ymax, out):
    n_obs = cum.shape[0] - 1
    for i in range(cfgs.shape[0]):
        px, py = cfgs[i, 0], cfgs[i, 1]
        if px < xmin or px > xmax or py < ymin or py > ymax:
            out[i] = False
            continue
        ok = True
        for o in range(n_obs):
            if px < bbox[o, 0] or px > bbox[o, 2] or py < bbox[o, 1] or py > bbox[o, 3]:
                continue
            if _point_in_polygon(px, py, seg_a, seg_b, cum[o], cum[o + 1]):
                ok = False
                break
        out[i] = ok


@njit(cache=True, fastmath=False)
def rigid_valid(cfgs, shape, seg_a, seg_b, cum, bbox,
                xmin, ymin, xmax, ymax, full_check, out):
    """Batch SE(2) rigid-body validity.

    ``full_check`` true: boundary containment, surface crossings, and
    mutual containment (either direction) all count as collision.
    False (surface-only semantics): only the reference-point bounds and
    surface crossings are tested, so containment passes undetected.
    """
    n = cfgs.shape[0]
    kk = shape.shape[0]
    n_obs = cum.shape[0] - 1
    wx = np.empty(kk)
    wy = np.empty(kk)
    for i in range(n):
        x, y, th = cfgs[i, 0], cfgs[i, 1], cfgs[i, 2]
        if not full_check:
            if x < xmin or x > xmax or y < ymin or y > ymax:
                out[i] = False
                continue
        c = np.cos(th)
        s = np.sin(th)
        rxmin = rymin = np.inf
        rxmax = rymax = -np.inf
        for k in range(kk):
            vx = c * shape[k, 0] - s * shape[k, 1] + x
            vy = s * shape[k, 0] + c * shape[k, 1] + y
            wx[k] = vx
            wy[k] = vy
            if vx < rxmin:
                rxmin = vx
            if vx > rxmax:
                rxmax = vx
            if vy < rymin:
                rymin = vy
            if vy > rymax:
                rymax = vy
        if full_check and (rxmin < xmin or rxmax > xmax or rymin < ymin or rymax > ymax):
            out[i] = False
            continue
        collide = False
        for o in range(n_obs):
            if (
                bbox[o, 2] < rxmin
                or bbox[o, 0] > rxmax
                or bbox[o, 3] < rymin
                or bbox[o, 1] > rymax
            ):
                continue
            for k in range(kk):
                j = k + 1 if k + 1 < kk else 0
                for g in range(cum[o], cum[o + 1]):
                    if _seg_cross(
                        wx[k], wy[k], wx[j], wy[j],
                        seg_a[g, 0], seg_a[g, 1], seg_b[g, 0], seg_b[g, 1],
                    ):
                        collide = True
                        break
                if collide:
                    break
            if collide:
                break
            if full_check:
                # boundaries disjoint: containment is all-or-nothing, so
                # one probe vertex per direction suffices
                if _point_in_polygon(wx[0], wy[0], seg_a, seg_b, cum[o], cum[o + 1]):
                    collide = True
                    break
                wv = np.empty((kk, 2))
                for k in range(kk):
                    wv[k, 0] = wx[k]
                    wv[k, 1] = wy[k]
                if _point_in_vertex_loop(seg_a[cum[o], 0], seg_a[cum[o], 1], wv):
                    collide = True
                    break
        out[i] = not collide


@njit(cache=True, fastmath=False)
def nearest_boundary(px, py, seg_a, seg_b, walls_a, walls_b):
    """Squared distance and witness point of the nearest obstacle or
    boundary segment."""
    best = np.inf
    bwx = px
    bwy = py
    for arrs in range(2):
        a = seg_a if arrs == 0 else walls_a
        b = seg_b if arrs == 0 else walls_b
        for s in range(a.shape[0]):
            ax, ay = a[s, 0], a[s, 1]
            dx, dy = b[s, 0] - ax, b[s, 1] - ay
            len2 = dx * dx + dy * dy
            if len2 > EPS:
                t = ((px - ax) * dx + (py - ay) * dy) / len2
                if t < 0.0:
                    t = 0.0
                elif t > 1.0:
                    t = 1.0
            else:
                t = 0.0
            cx = ax + t * dx
            cy = ay + t * dy
            d2 = (px - cx) * (px - cx) + (py - cy) * (py - cy)
            if d2 < best:
                best = d2
                bwx = cx
                bwy = cy
    return best, bwx, bwy

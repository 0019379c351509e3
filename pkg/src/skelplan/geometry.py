"""Exact 2D polygon geometry, collision checking, and clearance queries.

All collision and clearance queries are instrumented: every call to
:func:`is_valid_full`, :func:`is_valid_partial`, or :func:`clearance`
increments exactly one counter on the environment's
:class:`CollisionCounter`.  Planner benchmarks read those counters, so
internal helpers (prefixed with ``_``) never touch them.

Geometry predicates use orientation tests on doubles with a 1e-12
epsilon; coordinates are assumed well separated at that scale.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels

EPS = 1e-12

TWO_PI = 2.0 * math.pi


def wrap_angle(theta: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    t = math.fmod(theta + math.pi, TWO_PI)
    if t <= 0.0:
        t += TWO_PI
    return t - math.pi


@dataclass(frozen=True)
class Configuration:
    """A robot pose: workspace position plus heading (radians, (-pi, pi]).

    Point robots carry ``theta == 0.0``.
    """

    x: float
    y: float
    theta: float = 0.0

    def position(self) -> tuple[float, float]:
        return (self.x, self.y)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.theta)


def cspace_distance(q1: Configuration, q2: Configuration, angular_weight: float) -> float:
    """Weighted SE(2) metric: Euclidean position + angular_weight * |dtheta|."""
    d = math.hypot(q2.x - q1.x, q2.y - q1.y)
    if angular_weight > 0.0:
        d += angular_weight * abs(wrap_angle(q2.theta - q1.theta))
    return d


def interpolate(q1: Configuration, q2: Configuration, t: float) -> Configuration:
    """Straight-line local plan: linear position, shortest-arc heading."""
    dtheta = wrap_angle(q2.theta - q1.theta)
    return Configuration(
        q1.x + t * (q2.x - q1.x),
        q1.y + t * (q2.y - q1.y),
        wrap_angle(q1.theta + t * dtheta),
    )


class Polygon:
    """Simple polygon with counterclockwise vertices (signed area > 0)."""

    __slots__ = ("vertices",)

    def __init__(self, vertices) -> None:
        pts = np.asarray(vertices, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 3:
            raise ValueError("polygon needs at least 3 two-dimensional vertices")
        if _signed_area(pts) <= 0.0:
            raise ValueError("polygon vertices must be counterclockwise (signed area > 0)")
        if _self_intersects(pts):
            raise ValueError("polygon must be simple (non-self-intersecting)")
        self.vertices = pts

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def signed_area(self) -> float:
        return _signed_area(self.vertices)

    def bounds(self) -> tuple[float, float, float, float]:
        lo = self.vertices.min(axis=0)
        hi = self.vertices.max(axis=0)
        return (lo[0], lo[1], hi[0], hi[1])

    def centroid(self) -> tuple[float, float]:
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        cross = v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]
        a = cross.sum() / 2.0
        cx = ((v[:, 0] + w[:, 0]) * cross).sum() / (6.0 * a)
        cy = ((v[:, 1] + w[:, 1]) * cross).sum() / (6.0 * a)
        return (cx, cy)

    def contains_point(self, x: float, y: float) -> bool:
        """Winding-number containment; points on the boundary count as inside."""
        a = self.vertices
        b = np.ascontiguousarray(np.roll(a, -1, axis=0))
        return bool(_kernels._point_in_polygon(float(x), float(y), a, b, 0, len(a)))

    def to_list(self) -> list[list[float]]:
        return self.vertices.tolist()


def _signed_area(pts: np.ndarray) -> float:
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _self_intersects(pts: np.ndarray) -> bool:
    n = len(pts)
    segs = [(pts[i], pts[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue  # adjacent segments share an endpoint
            if _segments_cross_scalar(segs[i][0], segs[i][1], segs[j][0], segs[j][1]):
                return True
    return False


def _orient(ax, ay, bx, by, cx, cy):
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def _segments_cross_scalar(p, q, r, s) -> bool:
    o1 = _orient(p[0], p[1], q[0], q[1], r[0], r[1])
    o2 = _orient(p[0], p[1], q[0], q[1], s[0], s[1])
    o3 = _orient(r[0], r[1], s[0], s[1], p[0], p[1])
    o4 = _orient(r[0], r[1], s[0], s[1], q[0], q[1])
    if ((o1 > EPS and o2 < -EPS) or (o1 < -EPS and o2 > EPS)) and (
        (o3 > EPS and o4 < -EPS) or (o3 < -EPS and o4 > EPS)
    ):
        return True
    # collinear / touching cases
    for o, a, b, c in ((o1, p, q, r), (o2, p, q, s), (o3, r, s, p), (o4, r, s, q)):
        if abs(o) <= EPS and _on_segment(a, b, c):
            return True
    return False


def _on_segment(a, b, c) -> bool:
    return (
        min(a[0], b[0]) - EPS <= c[0] <= max(a[0], b[0]) + EPS
        and min(a[1], b[1]) - EPS <= c[1] <= max(a[1], b[1]) + EPS
    )


@dataclass
class RobotModel:
    """Point or rigid-polygon robot.

    ``bounding_radius`` is the radius of the minimal circle enclosing the
    shape, centered at the reference point (the configuration's (x, y));
    it is 0 for point robots.
    """

    kind: str  # "point" | "rigid"
    shape: Polygon | None = None
    bounding_radius: float = field(init=False, default=0.0)

    def __post_init__(self) -> None:
        if self.kind not in ("point", "rigid"):
            raise ValueError(f"unknown robot kind {self.kind!r}")
        if self.kind == "rigid":
            if self.shape is None:
                raise ValueError("rigid robot requires a shape polygon")
            self.bounding_radius = float(
                np.max(np.hypot(self.shape.vertices[:, 0], self.shape.vertices[:, 1]))
            )
        elif self.shape is not None:
            raise ValueError("point robot takes no shape")

    def placed_vertices(self, q: Configuration) -> np.ndarray:
        """World-frame shape vertices for pose q (rigid robots only)."""
        c, s = math.cos(q.theta), math.sin(q.theta)
        v = self.shape.vertices
        out = np.empty_like(v)
        out[:, 0] = c * v[:, 0] - s * v[:, 1] + q.x
        out[:, 1] = s * v[:, 0] + c * v[:, 1] + q.y
        return out


@dataclass
class CollisionCounter:
    """Tally of collision/clearance queries; monotone within a run."""

    full_cd_calls: int = 0
    partial_cd_calls: int = 0
    clearance_calls: int = 0

    @property
    def total(self) -> int:
        return self.full_cd_calls + self.partial_cd_calls + self.clearance_calls

    def reset(self) -> None:
        self.full_cd_calls = 0
        self.partial_cd_calls = 0
        self.clearance_calls = 0

    def snapshot(self) -> "CollisionCounter":
        return replace(self)

    def delta(self, since: "CollisionCounter") -> "CollisionCounter":
        return CollisionCounter(
            self.full_cd_calls - since.full_cd_calls,
            self.partial_cd_calls - since.partial_cd_calls,
            self.clearance_calls - since.clearance_calls,
        )

    def as_dict(self) -> dict:
        return {
            "full_cd_calls": self.full_cd_calls,
            "partial_cd_calls": self.partial_cd_calls,
            "clearance_calls": self.clearance_calls,
            "total": self.total,
        }


class Environment:
    """Rectangular workspace with polygonal obstacles and a robot model.

    Obstacle segment data is pre-flattened into numpy arrays so the
    per-query predicates run vectorized.  The environment itself is
    immutable after construction except for the attached counter; trials
    that must run in parallel should each own a separate instance.
    """

    def __init__(self, boundary, obstacles, robot: RobotModel) -> None:
        xmin, ymin, xmax, ymax = (float(v) for v in boundary)
        if not (xmax > xmin and ymax > ymin):
            raise ValueError("boundary must be a non-degenerate rectangle")
        self.boundary = (xmin, ymin, xmax, ymax)
        self.obstacles: list[Polygon] = list(obstacles)
        self.robot = robot
        self.counter = CollisionCounter()
        for i, ob in enumerate(self.obstacles):
            bx0, by0, bx1, by1 = ob.bounds()
            if bx0 < xmin - EPS or by0 < ymin - EPS or bx1 > xmax + EPS or by1 > ymax + EPS:
                raise ValueError(f"obstacle {i} extends outside the boundary")
        self._build_segment_cache()

    def _build_segment_cache(self) -> None:
        starts, ends, offsets = [], [], [0]
        for ob in self.obstacles:
            v = ob.vertices
            starts.append(v)
            ends.append(np.roll(v, -1, axis=0))
            offsets.append(offsets[-1] + len(v))
        if starts:
            self._seg_a = np.ascontiguousarray(np.vstack(starts))
            self._seg_b = np.ascontiguousarray(np.vstack(ends))
            self._bbox = np.ascontiguousarray([ob.bounds() for ob in self.obstacles])
        else:
            self._seg_a = np.zeros((0, 2))
            self._seg_b = np.zeros((0, 2))
            self._bbox = np.zeros((0, 4))
        self._cum = np.asarray(offsets, dtype=np.int64)
        xmin, ymin, xmax, ymax = self.boundary
        # boundary wall segments, CCW
        self._wall_a = np.array([[xmin, ymin], [xmax, ymin], [xmax, ymax], [xmin, ymax]])
        self._wall_b = np.ascontiguousarray(np.roll(self._wall_a, -1, axis=0))

    # -- derived parameters -------------------------------------------------

    @property
    def width(self) -> float:
        return self.boundary[2] - self.boundary[0]

    @property
    def height(self) -> float:
        return self.boundary[3] - self.boundary[1]

    def default_resolution(self) -> float:
        """Default collision-check step: 5% of the smaller boundary side."""
        return 0.05 * min(self.width, self.height)

    def contains_position(self, x: float, y: float) -> bool:
        xmin, ymin, xmax, ymax = self.boundary
        return xmin <= x <= xmax and ymin <= y <= ymax

    def copy(self) -> "Environment":
        """Independent instance with a fresh counter (for parallel trials)."""
        return Environment(self.boundary, self.obstacles, self.robot)

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        robot: dict = {"kind": self.robot.kind}
        if self.robot.kind == "rigid":
            robot["shape"] = self.robot.shape.to_list()
        return {
            "boundary": list(self.boundary),
            "robot": robot,
            "obstacles": [ob.to_list() for ob in self.obstacles],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Environment":
        rd = data["robot"]
        kind = rd["kind"]
        if kind == "point":
            robot = RobotModel(kind="point")
        else:
            robot = RobotModel(kind="rigid", shape=Polygon(rd["shape"]))
        obstacles = [Polygon(p) for p in data["obstacles"]]
        return cls(data["boundary"], obstacles, robot)

    def save(self, path) -> None:
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=2)

    @classmethod
    def load(cls, path) -> "Environment":
        with open(path) as f:
            return cls.from_dict(json.load(f))


# ---------------------------------------------------------------------------
# uninstrumented predicates (numba kernels)
# ---------------------------------------------------------------------------


def points_in_obstacles_mask(env: Environment, points: np.ndarray) -> np.ndarray:
    """Per-point containment in any obstacle (boundary contact counts)."""
    pts = np.ascontiguousarray(points, dtype=float)
    out = np.empty(len(pts), dtype=np.bool_)
    if not env.obstacles:
        out[:] = False
        return out
    _kernels.points_in_obstacles(pts, env._seg_a, env._seg_b, env._cum, env._bbox, out)
    return out


def _point_in_obstacles(env: Environment, x: float, y: float) -> bool:
    return bool(points_in_obstacles_mask(env, np.array([[x, y]]))[0])


def _valid_full_batch(env: Environment, cfgs: np.ndarray) -> np.ndarray:
    """Full validity for a (n, 3) batch of configurations."""
    cfgs = np.ascontiguousarray(np.atleast_2d(np.asarray(cfgs, dtype=float)))
    out = np.empty(len(cfgs), dtype=np.bool_)
    xmin, ymin, xmax, ymax = env.boundary
    if env.robot.kind == "point":
        _kernels.point_valid_full(
            cfgs, env._seg_a, env._seg_b, env._cum, env._bbox, xmin, ymin, xmax, ymax, out
        )
    else:
        _kernels.rigid_valid(
            cfgs, env.robot.shape.vertices, env._seg_a, env._seg_b, env._cum, env._bbox,
            xmin, ymin, xmax, ymax, True, out,
        )
    return out


def _valid_partial_batch(env: Environment, cfgs: np.ndarray) -> np.ndarray:
    """Surface-only validity for a (n, 3) batch."""
    cfgs = np.ascontiguousarray(np.atleast_2d(np.asarray(cfgs, dtype=float)))
    if env.robot.kind == "point":
        # a point has no surface; fall back to full-validity semantics
        return _valid_full_batch(env, cfgs)
    out = np.empty(len(cfgs), dtype=np.bool_)
    xmin, ymin, xmax, ymax = env.boundary
    _kernels.rigid_valid(
        cfgs, env.robot.shape.vertices, env._seg_a, env._seg_b, env._cum, env._bbox,
        xmin, ymin, xmax, ymax, False, out,
    )
    return out


def _valid_full(env: Environment, q: Configuration) -> bool:
    return bool(_valid_full_batch(env, np.array([q.as_tuple()]))[0])


def _valid_partial(env: Environment, q: Configuration) -> bool:
    return bool(_valid_partial_batch(env, np.array([q.as_tuple()]))[0])


# ---------------------------------------------------------------------------
# instrumented operations
# ---------------------------------------------------------------------------


def is_valid_full(env: Environment, q: Configuration) -> bool:
    """Full collision check: robot at q intersects no obstacle and lies
    inside the boundary; containment inside an obstacle is a collision."""
    env.counter.full_cd_calls += 1
    return _valid_full(env, q)


def is_valid_partial(env: Environment, q: Configuration) -> bool:
    """Surface-only collision check: true iff no robot boundary segment
    crosses an obstacle boundary segment.  A robot fully contained in an
    obstacle passes (the documented false negative of partial checking).
    Point robots have no surface and use the full-validity semantics."""
    env.counter.partial_cd_calls += 1
    return _valid_partial(env, q)


def clearance(env: Environment, x: float, y: float) -> float:
    """Distance from a workspace point to the nearest obstacle or
    boundary segment."""
    env.counter.clearance_calls += 1
    return _clearance_witness(env, x, y)[0]


def clearance_witness(env: Environment, x: float, y: float) -> tuple[float, tuple[float, float]]:
    """Clearance plus the nearest boundary point realizing it."""
    env.counter.clearance_calls += 1
    return _clearance_witness(env, x, y)


def _clearance_witness(env: Environment, x: float, y: float) -> tuple[float, tuple[float, float]]:
    d2, wx, wy = _kernels.nearest_boundary(
        float(x), float(y), env._seg_a, env._seg_b, env._wall_a, env._wall_b
    )
    return (math.sqrt(d2), (wx, wy))


def _bisection_order(n: int) -> list[int]:
    """Interior sample indices of 0..n in coarse-to-fine midpoint order."""
    order: list[int] = []
    queue: list[tuple[int, int]] = [(0, n)]
    head = 0
    while head < len(queue):
        lo, hi = queue[head]
        head += 1
        mid = (lo + hi) // 2
        if mid != lo and mid != hi:
            order.append(mid)
            queue.append((lo, mid))
            queue.append((mid, hi))
    return order


def _interpolate_batch(q1: Configuration, q2: Configuration, fracs: np.ndarray) -> np.ndarray:
    dtheta = wrap_angle(q2.theta - q1.theta)
    out = np.empty((len(fracs), 3))
    out[:, 0] = q1.x + fracs * (q2.x - q1.x)
    out[:, 1] = q1.y + fracs * (q2.y - q1.y)
    out[:, 2] = np.mod(q1.theta + fracs * dtheta + math.pi, TWO_PI) - math.pi
    return out


def check_batch(env: Environment, cfgs: np.ndarray, mode: str = "full") -> bool:
    """Validity of every configuration in a (n, 3) batch.

    Counts one collision check per configuration, same as n scalar calls.
    """
    if mode == "full":
        env.counter.full_cd_calls += len(cfgs)
        return bool(_valid_full_batch(env, cfgs).all())
    env.counter.partial_cd_calls += len(cfgs)
    return bool(_valid_partial_batch(env, cfgs).all())


EDGE_CHECK_CHUNK = 8


def edge_valid(
    env: Environment,
    q1: Configuration,
    q2: Configuration,
    resolution: float,
    mode: str = "full",
) -> bool:
    """Validate the straight-line motion q1 -> q2.

    Samples are spaced so consecutive workspace displacement (translation
    plus bounding_radius * |dtheta|, a conservative sweep bound) is at
    most ``resolution``.  Endpoints are checked first, then interior
    samples midpoint-first in small vectorized chunks, so invalid edges
    fail fast.
    """
    if resolution <= 0.0:
        raise ValueError("resolution must be positive")
    check = is_valid_full if mode == "full" else is_valid_partial
    sweep = math.hypot(q2.x - q1.x, q2.y - q1.y) + env.robot.bounding_radius * abs(
        wrap_angle(q2.theta - q1.theta)
    )
    if sweep == 0.0:
        return check(env, q1)
    if not check_batch(env, np.array([q1.as_tuple(), q2.as_tuple()]), mode):
        return False
    n = max(1, math.ceil(sweep / resolution))
    order = np.asarray(_bisection_order(n), dtype=float) / n
    for lo in range(0, len(order), EDGE_CHECK_CHUNK):
        cfgs = _interpolate_batch(q1, q2, order[lo:lo + EDGE_CHECK_CHUNK])
        if not check_batch(env, cfgs, mode):
            return False
    return True

"""Workspace medial-axis skeletons with clearance annotations.

The skeleton is extracted from a rasterized free-space mask: an exact
Euclidean distance transform drives a topology-preserving thinning
(:func:`skimage.morphology.medial_axis`), after which the 1-cell-wide
skeleton is traced into a graph.  Cells with degree != 2 cluster into
vertices; degree-2 chains become edges whose cells are kept as
intermediate points for the sampling regions to follow.

Construction is deterministic: identical (environment, resolution)
inputs produce identical skeletons.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage
from skimage.morphology import medial_axis

from .geometry import Environment, RobotModel, clearance, points_in_obstacles_mask

_STRUCT8 = np.ones((3, 3), dtype=int)


class EmptyFreeSpace(Exception):
    """Raised when the rasterized workspace contains no free cell."""


@dataclass
class SkeletonVertex:
    id: int
    position: tuple[float, float]
    annotation: float = 0.0


@dataclass
class SkeletonEdge:
    id: int
    u: int
    v: int
    intermediates: list[tuple[float, float]]
    weight: float = 0.0

    def other(self, vid: int) -> int:
        return self.v if vid == self.u else self.u


@dataclass
class AcceptanceCriteria:
    """Clearance-threshold policy: an annotation passes iff it is at
    least ``threshold`` (robot bounding radius times a safety factor)."""

    threshold: float = 0.0

    @classmethod
    def for_robot(cls, robot: RobotModel, safety_factor: float = 1.0) -> "AcceptanceCriteria":
        return cls(threshold=robot.bounding_radius * safety_factor)

    def accepts(self, value: float) -> bool:
        return value >= self.threshold


def accepts(policy: AcceptanceCriteria, value: float) -> bool:
    """Pure predicate: does the annotation value satisfy the policy?"""
    return policy.accepts(value)


class AnnotatedSkeleton:
    """Undirected simple graph over the free workspace."""

    def __init__(self, grid_resolution: float) -> None:
        self.grid_resolution = grid_resolution
        self.vertices: dict[int, SkeletonVertex] = {}
        self.edges: dict[int, SkeletonEdge] = {}
        self.adjacency: dict[int, list[int]] = {}
        self.annotated = False
        self._next_vid = 0
        self._next_eid = 0

    # -- construction helpers ------------------------------------------------

    def add_vertex(self, position: tuple[float, float]) -> int:
        vid = self._next_vid
        self._next_vid += 1
        self.vertices[vid] = SkeletonVertex(vid, position)
        self.adjacency[vid] = []
        return vid

    def add_edge(self, u: int, v: int, intermediates: list[tuple[float, float]]) -> int:
        if u == v:
            raise ValueError("self loops are not allowed in the skeleton")
        if self.edge_between(u, v) is not None:
            raise ValueError(f"edge between {u} and {v} already exists")
        eid = self._next_eid
        self._next_eid += 1
        self.edges[eid] = SkeletonEdge(eid, u, v, intermediates)
        self.adjacency[u].append(eid)
        self.adjacency[v].append(eid)
        return eid

    def remove_edge(self, eid: int) -> None:
        e = self.edges.pop(eid)
        self.adjacency[e.u].remove(eid)
        self.adjacency[e.v].remove(eid)

    def remove_vertex(self, vid: int) -> None:
        if self.adjacency[vid]:
            raise ValueError("cannot remove a vertex with incident edges")
        del self.adjacency[vid]
        del self.vertices[vid]

    def edge_between(self, u: int, v: int) -> int | None:
        for eid in self.adjacency[u]:
            if self.edges[eid].other(u) == v:
                return eid
        return None

    def degree(self, vid: int) -> int:
        return len(self.adjacency[vid])

    # -- queries --------------------------------------------------------------

    def oriented_intermediates(self, eid: int, from_vertex: int) -> list[tuple[float, float]]:
        """Edge intermediates ordered to start at ``from_vertex``."""
        e = self.edges[eid]
        if from_vertex == e.u:
            return e.intermediates
        if from_vertex == e.v:
            return list(reversed(e.intermediates))
        raise ValueError(f"vertex {from_vertex} is not an endpoint of edge {eid}")

    def nearest_vertex(self, x: float, y: float) -> int:
        best, best_d = -1, math.inf
        for vid in sorted(self.vertices):
            px, py = self.vertices[vid].position
            d = (px - x) ** 2 + (py - y) ** 2
            if d < best_d:
                best, best_d = vid, d
        return best

    def component_count(self) -> int:
        seen: set[int] = set()
        count = 0
        for start in sorted(self.vertices):
            if start in seen:
                continue
            count += 1
            stack = [start]
            seen.add(start)
            while stack:
                v = stack.pop()
                for eid in self.adjacency[v]:
                    w = self.edges[eid].other(v)
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
        return count

    # -- serialization ---------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "vertices": [
                {"id": v.id, "pos": list(v.position), "clearance": v.annotation}
                for v in (self.vertices[k] for k in sorted(self.vertices))
            ],
            "edges": [
                {
                    "id": e.id,
                    "u": e.u,
                    "v": e.v,
                    "weight": e.weight,
                    "intermediates": [list(p) for p in e.intermediates],
                }
                for e in (self.edges[k] for k in sorted(self.edges))
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict, grid_resolution: float | None = None) -> "AnnotatedSkeleton":
        sk = cls(grid_resolution or 0.0)
        for vd in data["vertices"]:
            vid = vd["id"]
            sk.vertices[vid] = SkeletonVertex(vid, tuple(vd["pos"]), vd.get("clearance", 0.0))
            sk.adjacency[vid] = []
            sk._next_vid = max(sk._next_vid, vid + 1)
        for ed in data["edges"]:
            eid = ed["id"]
            sk.edges[eid] = SkeletonEdge(
                eid,
                ed["u"],
                ed["v"],
                [tuple(p) for p in ed["intermediates"]],
                ed.get("weight", 0.0),
            )
            sk.adjacency[ed["u"]].append(eid)
            sk.adjacency[ed["v"]].append(eid)
            sk._next_eid = max(sk._next_eid, eid + 1)
        sk.annotated = True  # loaded skeletons carry their annotations
        if grid_resolution is None:
            sk.grid_resolution = sk._infer_grid_resolution()
        return sk

    def _infer_grid_resolution(self) -> float:
        """Estimate the construction cell size from intermediate spacing."""
        gaps = []
        for e in self.edges.values():
            for a, b in zip(e.intermediates, e.intermediates[1:]):
                d = math.hypot(b[0] - a[0], b[1] - a[1])
                if d > 0.0:
                    gaps.append(d)
        if not gaps:
            return 1.0
        gaps.sort()
        return gaps[len(gaps) // 2]

    def save(self, path) -> None:
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=2)

    @classmethod
    def load(cls, path) -> "AnnotatedSkeleton":
        with open(path) as f:
            return cls.from_dict(json.load(f))


# ---------------------------------------------------------------------------
# rasterization
# ---------------------------------------------------------------------------


def rasterize_free_space(env: Environment, grid_resolution: float) -> tuple[np.ndarray, float]:
    """Boolean free-space mask at the given cell size.

    Cell (row j, col i) covers the square whose center is
    (xmin + (i+0.5)*res, ymin + (j+0.5)*res); a cell is free iff its
    center lies inside the boundary and outside every obstacle.
    """
    xmin, ymin, xmax, ymax = env.boundary
    res = grid_resolution
    nx = max(1, math.ceil((xmax - xmin) / res - 1e-9))
    ny = max(1, math.ceil((ymax - ymin) / res - 1e-9))
    xs = xmin + (np.arange(nx) + 0.5) * res
    ys = ymin + (np.arange(ny) + 0.5) * res
    free = np.ones((ny, nx), dtype=bool)
    free[:, xs > xmax] = False
    free[ys > ymax, :] = False
    if env.obstacles:
        gx, gy = np.meshgrid(xs, ys)
        pts = np.column_stack([gx.ravel(), gy.ravel()])
        occupied = points_in_obstacles_mask(env, pts)
        free &= ~occupied.reshape(ny, nx)
    return free, res


def count_free_components(env: Environment, grid_resolution: float) -> int:
    """Number of 8-connected free-space components on the raster grid."""
    free, _ = rasterize_free_space(env, grid_resolution)
    return int(ndimage.label(free, structure=_STRUCT8)[1])


# ---------------------------------------------------------------------------
# skeleton construction
# ---------------------------------------------------------------------------


def default_grid_resolution(env: Environment) -> float:
    return min(env.width, env.height) / 200.0


def build_workspace_skeleton(
    env: Environment,
    grid_resolution: float | None = None,
    spur_cells: int = 4,
) -> AnnotatedSkeleton:
    """Extract the grid medial-axis skeleton of the free workspace.

    Branches shorter than ``spur_cells`` grid cells are pruned as
    thinning noise (never below one vertex per free-space component).
    Weights and annotations are left at zero; see
    :func:`annotate_skeleton`.
    """
    if grid_resolution is None:
        grid_resolution = default_grid_resolution(env)
    if grid_resolution <= 0.0:
        raise ValueError("grid_resolution must be positive")
    if grid_resolution > min(env.width, env.height) / 50.0:
        raise ValueError("grid_resolution must be at most 1/50 of the smaller boundary side")

    free, res = rasterize_free_space(env, grid_resolution)
    if not free.any():
        raise EmptyFreeSpace("no free workspace cell at this resolution")

    padded = np.zeros((free.shape[0] + 2, free.shape[1] + 2), dtype=bool)
    padded[1:-1, 1:-1] = free
    # fixed rng: tie-breaking order must not vary between builds
    skel = medial_axis(padded, rng=0)[1:-1, 1:-1]

    sk = AnnotatedSkeleton(res)
    builder = _GraphBuilder(env, skel, res)
    builder.build(sk)
    _prune_spurs(sk, res, spur_cells)
    _merge_degree_two(sk)
    return sk


class _GraphBuilder:
    """Traces a 1-cell-wide skeleton mask into vertices and chain edges."""

    def __init__(self, env: Environment, skel: np.ndarray, res: float) -> None:
        self.env = env
        self.skel = skel
        self.res = res
        deg = ndimage.convolve(skel.astype(np.uint8), _STRUCT8, mode="constant") - skel
        self.degree = np.where(skel, deg, 0)
        self.is_node = skel & (self.degree != 2)
        self.cluster_labels, n_clusters = ndimage.label(self.is_node, structure=_STRUCT8)
        self.n_clusters = int(n_clusters)

    def cell_to_point(self, cell: tuple[int, int]) -> tuple[float, float]:
        xmin, ymin, _, _ = self.env.boundary
        j, i = cell
        return (float(xmin + (i + 0.5) * self.res), float(ymin + (j + 0.5) * self.res))

    def neighbors(self, cell: tuple[int, int]):
        j, i = cell
        h, w = self.skel.shape
        for dj in (-1, 0, 1):
            for di in (-1, 0, 1):
                if dj == 0 and di == 0:
                    continue
                nj, ni = j + dj, i + di
                if 0 <= nj < h and 0 <= ni < w and self.skel[nj, ni]:
                    yield (nj, ni)

    def build(self, sk: AnnotatedSkeleton) -> None:
        # one vertex per junction/endpoint cluster, placed on the member
        # cell nearest the cluster centroid (stays in free space)
        cluster_vertex: dict[int, int] = {}
        cluster_cells: dict[int, list[tuple[int, int]]] = {}
        for label in range(1, self.n_clusters + 1):
            cells = [tuple(c) for c in np.argwhere(self.cluster_labels == label)]
            cells.sort()
            cluster_cells[label] = cells
            arr = np.asarray(cells, dtype=float)
            centroid = arr.mean(axis=0)
            anchor = cells[int(np.argmin(((arr - centroid) ** 2).sum(axis=1)))]
            cluster_vertex[label] = sk.add_vertex(self.cell_to_point(anchor))

        visited = np.zeros_like(self.skel, dtype=bool)
        for label in range(1, self.n_clusters + 1):
            for cell in cluster_cells[label]:
                for nb in sorted(self.neighbors(cell)):
                    if self.is_node[nb] or visited[nb]:
                        continue
                    chain, end_label = self._walk(cell, nb, visited)
                    if end_label is not None:
                        self._emit(sk, cluster_vertex[label], cluster_vertex[end_label], chain)
                    else:
                        # chain dead-ends back into its own cluster blob
                        self._emit_loop(sk, cluster_vertex[label], chain)

        self._emit_rings(sk, visited)

    def _walk(self, start_node, first, visited):
        """Follow a degree-2 chain; returns (cells, terminal cluster label)."""
        chain = [first]
        visited[first] = True
        prev, cur = start_node, first
        while True:
            nxt = None
            for nb in sorted(self.neighbors(cur)):
                if nb != prev:
                    nxt = nb
                    break
            if nxt is None:
                return chain, None  # isolated stub (shouldn't normally happen)
            if self.is_node[nxt]:
                return chain, int(self.cluster_labels[nxt])
            if visited[nxt]:
                return chain, None
            chain.append(nxt)
            visited[nxt] = True
            prev, cur = cur, nxt

    def _chain_points(self, cells) -> list[tuple[float, float]]:
        return [self.cell_to_point(c) for c in cells]

    def _emit(self, sk: AnnotatedSkeleton, u: int, v: int, chain) -> None:
        pts = self._chain_points(chain)
        if u == v:
            self._emit_loop_chain(sk, u, pts)
            return
        if sk.edge_between(u, v) is not None:
            # parallel chain: split at its midpoint to keep the graph simple
            if not pts:
                return
            mid = len(pts) // 2
            m = sk.add_vertex(pts[mid])
            sk.add_edge(u, m, self._with_endpoints(sk, u, m, pts[: mid + 1]))
            sk.add_edge(m, v, self._with_endpoints(sk, m, v, pts[mid:]))
            return
        sk.add_edge(u, v, self._with_endpoints(sk, u, v, pts))

    def _emit_loop(self, sk: AnnotatedSkeleton, u: int, chain) -> None:
        self._emit_loop_chain(sk, u, self._chain_points(chain))

    def _emit_loop_chain(self, sk: AnnotatedSkeleton, u: int, pts) -> None:
        # cycle attached to a single vertex: split twice, or drop if tiny
        if len(pts) < 3:
            return
        i1, i2 = len(pts) // 3, 2 * len(pts) // 3
        if i1 == 0 or i2 == i1 or i2 == len(pts) - 1:
            return
        m1 = sk.add_vertex(pts[i1])
        m2 = sk.add_vertex(pts[i2])
        sk.add_edge(u, m1, self._with_endpoints(sk, u, m1, pts[: i1 + 1]))
        sk.add_edge(m1, m2, self._with_endpoints(sk, m1, m2, pts[i1: i2 + 1]))
        sk.add_edge(m2, u, self._with_endpoints(sk, m2, u, pts[i2:]))

    def _emit_rings(self, sk: AnnotatedSkeleton, visited) -> None:
        # components with no junction/endpoint at all are pure cycles
        remaining = self.skel & ~visited & ~self.is_node
        cells = sorted(tuple(c) for c in np.argwhere(remaining))
        seen: set[tuple[int, int]] = set()
        for start in cells:
            if start in seen:
                continue
            ring = [start]
            seen.add(start)
            prev, cur = None, start
            while True:
                nxt = None
                for nb in sorted(self.neighbors(cur)):
                    if nb != prev and nb not in seen:
                        nxt = nb
                        break
                if nxt is None:
                    break
                ring.append(nxt)
                seen.add(nxt)
                prev, cur = cur, nxt
            pts = self._chain_points(ring)
            if len(ring) < 3:
                sk.add_vertex(pts[0])
                continue
            i1, i2 = len(ring) // 3, 2 * len(ring) // 3
            v0 = sk.add_vertex(pts[0])
            v1 = sk.add_vertex(pts[i1])
            v2 = sk.add_vertex(pts[i2])
            sk.add_edge(v0, v1, self._with_endpoints(sk, v0, v1, pts[: i1 + 1]))
            sk.add_edge(v1, v2, self._with_endpoints(sk, v1, v2, pts[i1: i2 + 1]))
            sk.add_edge(v2, v0, self._with_endpoints(sk, v2, v0, pts[i2:] + [pts[0]]))

    def _with_endpoints(self, sk: AnnotatedSkeleton, u: int, v: int, pts) -> list:
        """Full intermediate list from u's position to v's, bridging any
        gap to the chain with interpolated points at grid spacing."""
        full = [sk.vertices[u].position]
        for p in pts:
            full.extend(_bridge(full[-1], p, 2.0 * self.res))
            full.append(p)
        vp = sk.vertices[v].position
        full.extend(_bridge(full[-1], vp, 2.0 * self.res))
        full.append(vp)
        return full


def _bridge(a: tuple[float, float], b: tuple[float, float], spacing: float) -> list:
    """Evenly spaced points strictly between a and b, at most `spacing` apart."""
    d = math.hypot(b[0] - a[0], b[1] - a[1])
    if d <= spacing:
        return []
    n = math.ceil(d / spacing)
    return [
        (a[0] + (b[0] - a[0]) * k / n, a[1] + (b[1] - a[1]) * k / n)
        for k in range(1, n)
    ]


def _chain_cell_length(edge: SkeletonEdge, res: float) -> float:
    pts = edge.intermediates
    total = 0.0
    for a, b in zip(pts, pts[1:]):
        total += math.hypot(b[0] - a[0], b[1] - a[1])
    return total / res


def _prune_spurs(sk: AnnotatedSkeleton, res: float, spur_cells: int) -> None:
    changed = True
    while changed:
        changed = False
        for vid in sorted(sk.vertices):
            if sk.degree(vid) != 1:
                continue
            eid = sk.adjacency[vid][0]
            if _chain_cell_length(sk.edges[eid], res) >= spur_cells:
                continue
            other = sk.edges[eid].other(vid)
            sk.remove_edge(eid)
            sk.remove_vertex(vid)
            changed = True
            _ = other  # far endpoint stays, even if now isolated


def _merge_degree_two(sk: AnnotatedSkeleton) -> None:
    """Collapse pass-through vertices left over after pruning."""
    changed = True
    while changed:
        changed = False
        for vid in sorted(sk.vertices):
            if sk.degree(vid) != 2:
                continue
            e1, e2 = sk.adjacency[vid]
            u = sk.edges[e1].other(vid)
            w = sk.edges[e2].other(vid)
            if u == vid or w == vid or u == w:
                continue
            if sk.edge_between(u, w) is not None:
                continue  # would create a parallel edge; leave as-is
            pts = sk.oriented_intermediates(e1, u)[:-1] + sk.oriented_intermediates(e2, vid)
            sk.remove_edge(e1)
            sk.remove_edge(e2)
            sk.remove_vertex(vid)
            sk.add_edge(u, w, pts)
            changed = True


def annotate_skeleton(sk: AnnotatedSkeleton, env: Environment) -> AnnotatedSkeleton:
    """Set vertex annotations and edge weights from workspace clearance.

    Each vertex gets the clearance at its position; each edge the minimum
    clearance over its intermediates.  Pure function of the geometry, so
    annotating twice is a no-op.
    """
    for vid in sorted(sk.vertices):
        v = sk.vertices[vid]
        v.annotation = clearance(env, v.position[0], v.position[1])
    for eid in sorted(sk.edges):
        e = sk.edges[eid]
        e.weight = min(clearance(env, p[0], p[1]) for p in e.intermediates)
    sk.annotated = True
    return sk

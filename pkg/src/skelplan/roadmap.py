"""C-space roadmap with tri-state edge validation and sampling regions.

Edges carry one of four statuses.  The only legal transitions are
unvalidated -> valid, unvalidated -> invalid, and invalid -> unfixable;
every transition is logged.  A union-find over the *valid* edge subgraph
tracks the fully validated components; unvalidated edges participate in
query search but never merge components.

Nodes remember the skeleton vertex whose sampling region produced them,
which is how the planners keep local-component bookkeeping.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .geometry import (
    Configuration,
    Environment,
    _valid_full_batch,
    _valid_partial_batch,
    cspace_distance,
    edge_valid,
)
from .skeleton import AcceptanceCriteria, AnnotatedSkeleton, accepts


class EdgeStatus(str, Enum):
    UNVALIDATED = "unvalidated"
    VALID = "valid"
    INVALID = "invalid"
    UNFIXABLE = "unfixable"


_ALLOWED_TRANSITIONS = {
    (EdgeStatus.UNVALIDATED, EdgeStatus.VALID),
    (EdgeStatus.UNVALIDATED, EdgeStatus.INVALID),
    (EdgeStatus.INVALID, EdgeStatus.UNFIXABLE),
}


class InvalidTransition(Exception):
    """An edge status change outside the legal state machine."""


class AdvanceResult(Enum):
    ADVANCED = "advanced"
    BLOCKED = "blocked"
    MET = "met"


@dataclass
class RoadmapNode:
    id: int
    config: Configuration
    source_vertex: int | None = None
    invalidated: bool = False  # set when a lazy planner discards the node
    validated: bool | None = True  # None: collision check deferred (lazy insertion)


@dataclass
class RoadmapEdge:
    id: int
    u: int
    v: int
    status: EdgeStatus
    cost: float
    source_skeleton_edge: int | None = None

    def other(self, nid: int) -> int:
        return self.v if nid == self.u else self.u


@dataclass
class SamplingRegion:
    """Disc that slides along a skeleton edge's intermediate points.

    Regions created for vertex initialization are not attached to an
    edge (``skeleton_edge is None``).
    """

    center: tuple[float, float]
    radius: float
    skeleton_edge: int | None = None
    direction: str | None = None  # "from_u" | "from_v"
    intermediate_index: int = 0
    component_nodes: list[int] = field(default_factory=list)
    consecutive_failures: int = 0
    done: bool = False


class UnionFind:
    def __init__(self) -> None:
        self._parent: dict[int, int] = {}
        self._size: dict[int, int] = {}

    def add(self, x: int) -> None:
        if x not in self._parent:
            self._parent[x] = x
            self._size[x] = 1

    def find(self, x: int) -> int:
        root = x
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[x] != root:
            self._parent[x], x = root, self._parent[x]
        return root

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return
        if self._size[rx] < self._size[ry]:
            rx, ry = ry, rx
        self._parent[ry] = rx
        self._size[rx] += self._size[ry]

    def connected(self, x: int, y: int) -> bool:
        return self.find(x) == self.find(y)

    def partition(self) -> dict[int, frozenset[int]]:
        groups: dict[int, set[int]] = {}
        for x in self._parent:
            groups.setdefault(self.find(x), set()).add(x)
        return {r: frozenset(g) for r, g in groups.items()}


class Roadmap:
    """Single-writer roadmap graph over an environment."""

    def __init__(self, env: Environment) -> None:
        self.env = env
        self.nodes: dict[int, RoadmapNode] = {}
        self.edges: dict[int, RoadmapEdge] = {}
        self.nodes_by_source: dict[int, list[int]] = {}
        self.components = UnionFind()
        self.status_transitions: list[tuple[int, EdgeStatus, EdgeStatus]] = []
        self.active_regions: dict[tuple[int, str], SamplingRegion] = {}
        self.bridged_skeleton_edges: set[int] = set()
        self._adj: dict[int, dict[int, int]] = {}
        self._next_nid = 0
        self._next_eid = 0
        self._cfg = np.empty((64, 3))
        self._alive = np.zeros(64, dtype=bool)

    # -- metric ----------------------------------------------------------------

    def metric(self, q1: Configuration, q2: Configuration) -> float:
        return cspace_distance(q1, q2, self.env.robot.bounding_radius)

    # -- nodes -----------------------------------------------------------------

    def add_node(self, config: Configuration, source_vertex: int | None = None) -> int:
        nid = self._next_nid
        self._next_nid += 1
        self.nodes[nid] = RoadmapNode(nid, config, source_vertex)
        self._adj[nid] = {}
        self.components.add(nid)
        if source_vertex is not None:
            self.nodes_by_source.setdefault(source_vertex, []).append(nid)
        if nid >= len(self._alive):
            grow = max(64, len(self._alive))
            self._cfg = np.vstack([self._cfg, np.empty((grow, 3))])
            self._alive = np.concatenate([self._alive, np.zeros(grow, dtype=bool)])
        self._cfg[nid] = config.as_tuple()
        self._alive[nid] = True
        return nid

    def invalidate_node(self, nid: int) -> None:
        """Discard a node from search (lazy planners' element removal)."""
        self.nodes[nid].invalidated = True
        self._alive[nid] = False

    def nearest_nodes(self, config: Configuration, k: int, exclude: set[int] | None = None,
                      among: list[int] | None = None) -> list[int]:
        """k nearest non-discarded nodes by the C-space metric, ties by id."""
        if among is not None:
            ids = np.asarray([i for i in among if self._alive[i]], dtype=np.intp)
        else:
            ids = np.nonzero(self._alive[: self._next_nid])[0]
        if exclude:
            ids = ids[~np.isin(ids, list(exclude))]
        if len(ids) == 0:
            return []
        cfg = self._cfg[ids]
        d = np.hypot(cfg[:, 0] - config.x, cfg[:, 1] - config.y)
        w = self.env.robot.bounding_radius
        if w > 0.0:
            dth = np.abs(np.mod(cfg[:, 2] - config.theta + math.pi, 2 * math.pi) - math.pi)
            d = d + w * dth
        order = np.argsort(d, kind="stable")[:k]
        return [int(ids[i]) for i in order]

    # -- edges -----------------------------------------------------------------

    def edge_between(self, u: int, v: int) -> int | None:
        return self._adj[u].get(v)

    def add_edge(
        self,
        u: int,
        v: int,
        status: EdgeStatus,
        source_skeleton_edge: int | None = None,
    ) -> int:
        if u == v:
            raise ValueError("self loops are not allowed")
        if v in self._adj[u]:
            raise ValueError(f"edge between {u} and {v} already exists")
        eid = self._next_eid
        self._next_eid += 1
        cost = self.metric(self.nodes[u].config, self.nodes[v].config)
        self.edges[eid] = RoadmapEdge(eid, u, v, status, cost, source_skeleton_edge)
        self._adj[u][v] = eid
        self._adj[v][u] = eid
        if status is EdgeStatus.VALID:
            self.components.union(u, v)
        return eid

    def set_status(self, eid: int, new: EdgeStatus) -> None:
        e = self.edges[eid]
        if (e.status, new) not in _ALLOWED_TRANSITIONS:
            raise InvalidTransition(f"edge {eid}: {e.status.value} -> {new.value}")
        self.status_transitions.append((eid, e.status, new))
        e.status = new
        if new is EdgeStatus.VALID:
            self.components.union(e.u, e.v)

    def neighbors(self, nid: int) -> dict[int, int]:
        """Adjacent node id -> edge id."""
        return self._adj[nid]

    def rebuild_components(self) -> UnionFind:
        """Fresh union-find from the valid-edge subgraph (for audits)."""
        uf = UnionFind()
        for nid in self.nodes:
            uf.add(nid)
        for e in self.edges.values():
            if e.status is EdgeStatus.VALID:
                uf.union(e.u, e.v)
        return uf

    # -- serialization -----------------------------------------------------------

    def to_dict(self) -> dict:
        nodes = []
        for nid in sorted(self.nodes):
            n = self.nodes[nid]
            d = {"id": n.id, "config": list(n.config.as_tuple()), "source_vertex": n.source_vertex}
            if n.invalidated:
                d["invalidated"] = True
            nodes.append(d)
        edges = []
        for eid in sorted(self.edges):
            e = self.edges[eid]
            edges.append(
                {
                    "id": e.id,
                    "u": e.u,
                    "v": e.v,
                    "status": e.status.value,
                    "cost": e.cost,
                    "source_skeleton_edge": e.source_skeleton_edge,
                }
            )
        return {"nodes": nodes, "edges": edges}

    def save(self, path) -> None:
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=2)

    @classmethod
    def from_dict(cls, data: dict, env: Environment) -> "Roadmap":
        rm = cls(env)
        for nd in data["nodes"]:
            nid = rm.add_node(Configuration(*nd["config"]), nd.get("source_vertex"))
            assert nid == nd["id"], "roadmap node ids must be dense and ordered"
            if nd.get("invalidated"):
                rm.invalidate_node(nid)
        for ed in data["edges"]:
            eid = rm.add_edge(
                ed["u"], ed["v"], EdgeStatus(ed["status"]), ed.get("source_skeleton_edge")
            )
            assert eid == ed["id"], "roadmap edge ids must be dense and ordered"
        return rm

    @classmethod
    def load(cls, path, env: Environment) -> "Roadmap":
        with open(path) as f:
            return cls.from_dict(json.load(f), env)


# ---------------------------------------------------------------------------
# sampling and connection operations
# ---------------------------------------------------------------------------


def sample_in_region(
    env: Environment,
    rng: np.random.Generator,
    region: SamplingRegion | None,
    n_attempts: int,
    validity: str = "full",
) -> list[Configuration]:
    """Draw up to ``n_attempts`` configurations, keeping the valid ones.

    Positions are uniform over the region disc (or the whole boundary
    when ``region`` is None); headings uniform for rigid robots.  Every
    attempt costs exactly one collision check.
    """
    if n_attempts < 1:
        raise ValueError("n_attempts must be at least 1")
    xmin, ymin, xmax, ymax = env.boundary
    rigid = env.robot.kind == "rigid"
    cfgs = np.zeros((n_attempts, 3))
    for i in range(n_attempts):
        if region is None:
            cfgs[i, 0] = xmin + rng.random() * (xmax - xmin)
            cfgs[i, 1] = ymin + rng.random() * (ymax - ymin)
        else:
            r = region.radius * math.sqrt(rng.random())
            phi = rng.random() * 2.0 * math.pi
            cfgs[i, 0] = region.center[0] + r * math.cos(phi)
            cfgs[i, 1] = region.center[1] + r * math.sin(phi)
        if rigid:
            cfgs[i, 2] = (rng.random() * 2.0 - 1.0) * math.pi
    if validity == "full":
        env.counter.full_cd_calls += n_attempts
        ok = _valid_full_batch(env, cfgs)
    else:
        env.counter.partial_cd_calls += n_attempts
        ok = _valid_partial_batch(env, cfgs)
    return [Configuration(*cfgs[i]) for i in range(n_attempts) if ok[i]]


def connect_neighbors(
    rm: Roadmap,
    node: int,
    k: int,
    mode: str = "validated",
    resolution: float | None = None,
    among: list[int] | None = None,
) -> list[int]:
    """Try edges from ``node`` to its k nearest neighbors.

    ``validated`` mode collision-checks each candidate edge and inserts
    only the valid ones; ``lazy`` mode inserts unvalidated edges at zero
    collision cost.  Existing edges are never duplicated.
    """
    if resolution is None:
        resolution = rm.env.default_resolution()
    q = rm.nodes[node].config
    created: list[int] = []
    for nb in rm.nearest_nodes(q, k, exclude={node}, among=among):
        if rm.edge_between(node, nb) is not None:
            continue
        if mode == "validated":
            if edge_valid(rm.env, q, rm.nodes[nb].config, resolution, "full"):
                created.append(rm.add_edge(node, nb, EdgeStatus.VALID))
        else:
            created.append(rm.add_edge(node, nb, EdgeStatus.UNVALIDATED))
    return created


def init_local_components(
    rm: Roadmap,
    sk: AnnotatedSkeleton,
    policy: AcceptanceCriteria,
    samples_per_vertex: int,
    rng: np.random.Generator,
    region_radius: float,
    k: int = 8,
    resolution: float | None = None,
    attempts: "AttemptTracker | None" = None,
    max_attempts_per_vertex: int | None = None,
) -> dict[int, list[int]]:
    """Seed one local connected component per accepted skeleton vertex.

    Samples ``samples_per_vertex`` valid configurations in a disc around
    each vertex whose clearance annotation passes the policy, tags them
    with the vertex id, and connects them among themselves with
    validated edges.  Returns skeleton vertex id -> node ids (vertices
    that yielded no sample are absent).
    """
    if not sk.annotated:
        raise ValueError("skeleton must be annotated before component initialization")
    if max_attempts_per_vertex is None:
        max_attempts_per_vertex = 10 * samples_per_vertex
    comps: dict[int, list[int]] = {}
    for vid in sorted(sk.vertices):
        v = sk.vertices[vid]
        if not accepts(policy, v.annotation):
            continue
        region = SamplingRegion(center=v.position, radius=region_radius)
        node_ids: list[int] = []
        for _ in range(max_attempts_per_vertex):
            if len(node_ids) >= samples_per_vertex:
                break
            if attempts is not None and attempts.take(1) == 0:
                break
            for q in sample_in_region(rm.env, rng, region, 1, "full"):
                node_ids.append(rm.add_node(q, source_vertex=vid))
        for nid in node_ids:
            connect_neighbors(rm, nid, k, "validated", resolution, among=node_ids)
        if node_ids:
            comps[vid] = node_ids
    return comps


def lazy_connect_components(
    rm: Roadmap,
    sk: AnnotatedSkeleton,
    policy: AcceptanceCriteria,
) -> list[int]:
    """Draw one unvalidated roadmap edge per accepted skeleton edge.

    The edge joins the closest node pair across the two endpoint
    components (lowest ids on ties) and records its source skeleton
    edge.  Skeleton edges whose weight fails the policy, or that lack a
    component at either end, get nothing.
    """
    created: list[int] = []
    for eid in sorted(sk.edges):
        e = sk.edges[eid]
        if not accepts(policy, e.weight):
            continue
        side_u = [n for n in rm.nodes_by_source.get(e.u, []) if not rm.nodes[n].invalidated]
        side_v = [n for n in rm.nodes_by_source.get(e.v, []) if not rm.nodes[n].invalidated]
        if not side_u or not side_v:
            continue
        pair = _closest_pair(rm, side_u, side_v)
        if pair is None:
            continue
        a, b = pair
        if rm.edge_between(a, b) is not None:
            continue
        created.append(rm.add_edge(a, b, EdgeStatus.UNVALIDATED, source_skeleton_edge=eid))
    return created


def _closest_pair(
    rm: Roadmap,
    side_a: list[int],
    side_b: list[int],
    skip: set[tuple[int, int]] | None = None,
) -> tuple[int, int] | None:
    best = None
    best_d = math.inf
    for a in sorted(side_a):
        qa = rm.nodes[a].config
        for b in sorted(side_b):
            if a == b or (skip and (a, b) in skip):
                continue
            d = rm.metric(qa, rm.nodes[b].config)
            if d < best_d:
                best, best_d = (a, b), d
    return best


def get_or_create_edge_regions(
    rm: Roadmap,
    sk: AnnotatedSkeleton,
    skeleton_edge: int,
    radius: float,
) -> tuple[SamplingRegion, SamplingRegion]:
    """The persistent frontier region pair for a skeleton edge.

    New pairs start at the edge endpoints with the endpoint vertices'
    local components; existing pairs keep their stored frontier indices
    across repair attempts.
    """
    e = sk.edges[skeleton_edge]
    pair = []
    for direction, vid, index in (
        ("from_u", e.u, 0),
        ("from_v", e.v, len(e.intermediates) - 1),
    ):
        key = (skeleton_edge, direction)
        region = rm.active_regions.get(key)
        if region is None:
            comp = [n for n in rm.nodes_by_source.get(vid, []) if not rm.nodes[n].invalidated]
            region = SamplingRegion(
                center=e.intermediates[index],
                radius=radius,
                skeleton_edge=skeleton_edge,
                direction=direction,
                intermediate_index=index,
                component_nodes=list(comp),
            )
            rm.active_regions[key] = region
        pair.append(region)
    return pair[0], pair[1]


def advance_region(
    rm: Roadmap,
    sk: AnnotatedSkeleton,
    region: SamplingRegion,
    rng: np.random.Generator,
    step: int = 1,
    n_attempts: int = 2,
    k: int = 8,
    resolution: float | None = None,
    failure_budget: int = 20,
    validity: str = "full",
) -> AdvanceResult:
    """Slide a frontier region one step along its skeleton edge.

    Moves the center ``step`` intermediates forward, samples inside the
    new disc, and connects valid samples to the region's trailing
    component with validated edges.  When the region's index touches or
    crosses the opposing region's index (or it reaches the far end of
    the edge), a bridge edge between the two components' closest pair is
    inserted and validated; a successful bridge releases both regions
    and reports MET.  ``failure_budget`` consecutive invalid samples, or
    running out of edge without a bridge, reports BLOCKED.
    """
    if region.skeleton_edge is None or region.direction is None:
        raise ValueError("region is not attached to a skeleton edge")
    if region.done:
        return AdvanceResult.BLOCKED
    if resolution is None:
        resolution = rm.env.default_resolution()
    e = sk.edges[region.skeleton_edge]
    inter = e.intermediates
    last = len(inter) - 1
    if region.direction == "from_u":
        new_index = min(region.intermediate_index + step, last)
        origin_vid, far_vid = e.u, e.v
    else:
        new_index = max(region.intermediate_index - step, 0)
        origin_vid, far_vid = e.v, e.u
    region.intermediate_index = new_index
    region.center = inter[new_index]

    samples = sample_in_region(rm.env, rng, region, n_attempts, validity)
    if samples:
        region.consecutive_failures = 0
    else:
        region.consecutive_failures += n_attempts
    new_nodes: list[int] = []
    members = set(region.component_nodes)
    for q in samples:
        nid = rm.add_node(q, source_vertex=origin_vid)
        created = connect_neighbors(
            rm, nid, k, "validated", resolution, among=region.component_nodes + new_nodes
        )
        new_nodes.append(nid)
        # membership requires a validated link into the trailing
        # component; stray clusters lose the tag so the vertex's
        # bookkeeping stays a connected component
        if not members or any(rm.edges[e].other(nid) in members for e in created):
            region.component_nodes.append(nid)
            members.add(nid)
        else:
            rm.nodes_by_source[origin_vid].remove(nid)
            rm.nodes[nid].source_vertex = None

    opposing = rm.active_regions.get((region.skeleton_edge, _other_direction(region.direction)))
    met_positionally = False
    if opposing is not None and not opposing.done:
        iu = region.intermediate_index if region.direction == "from_u" else opposing.intermediate_index
        iv = opposing.intermediate_index if region.direction == "from_u" else region.intermediate_index
        met_positionally = iu >= iv
    at_end = new_index == (last if region.direction == "from_u" else 0)

    if met_positionally or at_end:
        if opposing is not None:
            other_comp = opposing.component_nodes
        else:
            other_comp = [
                n for n in rm.nodes_by_source.get(far_vid, []) if not rm.nodes[n].invalidated
            ]
        if _try_bridge(rm, region.component_nodes, other_comp, resolution):
            region.done = True
            if opposing is not None and met_positionally:
                opposing.done = True
            return AdvanceResult.MET
        if at_end:
            region.done = True
            return AdvanceResult.BLOCKED

    if region.consecutive_failures >= failure_budget:
        region.done = True
        return AdvanceResult.BLOCKED
    return AdvanceResult.ADVANCED


def _other_direction(direction: str) -> str:
    return "from_v" if direction == "from_u" else "from_u"


def _try_bridge(rm: Roadmap, side_a: list[int], side_b: list[int], resolution: float) -> bool:
    """Insert and validate a closest-pair edge between two components.

    Pairs already joined by a valid edge count as bridged; pairs whose
    edge is invalid or unfixable are skipped (never revived).
    """
    skip: set[tuple[int, int]] = set()
    while True:
        pair = _closest_pair(rm, side_a, side_b, skip=skip)
        if pair is None:
            return False
        a, b = pair
        eid = rm.edge_between(a, b)
        if eid is not None:
            status = rm.edges[eid].status
            if status is EdgeStatus.VALID:
                return True
            if status in (EdgeStatus.INVALID, EdgeStatus.UNFIXABLE):
                skip.add((a, b))
                continue
        else:
            eid = rm.add_edge(a, b, EdgeStatus.UNVALIDATED)
        ok = edge_valid(rm.env, rm.nodes[a].config, rm.nodes[b].config, resolution, "full")
        rm.set_status(eid, EdgeStatus.VALID if ok else EdgeStatus.INVALID)
        return ok


class AttemptTracker:
    """Global sampling-attempt budget for one planner run."""

    def __init__(self, limit: int) -> None:
        self.limit = limit
        self.spent = 0

    @property
    def remaining(self) -> int:
        return max(0, self.limit - self.spent)

    def take(self, n: int) -> int:
        granted = min(n, self.remaining)
        self.spent += granted
        return granted

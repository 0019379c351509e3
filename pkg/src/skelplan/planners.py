"""The hierarchical skeleton-guided planner and five PRM baselines.

All planners share one interface: ``build()`` constructs the initial
roadmap under a global sampling-attempt budget, then ``query(s, g)`` is
called once per start/goal pair, reusing (and growing) the same roadmap
across queries.  Failures raise :class:`BudgetExhausted` or
:class:`Disconnected`; a returned path always consists solely of
status-valid edges.

The hierarchical planner works in three phases per query: enumerate
candidate paths over the non-invalid subgraph in ascending lower-bound
cost, validating their lazy edges as they are popped; on failure,
repair the recorded partially-invalid paths cheapest-first by expanding
sampling regions from both ends of the offending skeleton edge; prune
every candidate that contains an edge whose repair failed.
"""

from __future__ import annotations

import bisect
import itertools
import math
import time
from dataclasses import dataclass

import numpy as np

from .geometry import Configuration, Environment, edge_valid, is_valid_full
from .query import NON_INVALID, VALID_ONLY, Path, k_shortest_paths, shortest_path
from .roadmap import (
    AdvanceResult,
    AttemptTracker,
    EdgeStatus,
    Roadmap,
    SamplingRegion,
    advance_region,
    connect_neighbors,
    get_or_create_edge_regions,
    init_local_components,
    lazy_connect_components,
    sample_in_region,
    _try_bridge,
)
from .skeleton import AcceptanceCriteria, AnnotatedSkeleton


class PlanningFailure(Exception):
    """Base class for planner-reported failures."""


class BudgetExhausted(PlanningFailure):
    """Sampling attempts or query time ran out before a path was found."""


class Disconnected(PlanningFailure):
    """Start and goal cannot be joined through the roadmap."""


class NoCandidatePath(PlanningFailure):
    """No start-goal path exists in the non-invalid subgraph."""


@dataclass
class PlannerBudget:
    """Resource limits for one planner run."""

    max_sample_attempts: int = 1000
    epsilon: float = 2.0
    max_paths: int = 5
    time_limit: float = 60.0  # seconds per query

    def __post_init__(self) -> None:
        if self.epsilon <= 1.0:
            raise ValueError("epsilon must exceed 1")
        if self.max_paths < 1:
            raise ValueError("max_paths must be at least 1")


@dataclass
class PathRecord:
    """A candidate path with its per-edge validation partition."""

    nodes: list[int]
    edge_ids: list[int]
    valid_edges: set[int]
    invalid_edges: set[int]
    unvalidated_edges: set[int]
    lower_bound_cost: float
    order_index: int = 0

    def sort_key(self) -> tuple:
        return (self.lower_bound_cost, len(self.invalid_edges), self.order_index)


class PathSet:
    """Candidate paths ordered by (lower-bound cost, fewer invalid
    edges, insertion order)."""

    def __init__(self) -> None:
        self._records: list[PathRecord] = []
        self._counter = itertools.count()

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self):
        return iter(self._records)

    def add(self, record: PathRecord) -> None:
        record.order_index = next(self._counter)
        bisect.insort(self._records, record, key=PathRecord.sort_key)

    def pop(self) -> PathRecord:
        return self._records.pop(0)

    def clear(self) -> None:
        self._records.clear()

    def remove_containing(self, edge_ids: set[int]) -> int:
        """Drop every record touching any of the given edges."""
        if not edge_ids:
            return 0
        before = len(self._records)
        self._records = [
            r
            for r in self._records
            if not (
                edge_ids & r.invalid_edges
                or edge_ids & r.valid_edges
                or edge_ids & r.unvalidated_edges
            )
        ]
        return before - len(self._records)


def _partition_edges(rm: Roadmap, edge_ids: list[int]) -> tuple[set, set, set]:
    valid, invalid, unvalidated = set(), set(), set()
    for eid in edge_ids:
        status = rm.edges[eid].status
        if status is EdgeStatus.VALID:
            valid.add(eid)
        elif status is EdgeStatus.UNVALIDATED:
            unvalidated.add(eid)
        else:
            invalid.add(eid)
    return valid, invalid, unvalidated


def refresh_path_set(rm: Roadmap, path_set: PathSet) -> None:
    """Drop records invalidated by status drift between iterations.

    A record survives only if its stored partition still matches the
    live edge statuses and none of its edges became unfixable.
    """
    stale: list[PathRecord] = []
    for rec in path_set:
        valid, invalid, unvalidated = _partition_edges(rm, rec.edge_ids)
        if any(rm.edges[e].status is EdgeStatus.UNFIXABLE for e in rec.edge_ids):
            stale.append(rec)
        elif (valid, invalid, unvalidated) != (
            rec.valid_edges,
            rec.invalid_edges,
            rec.unvalidated_edges,
        ):
            stale.append(rec)
    for rec in stale:
        path_set._records.remove(rec)


def build_path_set(
    rm: Roadmap,
    s_node: int,
    g_node: int,
    budget: PlannerBudget,
    path_set: PathSet,
    resolution: float | None = None,
    deadline: float | None = None,
) -> tuple[bool, Path | None]:
    """Enumerate candidate paths cheapest-first, validating lazily.

    Candidates come from a k-shortest-path stream over a snapshot of the
    non-invalid edge set.  A popped candidate whose edges all check out
    is placed alone in the path set and returned immediately; otherwise
    its partition is recorded and enumeration continues while the path
    set holds fewer than ``max_paths`` records and the last recorded
    cost stays under ``epsilon`` times the cheapest candidate's cost.

    Raises :class:`NoCandidatePath` when the snapshot subgraph contains
    no start-goal path at all.
    """
    if resolution is None:
        resolution = rm.env.default_resolution()
    refresh_path_set(rm, path_set)
    allowed = frozenset(
        e.id for e in rm.edges.values() if e.status in (EdgeStatus.VALID, EdgeStatus.UNVALIDATED)
    )
    stream = k_shortest_paths(rm, s_node, g_node, k=None, allowed_edges=allowed)
    first = next(stream, None)
    if first is None:
        raise NoCandidatePath(f"no candidate path between nodes {s_node} and {g_node}")
    max_cost = budget.epsilon * first.total_cost if first.total_cost > 0 else math.inf
    candidates = itertools.chain([first], stream)
    p_cost = 0.0
    while len(path_set) < budget.max_paths and p_cost < max_cost:
        if deadline is not None and time.monotonic() > deadline:
            raise BudgetExhausted("query time limit reached while building the path set")
        cand = next(candidates, None)
        if cand is None:
            break
        edge_ids = cand.edge_ids(rm)
        valid, invalid, unvalidated = _partition_edges(rm, edge_ids)
        if not invalid:
            for eid in edge_ids:
                if eid not in unvalidated:
                    continue
                e = rm.edges[eid]
                ok = edge_valid(
                    rm.env, rm.nodes[e.u].config, rm.nodes[e.v].config, resolution, "full"
                )
                rm.set_status(eid, EdgeStatus.VALID if ok else EdgeStatus.INVALID)
                unvalidated.discard(eid)
                if ok:
                    valid.add(eid)
                else:
                    invalid.add(eid)
                    break  # stop spending checks on a known-broken candidate
        if not invalid:
            path_set.clear()
            path_set.add(
                PathRecord(cand.nodes, edge_ids, valid, set(), set(), cand.total_cost)
            )
            return True, cand
        path_set.add(
            PathRecord(cand.nodes, edge_ids, valid, invalid, unvalidated, cand.total_cost)
        )
        p_cost = cand.total_cost
    return False, None


def fix_edge(
    rm: Roadmap,
    sk: AnnotatedSkeleton,
    edge_id: int,
    rng: np.random.Generator,
    region_radius: float,
    attempts: AttemptTracker,
    step: int = 1,
    samples_per_step: int = 2,
    k: int = 8,
    resolution: float | None = None,
    rounds_per_side: int = 10,
    failure_budget: int = 20,
) -> bool:
    """Repair the corridor of an invalid edge by expanding its regions.

    Two sampling regions start from the stored frontier indices of the
    edge's source skeleton edge (the endpoints on first attempt) and
    advance toward each other, each advance followed by a validated
    closest-pair bridge attempt between the two frontier components.
    The invalid edge itself is never revived; success means a new valid
    connection exists across the skeleton edge.  Edges without a source
    skeleton edge (query attachments, old bridges) fail immediately.
    """
    e = rm.edges[edge_id]
    if e.status is not EdgeStatus.INVALID:
        raise ValueError(f"fix_edge requires an invalid edge, got {e.status.value}")
    skel_eid = e.source_skeleton_edge
    if skel_eid is None:
        return False
    if skel_eid in rm.bridged_skeleton_edges:
        return True  # corridor already repaired by an earlier fix
    if resolution is None:
        resolution = rm.env.default_resolution()
    region_u, region_v = get_or_create_edge_regions(rm, sk, skel_eid, region_radius)
    for _ in range(rounds_per_side):
        if region_u.done and region_v.done:
            return False
        for region in (region_u, region_v):
            if region.done:
                continue
            n = attempts.take(samples_per_step)
            if n == 0:
                return False
            result = advance_region(
                rm,
                sk,
                region,
                rng,
                step=step,
                n_attempts=n,
                k=k,
                resolution=resolution,
                failure_budget=failure_budget,
            )
            if result is AdvanceResult.MET:
                rm.bridged_skeleton_edges.add(skel_eid)
                return True
            # bridge attempt between the frontiers after every advance
            if region_u.component_nodes and region_v.component_nodes:
                if _try_bridge(
                    rm, region_u.component_nodes, region_v.component_nodes, resolution
                ):
                    rm.bridged_skeleton_edges.add(skel_eid)
                    region_u.done = True
                    region_v.done = True
                    return True
    return False


def fix_path(
    rm: Roadmap,
    sk: AnnotatedSkeleton,
    record: PathRecord,
    rng: np.random.Generator,
    region_radius: float,
    attempts: AttemptTracker,
    policy: str = "descending",
    **fix_kwargs,
) -> tuple[bool, set[int]]:
    """Attempt to repair every invalid edge of a candidate path.

    Edges are fixed longest-first by default (long edges are the least
    likely to be repairable, so they expose hopeless paths early);
    ``policy='ascending'`` selects the opposite order.  Edges whose
    repair fails are marked unfixable.  Returns (all fixed?, the set of
    newly unfixable edges).
    """
    if not record.invalid_edges:
        raise ValueError("fix_path requires a record with at least one invalid edge")
    if policy == "descending":
        queue = sorted(record.invalid_edges, key=lambda eid: (-rm.edges[eid].cost, eid))
    elif policy == "ascending":
        queue = sorted(record.invalid_edges, key=lambda eid: (rm.edges[eid].cost, eid))
    else:
        raise ValueError(f"unknown fix ordering policy {policy!r}")
    unfixable: set[int] = set()
    for eid in queue:
        if not fix_edge(rm, sk, eid, rng, region_radius, attempts, **fix_kwargs):
            unfixable.add(eid)
            rm.set_status(eid, EdgeStatus.UNFIXABLE)
    return (not unfixable), unfixable


def update_path_set(path_set: PathSet, unfixable_edges: set[int]) -> PathSet:
    """Remove every record containing an unfixable edge; order intact."""
    path_set.remove_containing(unfixable_edges)
    return path_set


# ---------------------------------------------------------------------------
# planner interface
# ---------------------------------------------------------------------------


class Planner:
    """Common roadmap-planner machinery: budget, attachment, deadline."""

    name = "abstract"
    needs_skeleton = False

    def __init__(
        self,
        env: Environment,
        skeleton: AnnotatedSkeleton | None = None,
        budget: PlannerBudget | None = None,
        seed: int = 0,
        resolution: float | None = None,
        k_neighbors: int = 8,
        samples_per_iteration: int = 2,
        attachment_attempts: int = 50,
        safety_factor: float = 1.0,
    ) -> None:
        self.env = env
        self.skeleton = skeleton
        self.budget = budget or PlannerBudget()
        self.rng = np.random.default_rng(seed)
        self.resolution = resolution if resolution is not None else env.default_resolution()
        self.k = k_neighbors
        self.samples_per_iteration = samples_per_iteration
        self.attachment_attempts = attachment_attempts
        self.safety_factor = safety_factor
        self.rm = Roadmap(env)
        self.attempts = AttemptTracker(self.budget.max_sample_attempts)
        self._deadline: float | None = None
        if self.needs_skeleton:
            if skeleton is None:
                raise ValueError(f"{self.name} requires a workspace skeleton")
            if not skeleton.annotated:
                raise ValueError(f"{self.name} requires an annotated skeleton")

    # -- lifecycle -----------------------------------------------------------

    def build(self) -> None:
        raise NotImplementedError

    def query(self, s: Configuration, g: Configuration) -> Path:
        self._deadline = time.monotonic() + self.budget.time_limit
        return self._query(s, g)

    def _query(self, s: Configuration, g: Configuration) -> Path:
        raise NotImplementedError

    def _check_deadline(self) -> None:
        if self._deadline is not None and time.monotonic() > self._deadline:
            raise BudgetExhausted("query time limit reached")

    # -- query attachment ------------------------------------------------------

    def _attachment_radius(self) -> float:
        return max(3.0 * self.env.robot.bounding_radius, 10.0 * self.resolution)

    def _attach(self, q: Configuration, lazy: bool = False) -> int:
        """Insert a query configuration and connect it to the roadmap.

        Connection is by validated k-nearest edges (lazy planners may
        connect lazily); if nothing connects, up to
        ``attachment_attempts`` samples are drawn around the
        configuration to grow the roadmap toward it.
        """
        if not is_valid_full(self.env, q):
            raise Disconnected("query configuration is in collision")
        nid = self.rm.add_node(q)
        mode = "lazy" if lazy else "validated"
        connect_neighbors(self.rm, nid, self.k, mode, self.resolution)
        if self.rm.neighbors(nid) or len(self.rm.nodes) == 1:
            return nid
        if not self._grow_attachment(nid, mode):
            raise Disconnected("query configuration could not attach to any component")
        return nid

    def _grow_attachment(self, nid: int, mode: str = "validated") -> bool:
        """Sample helpers around a query node until it gains an edge.

        Spends up to ``attachment_attempts`` samples from the per-query
        attachment allowance (separate from the main budget).
        """
        q = self.rm.nodes[nid].config
        region = SamplingRegion(center=(q.x, q.y), radius=self._attachment_radius())
        had = len(self.rm.neighbors(nid))
        for _ in range(self.attachment_attempts):
            self._check_deadline()
            for qs in sample_in_region(self.env, self.rng, region, 1, "full"):
                helper = self.rm.add_node(qs)
                connect_neighbors(self.rm, helper, self.k, mode, self.resolution)
            connect_neighbors(self.rm, nid, self.k, mode, self.resolution)
            if len(self.rm.neighbors(nid)) > had:
                return True
        return len(self.rm.neighbors(nid)) > had

    # -- shared lazy query loop --------------------------------------------------

    def _lazy_query_loop(self, s_node: int, g_node: int) -> Path:
        """Search / validate / discard loop over the non-invalid subgraph."""
        while True:
            self._check_deadline()
            path = shortest_path(self.rm, s_node, g_node, NON_INVALID)
            if path is None:
                raise Disconnected("no path through the roadmap")
            retry = False
            for nid in path.nodes:
                node = self.rm.nodes[nid]
                if node.validated is None:
                    ok = is_valid_full(self.env, node.config)
                    node.validated = ok
                    if not ok:
                        self.rm.invalidate_node(nid)
                        retry = True
                        break
            if retry:
                continue
            for eid in path.edge_ids(self.rm):
                e = self.rm.edges[eid]
                if e.status is not EdgeStatus.UNVALIDATED:
                    continue
                ok = edge_valid(
                    self.env,
                    self.rm.nodes[e.u].config,
                    self.rm.nodes[e.v].config,
                    self.resolution,
                    "full",
                )
                self.rm.set_status(eid, EdgeStatus.VALID if ok else EdgeStatus.INVALID)
                if not ok:
                    retry = True
                    break
            if not retry:
                return path

    def _query_with_reattach(self, s_node: int, g_node: int) -> Path:
        """Lazy query loop with one round of attachment regrowth.

        Mass invalidation can strand a query endpoint whose initial
        connections all died; growing fresh validated attachments around
        both endpoints gets one retry before the failure propagates.
        """
        try:
            return self._lazy_query_loop(s_node, g_node)
        except Disconnected:
            grew_s = self._grow_attachment(s_node)
            grew_g = self._grow_attachment(g_node)
            if not (grew_s or grew_g):
                raise
            return self._lazy_query_loop(s_node, g_node)

    def _no_path_failure(self) -> PlanningFailure:
        if self.attempts.remaining == 0:
            return BudgetExhausted("sampling budget exhausted without a valid path")
        return Disconnected("no path through the roadmap")

    # -- stats -------------------------------------------------------------------

    def roadmap_size(self) -> tuple[int, int]:
        return len(self.rm.nodes), len(self.rm.edges)


def _region_parameters(env: Environment, skeleton: AnnotatedSkeleton) -> tuple[float, int]:
    """Region radius and advance step (in intermediates) for a planner.

    Radius: three bounding radii, floored at two grid cells.  Step: the
    region slides roughly its own diameter per advance (at least 2% of
    the boundary), so edge traversal fits inside paper-scale budgets.
    """
    radius = max(3.0 * env.robot.bounding_radius, 2.0 * skeleton.grid_resolution)
    stride = max(2.0 * radius, min(env.width, env.height) / 50.0)
    step = max(1, math.ceil(stride / skeleton.grid_resolution))
    return radius, step


class HaspPlanner(Planner):
    """Hierarchical skeleton-guided lazy roadmap planner."""

    name = "hasp"
    needs_skeleton = True

    def __init__(self, *args, fix_policy: str = "descending", **kwargs) -> None:
        super().__init__(*args, **kwargs)
        self.policy = AcceptanceCriteria.for_robot(self.env.robot, self.safety_factor)
        self.fix_policy = fix_policy
        self.region_radius, self.advance_step = _region_parameters(self.env, self.skeleton)

    def build(self) -> None:
        init_local_components(
            self.rm,
            self.skeleton,
            self.policy,
            self.samples_per_iteration,
            self.rng,
            self.region_radius,
            k=self.k,
            resolution=self.resolution,
            attempts=self.attempts,
        )
        lazy_connect_components(self.rm, self.skeleton, self.policy)

    def _query(self, s: Configuration, g: Configuration) -> Path:
        s_node = self._attach(s)
        g_node = self._attach(g)
        path_set = PathSet()
        while True:
            self._check_deadline()
            try:
                found, path = build_path_set(
                    self.rm,
                    s_node,
                    g_node,
                    self.budget,
                    path_set,
                    self.resolution,
                    self._deadline,
                )
            except NoCandidatePath:
                raise self._no_path_failure() from None
            if found:
                return path
            repaired = False
            while len(path_set) > 0:
                self._check_deadline()
                record = path_set.pop()
                fixed, unfixable = fix_path(
                    self.rm,
                    self.skeleton,
                    record,
                    self.rng,
                    self.region_radius,
                    self.attempts,
                    policy=self.fix_policy,
                    step=self.advance_step,
                    samples_per_step=self.samples_per_iteration,
                    k=self.k,
                    resolution=self.resolution,
                )
                update_path_set(path_set, unfixable)
                if fixed:
                    repaired = True
                    break
            _ = repaired  # either way, re-enumerate over the repaired roadmap


class BasicPrmPlanner(Planner):
    """Uniform sampling with fully validated nodes and edges."""

    name = "basic"

    def build(self) -> None:
        while self.attempts.take(1):
            for q in sample_in_region(self.env, self.rng, None, 1, "full"):
                nid = self.rm.add_node(q)
                connect_neighbors(self.rm, nid, self.k, "validated", self.resolution)

    def _query(self, s: Configuration, g: Configuration) -> Path:
        s_node = self._attach(s)
        g_node = self._attach(g)
        while True:
            self._check_deadline()
            path = shortest_path(self.rm, s_node, g_node, VALID_ONLY)
            if path is not None:
                return path
            n = self.attempts.take(self.samples_per_iteration)
            if n == 0:
                raise self._no_path_failure()
            for q in sample_in_region(self.env, self.rng, None, n, "full"):
                nid = self.rm.add_node(q)
                connect_neighbors(self.rm, nid, self.k, "validated", self.resolution)


class LazyPrmPlanner(Planner):
    """Uniform unvalidated nodes and edges; validation happens at query
    time, one candidate path at a time."""

    name = "lazy"

    def build(self) -> None:
        xmin, ymin, xmax, ymax = self.env.boundary
        rigid = self.env.robot.kind == "rigid"
        new_nodes = []
        while self.attempts.take(1):
            x = xmin + self.rng.random() * (xmax - xmin)
            y = ymin + self.rng.random() * (ymax - ymin)
            theta = (self.rng.random() * 2.0 - 1.0) * math.pi if rigid else 0.0
            nid = self.rm.add_node(Configuration(x, y, theta))
            self.rm.nodes[nid].validated = None  # deferred to the query phase
            new_nodes.append(nid)
        for nid in new_nodes:
            connect_neighbors(self.rm, nid, self.k, "lazy", self.resolution)

    def _query(self, s: Configuration, g: Configuration) -> Path:
        s_node = self._attach(s, lazy=True)
        g_node = self._attach(g, lazy=True)
        return self._query_with_reattach(s_node, g_node)


class PartialLazyPrmPlanner(Planner):
    """Construction validates with the surface-only check; queries
    re-validate candidate paths with full checks and discard failures."""

    name = "partial"

    def build(self) -> None:
        while self.attempts.take(1):
            for q in sample_in_region(self.env, self.rng, None, 1, "partial"):
                nid = self.rm.add_node(q)
                self.rm.nodes[nid].validated = None  # only partially checked
                qn = self.rm.nodes[nid].config
                for nb in self.rm.nearest_nodes(qn, self.k, exclude={nid}):
                    if self.rm.edge_between(nid, nb) is not None:
                        continue
                    if edge_valid(
                        self.env, qn, self.rm.nodes[nb].config, self.resolution, "partial"
                    ):
                        self.rm.add_edge(nid, nb, EdgeStatus.UNVALIDATED)

    def _query(self, s: Configuration, g: Configuration) -> Path:
        s_node = self._attach(s)
        g_node = self._attach(g)
        return self._query_with_reattach(s_node, g_node)


class DrPrmPlanner(Planner):
    """Dynamic-region roadmap: local components at every skeleton vertex
    expand along every skeleton edge with validated sampling until the
    region pairs meet or block."""

    name = "drprm"
    needs_skeleton = True

    def __init__(self, *args, **kwargs) -> None:
        super().__init__(*args, **kwargs)
        self.region_radius, self.advance_step = _region_parameters(self.env, self.skeleton)

    def build(self) -> None:
        accept_all = AcceptanceCriteria(0.0)
        init_local_components(
            self.rm,
            self.skeleton,
            accept_all,
            self.samples_per_iteration,
            self.rng,
            self.region_radius,
            k=self.k,
            resolution=self.resolution,
            attempts=self.attempts,
        )
        regions = []
        for eid in sorted(self.skeleton.edges):
            ru, rv = get_or_create_edge_regions(self.rm, self.skeleton, eid, self.region_radius)
            regions.extend([ru, rv])
        while self.attempts.remaining > 0:
            live = [r for r in regions if not r.done]
            if not live:
                break
            for region in live:
                if region.done:
                    continue
                n = self.attempts.take(self.samples_per_iteration)
                if n == 0:
                    return
                advance_region(
                    self.rm,
                    self.skeleton,
                    region,
                    self.rng,
                    step=self.advance_step,
                    n_attempts=n,
                    k=self.k,
                    resolution=self.resolution,
                )

    def _query(self, s: Configuration, g: Configuration) -> Path:
        s_node = self._attach(s)
        g_node = self._attach(g)
        path = shortest_path(self.rm, s_node, g_node, VALID_ONLY)
        if path is None:
            raise self._no_path_failure()
        return path


class MaPrmPlanner(Planner):
    """Uniform samples retracted to the workspace medial axis before
    validation; clearance queries spent on retraction are counted."""

    name = "maprm"
    retraction_tolerance = 1e-3

    def build(self) -> None:
        xmin, ymin, xmax, ymax = self.env.boundary
        rigid = self.env.robot.kind == "rigid"
        diag = math.hypot(xmax - xmin, ymax - ymin)
        while self.attempts.take(1):
            x = xmin + self.rng.random() * (xmax - xmin)
            y = ymin + self.rng.random() * (ymax - ymin)
            theta = (self.rng.random() * 2.0 - 1.0) * math.pi if rigid else 0.0
            retracted = self._retract((x, y), diag)
            if retracted is None:
                # still burn the attempt's collision check for accounting
                is_valid_full(self.env, Configuration(x, y, theta))
                continue
            q = Configuration(retracted[0], retracted[1], theta)
            if not is_valid_full(self.env, q):
                continue
            nid = self.rm.add_node(q)
            connect_neighbors(self.rm, nid, self.k, "validated", self.resolution)

    def _retract(self, p: tuple[float, float], diag: float) -> tuple[float, float] | None:
        """Push a point away from its nearest obstacle witness until the
        witness changes (binary search on the medial-axis crossing)."""
        from .geometry import clearance_witness

        d0, w0 = clearance_witness(self.env, p[0], p[1])
        if d0 <= self.retraction_tolerance:
            return None
        ux, uy = (p[0] - w0[0]) / d0, (p[1] - w0[1]) / d0

        def still_same_witness(t: float) -> bool:
            d, _ = clearance_witness(self.env, p[0] + t * ux, p[1] + t * uy)
            return d >= d0 + t - 1e-6

        lo, hi = 0.0, d0
        while still_same_witness(hi):
            lo = hi
            hi *= 2.0
            if hi > 2.0 * diag:
                return None  # no crossing found (degenerate geometry)
        while hi - lo > self.retraction_tolerance:
            mid = 0.5 * (lo + hi)
            if still_same_witness(mid):
                lo = mid
            else:
                hi = mid
        return (p[0] + lo * ux, p[1] + lo * uy)

    def _query(self, s: Configuration, g: Configuration) -> Path:
        s_node = self._attach(s)
        g_node = self._attach(g)
        while True:
            self._check_deadline()
            path = shortest_path(self.rm, s_node, g_node, VALID_ONLY)
            if path is not None:
                return path
            n = self.attempts.take(self.samples_per_iteration)
            if n == 0:
                raise self._no_path_failure()
            for q in sample_in_region(self.env, self.rng, None, n, "full"):
                nid = self.rm.add_node(q)
                connect_neighbors(self.rm, nid, self.k, "validated", self.resolution)


PLANNERS = {
    cls.name: cls
    for cls in (
        HaspPlanner,
        BasicPrmPlanner,
        LazyPrmPlanner,
        PartialLazyPrmPlanner,
        DrPrmPlanner,
        MaPrmPlanner,
    )
}

PLANNER_NAMES = tuple(PLANNERS)


def make_planner(name: str, env: Environment, **kwargs) -> Planner:
    try:
        cls = PLANNERS[name]
    except KeyError:
        raise ValueError(f"unknown planner {name!r}; choose from {sorted(PLANNERS)}") from None
    return cls(env, **kwargs)

"""Graph search over partially validated roadmaps.

Search respects an edge-status filter (the lazy planners search the
union of valid and unvalidated edges; fully validating planners search
valid edges only) and always skips discarded nodes.  Tie-breaking is by
node id everywhere so that repeated runs are deterministic.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Iterator

from .geometry import Environment, clearance, interpolate
from .roadmap import EdgeStatus, Roadmap

VALID_ONLY = frozenset({EdgeStatus.VALID})
NON_INVALID = frozenset({EdgeStatus.VALID, EdgeStatus.UNVALIDATED})


@dataclass
class Path:
    """A node sequence through the roadmap with its summed edge cost."""

    nodes: list[int]
    total_cost: float
    min_clearance: float | None = None

    def edge_ids(self, rm: Roadmap) -> list[int]:
        out = []
        for u, v in zip(self.nodes, self.nodes[1:]):
            eid = rm.edge_between(u, v)
            if eid is None:
                raise ValueError(f"path nodes {u}-{v} share no roadmap edge")
            out.append(eid)
        return out


def _edge_usable(
    rm: Roadmap,
    eid: int,
    edge_filter: frozenset,
    allowed_edges: frozenset | None,
    excluded_edges: set | None,
) -> bool:
    if excluded_edges and eid in excluded_edges:
        return False
    if allowed_edges is not None:
        return eid in allowed_edges
    return rm.edges[eid].status in edge_filter


def shortest_path(
    rm: Roadmap,
    s_node: int,
    g_node: int,
    edge_filter: frozenset = NON_INVALID,
    allowed_edges: frozenset | None = None,
    excluded_edges: set | None = None,
    excluded_nodes: set | None = None,
) -> Path | None:
    """Dijkstra over the filtered edge subgraph; None when unreachable.

    ``allowed_edges``, when given, freezes the searchable edge set by id
    (status changes after the snapshot are ignored).
    """
    if s_node not in rm.nodes or g_node not in rm.nodes:
        raise KeyError("start or goal node not in roadmap")
    if excluded_nodes and (s_node in excluded_nodes or g_node in excluded_nodes):
        return None
    if rm.nodes[s_node].invalidated or rm.nodes[g_node].invalidated:
        return None
    if s_node == g_node:
        return Path([s_node], 0.0)
    dist: dict[int, float] = {s_node: 0.0}
    parent: dict[int, int] = {}
    heap: list[tuple[float, int]] = [(0.0, s_node)]
    settled: set[int] = set()
    while heap:
        d, n = heapq.heappop(heap)
        if n in settled:
            continue
        settled.add(n)
        if n == g_node:
            nodes = [n]
            while nodes[-1] != s_node:
                nodes.append(parent[nodes[-1]])
            nodes.reverse()
            return Path(nodes, d)
        for nb in sorted(rm.neighbors(n)):
            eid = rm.neighbors(n)[nb]
            if nb in settled:
                continue
            if rm.nodes[nb].invalidated:
                continue
            if excluded_nodes and nb in excluded_nodes:
                continue
            if not _edge_usable(rm, eid, edge_filter, allowed_edges, excluded_edges):
                continue
            nd = d + rm.edges[eid].cost
            if nd < dist.get(nb, math.inf):
                dist[nb] = nd
                parent[nb] = n
                heapq.heappush(heap, (nd, nb))
    return None


def k_shortest_paths(
    rm: Roadmap,
    s_node: int,
    g_node: int,
    k: int | None = None,
    edge_filter: frozenset = NON_INVALID,
    allowed_edges: frozenset | None = None,
) -> Iterator[Path]:
    """Loopless paths in non-decreasing cost order (Yen's algorithm).

    Yields lazily; pass ``k=None`` for an unbounded stream.  Spur
    searches reuse the same edge filter and id tie-breaking as
    :func:`shortest_path`, so the stream is deterministic.
    """
    if k is not None and k < 1:
        raise ValueError("k must be at least 1")
    first = shortest_path(rm, s_node, g_node, edge_filter, allowed_edges)
    if first is None:
        return
    yield first
    accepted: list[Path] = [first]
    candidates: list[tuple[float, tuple[int, ...]]] = []
    seen: set[tuple[int, ...]] = {tuple(first.nodes)}
    while k is None or len(accepted) < k:
        prev = accepted[-1].nodes
        for i in range(len(prev) - 1):
            spur = prev[i]
            root = prev[: i + 1]
            root_cost = 0.0
            for u, v in zip(root, root[1:]):
                root_cost += rm.edges[rm.edge_between(u, v)].cost
            excluded_edges: set[int] = set()
            for p in accepted:
                if len(p.nodes) > i and p.nodes[: i + 1] == root:
                    eid = rm.edge_between(p.nodes[i], p.nodes[i + 1])
                    if eid is not None:
                        excluded_edges.add(eid)
            excluded_nodes = set(root[:-1])
            tail = shortest_path(
                rm, spur, g_node, edge_filter, allowed_edges, excluded_edges, excluded_nodes
            )
            if tail is None:
                continue
            nodes = tuple(root[:-1] + tail.nodes)
            if nodes in seen:
                continue
            seen.add(nodes)
            heapq.heappush(candidates, (root_cost + tail.total_cost, nodes))
        if not candidates:
            return
        cost, nodes = heapq.heappop(candidates)
        path = Path(list(nodes), cost)
        accepted.append(path)
        yield path


def evaluate_path(
    env: Environment,
    rm: Roadmap,
    path: Path,
    resolution: float | None = None,
) -> tuple[float, float]:
    """Total C-space cost and minimum workspace clearance along a path.

    Clearance is sampled at the reference point of configurations
    interpolated every ``resolution`` workspace units along each edge.
    """
    if resolution is None:
        resolution = env.default_resolution()
    total = sum(rm.edges[eid].cost for eid in path.edge_ids(rm))
    min_cl = math.inf
    nodes = path.nodes
    q0 = rm.nodes[nodes[0]].config
    min_cl = clearance(env, q0.x, q0.y)
    for u, v in zip(nodes, nodes[1:]):
        qa, qb = rm.nodes[u].config, rm.nodes[v].config
        span = math.hypot(qb.x - qa.x, qb.y - qa.y)
        n = max(1, math.ceil(span / resolution))
        for i in range(1, n + 1):
            q = interpolate(qa, qb, i / n)
            min_cl = min(min_cl, clearance(env, q.x, q.y))
    path.min_clearance = min_cl
    path.total_cost = total
    return total, min_cl

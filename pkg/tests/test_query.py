import itertools
import math

import numpy as np
import pytest

from skelplan.geometry import Configuration, Environment, RobotModel
from skelplan.query import (
    NON_INVALID,
    VALID_ONLY,
    Path,
    evaluate_path,
    k_shortest_paths,
    shortest_path,
)
from skelplan.roadmap import EdgeStatus, Roadmap

from conftest import square
from oracles import bellman_ford, enumerate_simple_paths


def graph_roadmap(positions, edges, statuses=None):
    """Roadmap from explicit node positions and (u, v) edges.

    Edge costs are the point-robot metric (Euclidean), matching the
    roadmap's own cost computation.
    """
    env = Environment((-1000, -1000, 1000, 1000), [], RobotModel("point"))
    rm = Roadmap(env)
    for (x, y) in positions:
        rm.add_node(Configuration(x, y))
    for i, (u, v) in enumerate(edges):
        status = statuses[i] if statuses else EdgeStatus.VALID
        rm.add_edge(u, v, status)
    return rm


def random_graph(rng, n_nodes, n_edges):
    positions = [(rng.uniform(0, 100), rng.uniform(0, 100)) for _ in range(n_nodes)]
    pairs = list(itertools.combinations(range(n_nodes), 2))
    rng.shuffle(pairs)
    edges = pairs[:n_edges]
    return positions, edges


def adjacency_of(rm, statuses=frozenset({EdgeStatus.VALID})):
    adj = {}
    for e in rm.edges.values():
        if e.status not in statuses:
            continue
        adj.setdefault(e.u, {})[e.v] = e.cost
        adj.setdefault(e.v, {})[e.u] = e.cost
    return adj


class TestShortestPath:
    def test_same_node_zero_cost(self):
        rm = graph_roadmap([(0, 0)], [])
        p = shortest_path(rm, 0, 0)
        assert p.nodes == [0] and p.total_cost == 0.0

    def test_diamond_prefers_cheap_side(self):
        #   1
        #  / \     0-1-3 costs 1+1; 0-2-3 costs 1.5+1.5
        # 0   3
        #  \ /
        #   2
        rm = graph_roadmap(
            [(0, 0), (1, 0), (0.75, -1.25), (2, 0)],
            [(0, 1), (1, 3), (0, 2), (2, 3)],
        )
        p = shortest_path(rm, 0, 3)
        assert p.nodes == [0, 1, 3]
        assert p.total_cost == pytest.approx(2.0)

    def test_no_path_returns_none(self):
        rm = graph_roadmap([(0, 0), (1, 1)], [])
        assert shortest_path(rm, 0, 1) is None

    @pytest.mark.parametrize("seed", range(8))
    def test_matches_bellman_ford_on_random_graphs(self, seed):
        rng = np.random.default_rng(seed)
        positions, edges = random_graph(rng, 50, 120)
        rm = graph_roadmap(positions, edges)
        weighted = [(u, v, rm.edges[rm.edge_between(u, v)].cost) for u, v in edges]
        dist = bellman_ford(50, weighted, 0)
        for target in range(1, 50):
            p = shortest_path(rm, 0, target)
            if p is None:
                assert math.isinf(dist[target])
            else:
                assert p.total_cost == pytest.approx(dist[target], abs=1e-9)

    def test_edge_filter_excludes_statuses(self):
        rm = graph_roadmap(
            [(0, 0), (1, 0), (2, 0)],
            [(0, 1), (1, 2), (0, 2)],
            [EdgeStatus.VALID, EdgeStatus.VALID, EdgeStatus.UNVALIDATED],
        )
        direct = shortest_path(rm, 0, 2, NON_INVALID)
        assert direct.nodes == [0, 2]
        validated_only = shortest_path(rm, 0, 2, VALID_ONLY)
        assert validated_only.nodes == [0, 1, 2]

    def test_invalidated_nodes_skipped(self):
        rm = graph_roadmap(
            [(0, 0), (1, 0), (2, 0), (1, 2)],
            [(0, 1), (1, 2), (0, 3), (3, 2)],
        )
        rm.invalidate_node(1)
        p = shortest_path(rm, 0, 2)
        assert p.nodes == [0, 3, 2]

    def test_allowed_edges_snapshot_ignores_status_drift(self):
        rm = graph_roadmap(
            [(0, 0), (1, 0), (2, 0)],
            [(0, 1), (1, 2)],
            [EdgeStatus.UNVALIDATED, EdgeStatus.UNVALIDATED],
        )
        allowed = frozenset(rm.edges)
        rm.set_status(0, EdgeStatus.INVALID)
        p = shortest_path(rm, 0, 2, allowed_edges=allowed)
        assert p is not None  # snapshot still routes through the edge


class TestKShortestPaths:
    def test_single_path_stream_length_one(self):
        rm = graph_roadmap([(0, 0), (1, 0), (2, 0)], [(0, 1), (1, 2)])
        paths = list(k_shortest_paths(rm, 0, 2, k=5))
        assert len(paths) == 1
        assert paths[0].nodes == [0, 1, 2]

    def test_diamond_two_paths_in_cost_order(self):
        rm = graph_roadmap(
            [(0, 0), (1, 0), (0.75, -1.25), (2, 0)],
            [(0, 1), (1, 3), (0, 2), (2, 3)],
        )
        paths = list(k_shortest_paths(rm, 0, 3, k=5))
        assert [p.nodes for p in paths] == [[0, 1, 3], [0, 2, 3]]
        assert paths[0].total_cost <= paths[1].total_cost

    @pytest.mark.parametrize("seed", range(6))
    def test_matches_exhaustive_enumeration(self, seed):
        rng = np.random.default_rng(100 + seed)
        n = int(rng.integers(8, 30))
        positions, edges = random_graph(rng, n, min(2 * n, n * (n - 1) // 2))
        rm = graph_roadmap(positions, edges)
        adj = adjacency_of(rm)
        oracle = enumerate_simple_paths(adj, 0, n - 1)
        got = list(k_shortest_paths(rm, 0, n - 1, k=10))
        assert len(got) == min(10, len(oracle))
        for path, (cost, _nodes) in zip(got, oracle):
            # same cost rank; node sequences may differ only on exact ties
            assert path.total_cost == pytest.approx(cost, abs=1e-9)

    def test_costs_non_decreasing(self):
        rng = np.random.default_rng(77)
        positions, edges = random_graph(rng, 25, 60)
        rm = graph_roadmap(positions, edges)
        costs = [p.total_cost for p in k_shortest_paths(rm, 0, 24, k=15)]
        assert costs == sorted(costs)

    def test_loopless(self):
        rng = np.random.default_rng(78)
        positions, edges = random_graph(rng, 15, 40)
        rm = graph_roadmap(positions, edges)
        for p in k_shortest_paths(rm, 0, 14, k=20):
            assert len(set(p.nodes)) == len(p.nodes)

    def test_filter_soundness(self):
        rng = np.random.default_rng(79)
        positions, edges = random_graph(rng, 20, 50)
        statuses = [
            EdgeStatus(["valid", "unvalidated", "invalid"][i % 3])
            for i in range(len(edges))
        ]
        rm = graph_roadmap(positions, edges, statuses)
        for p in k_shortest_paths(rm, 0, 19, k=10, edge_filter=NON_INVALID):
            for eid in p.edge_ids(rm):
                assert rm.edges[eid].status in NON_INVALID

    def test_unbounded_stream_terminates(self):
        rm = graph_roadmap(
            [(0, 0), (1, 0), (0.75, -1.25), (2, 0)],
            [(0, 1), (1, 3), (0, 2), (2, 3)],
        )
        assert len(list(k_shortest_paths(rm, 0, 3, k=None))) == 2


class TestEvaluatePath:
    def test_straight_segment_cost(self):
        env = Environment((0, 0, 20, 10), [], RobotModel("point"))
        rm = Roadmap(env)
        a = rm.add_node(Configuration(2, 5))
        b = rm.add_node(Configuration(9, 5))
        rm.add_edge(a, b, EdgeStatus.VALID)
        cost, _ = evaluate_path(env, rm, Path([a, b], 0.0), resolution=0.1)
        assert cost == pytest.approx(7.0)

    def test_gap_min_clearance(self):
        env = Environment(
            (0, 0, 10, 10),
            [square(3, 0, 7, 4.4), square(3, 5.6, 7, 10)],
            RobotModel("point"),
        )
        rm = Roadmap(env)
        a = rm.add_node(Configuration(1, 5))
        b = rm.add_node(Configuration(9, 5))
        rm.add_edge(a, b, EdgeStatus.VALID)
        _, min_cl = evaluate_path(env, rm, Path([a, b], 0.0), resolution=0.05)
        assert min_cl == pytest.approx(0.6, abs=0.05)

    def test_zero_length_path(self):
        env = Environment((0, 0, 10, 10), [], RobotModel("point"))
        rm = Roadmap(env)
        a = rm.add_node(Configuration(2, 5))
        cost, min_cl = evaluate_path(env, rm, Path([a], 0.0))
        assert cost == 0.0
        assert min_cl == pytest.approx(2.0)

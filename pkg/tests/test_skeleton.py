import math

import numpy as np
import pytest

from skelplan.geometry import Configuration, Environment, Polygon, RobotModel, clearance
from skelplan.skeleton import (
    AcceptanceCriteria,
    AnnotatedSkeleton,
    EmptyFreeSpace,
    accepts,
    annotate_skeleton,
    build_workspace_skeleton,
    count_free_components,
)

from conftest import random_point_env, square


def all_intermediates(sk):
    for e in sk.edges.values():
        for p in e.intermediates:
            yield p


class TestBuildSquare:
    """Grid medial axis of an empty square is its two diagonals."""

    def setup_method(self):
        self.env = Environment((0, 0, 10, 10), [], RobotModel("point"))
        self.res = 0.05
        self.sk = build_workspace_skeleton(self.env, self.res)

    def test_skeleton_to_diagonals_hausdorff(self):
        # every skeleton point lies within 2 cells of a diagonal
        tol = 2 * self.res
        for (x, y) in all_intermediates(self.sk):
            d1 = abs(x - y) / math.sqrt(2)
            d2 = abs((x - 10) + y - 0) / math.sqrt(2)  # anti-diagonal x+y=10
            assert min(d1, d2) <= tol

    def test_diagonals_covered_by_skeleton(self):
        # points along both diagonals have a skeleton point within 2 cells
        pts = list(all_intermediates(self.sk)) + [
            v.position for v in self.sk.vertices.values()
        ]
        arr = np.asarray(pts)
        tol = 2 * self.res
        for t in np.linspace(0.08, 0.92, 25):
            for target in ((10 * t, 10 * t), (10 * t, 10 * (1 - t))):
                d = np.hypot(arr[:, 0] - target[0], arr[:, 1] - target[1]).min()
                assert d <= tol, f"diagonal point {target} uncovered (nearest {d:.3f})"

    def test_center_vertex_exists(self):
        vid = self.sk.nearest_vertex(5, 5)
        x, y = self.sk.vertices[vid].position
        assert math.hypot(x - 5, y - 5) <= 2 * self.res


class TestBuildCorridor:
    def test_single_midline_chain(self):
        env = Environment(
            (0, 0, 10, 10),
            [square(3, 0, 7, 4.5), square(3, 5.5, 7, 10)],
            RobotModel("point"),
        )
        sk = build_workspace_skeleton(env, 0.05)
        mid = [
            (x, y) for (x, y) in all_intermediates(sk) if 3.5 < x < 6.5
        ]
        assert mid, "no skeleton points found inside the corridor"
        for (x, y) in mid:
            assert abs(y - 5.0) <= 2 * 0.05

    def test_corridor_connects_left_right(self):
        env = Environment(
            (0, 0, 10, 10),
            [square(3, 0, 7, 4.5), square(3, 5.5, 7, 10)],
            RobotModel("point"),
        )
        sk = build_workspace_skeleton(env, 0.05)
        assert sk.component_count() == 1


class TestBuildErrors:
    def test_empty_free_space(self):
        env = Environment(
            (0, 0, 4, 4), [square(0, 0, 4, 4)], RobotModel("point")
        )
        with pytest.raises(EmptyFreeSpace):
            build_workspace_skeleton(env, 0.05)

    def test_resolution_validation(self):
        env = Environment((0, 0, 10, 10), [], RobotModel("point"))
        with pytest.raises(ValueError):
            build_workspace_skeleton(env, 0.5)  # coarser than 1/50 of the side
        with pytest.raises(ValueError):
            build_workspace_skeleton(env, -0.1)


class TestAnnotation:
    def test_center_vertex_annotation(self):
        env = Environment((0, 0, 10, 10), [], RobotModel("point"))
        sk = annotate_skeleton(build_workspace_skeleton(env, 0.05), env)
        vid = sk.nearest_vertex(5, 5)
        assert sk.vertices[vid].annotation == pytest.approx(5.0, abs=2 * 0.05)

    def test_gap_edge_weight_matches_dense_clearance(self):
        # corridor of half-width 0.75: crossing chain weight ~= 0.75
        env = Environment(
            (0, 0, 10, 10),
            [square(3, 0, 7, 4.25), square(3, 5.75, 7, 10)],
            RobotModel("point"),
        )
        res = 0.05
        sk = annotate_skeleton(build_workspace_skeleton(env, res), env)
        corridor_edges = [
            e
            for e in sk.edges.values()
            if any(4 <= x <= 6 for (x, _) in e.intermediates)
        ]
        assert corridor_edges
        weight = min(e.weight for e in corridor_edges)
        assert weight == pytest.approx(0.75, abs=2 * res)
        # dense oracle along the cheapest chain
        chain = min(corridor_edges, key=lambda e: e.weight).intermediates
        oracle = min(clearance(env, x, y) for (x, y) in chain)
        assert weight == pytest.approx(oracle, abs=1e-9)

    def test_idempotent(self):
        env = Environment((0, 0, 10, 10), [square(4, 4, 5, 5)], RobotModel("point"))
        sk = annotate_skeleton(build_workspace_skeleton(env, 0.05), env)
        first = sk.to_json()
        annotate_skeleton(sk, env)
        assert sk.to_json() == first

    def test_weight_at_most_endpoint_annotations(self):
        env = random_point_env(np.random.default_rng(0))
        sk = annotate_skeleton(build_workspace_skeleton(env, 0.1), env)
        tol = 2 * 0.1
        for e in sk.edges.values():
            cap = min(sk.vertices[e.u].annotation, sk.vertices[e.v].annotation)
            assert e.weight <= cap + tol


class TestInvariants:
    def test_determinism_byte_for_byte(self):
        env = random_point_env(np.random.default_rng(5))
        a = annotate_skeleton(build_workspace_skeleton(env, 0.1), env).to_json()
        b = annotate_skeleton(build_workspace_skeleton(env, 0.1), env).to_json()
        assert a == b

    @pytest.mark.parametrize("seed", range(5))
    def test_free_space_and_clearance(self, seed):
        env = random_point_env(np.random.default_rng(100 + seed), n_obstacles=5)
        res = 0.1
        sk = build_workspace_skeleton(env, res)
        for (x, y) in all_intermediates(sk):
            assert clearance(env, x, y) > 0.0
        assert sk.component_count() == count_free_components(env, res)

    def test_endpoints_coincide_with_vertex_positions(self):
        env = random_point_env(np.random.default_rng(42))
        sk = build_workspace_skeleton(env, 0.1)
        for e in sk.edges.values():
            assert e.intermediates[0] == sk.vertices[e.u].position
            assert e.intermediates[-1] == sk.vertices[e.v].position

    def test_intermediate_spacing(self):
        env = random_point_env(np.random.default_rng(43))
        res = 0.1
        sk = build_workspace_skeleton(env, res)
        for e in sk.edges.values():
            for a, b in zip(e.intermediates, e.intermediates[1:]):
                assert math.hypot(b[0] - a[0], b[1] - a[1]) <= 2 * res + 1e-9

    def test_simple_graph(self):
        env = random_point_env(np.random.default_rng(44), n_obstacles=6)
        sk = build_workspace_skeleton(env, 0.1)
        seen = set()
        for e in sk.edges.values():
            assert e.u != e.v
            key = (min(e.u, e.v), max(e.u, e.v))
            assert key not in seen
            seen.add(key)
            assert e.u in sk.vertices and e.v in sk.vertices


class TestRhombusRoutes:
    @staticmethod
    def _gap_crossings(sk):
        """Edges whose chain crosses the rhombus column (x = 10)."""
        return [
            e
            for e in sk.edges.values()
            if min(x for (x, _) in e.intermediates) < 9
            and max(x for (x, _) in e.intermediates) > 11
        ]

    def test_at_least_four_edge_disjoint_routes(self):
        import networkx as nx

        from skelplan.fixtures import make_rhombus

        sk = make_rhombus().ensure_skeleton()
        g = nx.Graph()
        for e in sk.edges.values():
            g.add_edge(e.u, e.v)
        # terminals: everything clearly left/right of the rhombus column
        for vid, v in sk.vertices.items():
            if v.position[0] < 9:
                g.add_edge("start", vid)
            elif v.position[0] > 11:
                g.add_edge(vid, "goal")
        routes = len(list(nx.edge_disjoint_paths(g, "start", "goal")))
        assert routes >= 4

    def test_gap_clearances_distinct(self):
        from skelplan.fixtures import make_rhombus

        sk = make_rhombus().ensure_skeleton()
        crossing = sorted(e.weight for e in self._gap_crossings(sk))
        assert len(crossing) >= 4
        for a, b in zip(crossing, crossing[1:]):
            assert b - a > 0.05


class TestAcceptancePolicy:
    def test_threshold_inclusive(self):
        policy = AcceptanceCriteria(threshold=0.5)
        assert accepts(policy, 0.5)
        assert not accepts(policy, 0.49)

    def test_for_robot(self):
        shape = Polygon([(-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5)])
        policy = AcceptanceCriteria.for_robot(RobotModel("rigid", shape))
        assert policy.threshold == pytest.approx(math.sqrt(0.5))

    def test_point_robot_accepts_any_positive(self):
        policy = AcceptanceCriteria.for_robot(RobotModel("point"))
        assert accepts(policy, 1e-6)
        assert accepts(policy, 0.0)


class TestSerialization:
    def test_roundtrip(self, tmp_path):
        env = random_point_env(np.random.default_rng(9))
        sk = annotate_skeleton(build_workspace_skeleton(env, 0.1), env)
        path = tmp_path / "sk.json"
        sk.save(path)
        loaded = AnnotatedSkeleton.load(path)
        assert loaded.to_json() == sk.to_json()
        assert loaded.annotated
        assert loaded.grid_resolution == pytest.approx(0.1, rel=0.5)

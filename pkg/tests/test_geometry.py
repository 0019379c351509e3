import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skelplan.geometry import (
    Configuration,
    Environment,
    Polygon,
    RobotModel,
    clearance,
    clearance_witness,
    cspace_distance,
    edge_valid,
    interpolate,
    is_valid_full,
    is_valid_partial,
    wrap_angle,
)

from conftest import square
from oracles import (
    convex_polygons_overlap_sat,
    env_boundary_segments,
    env_obstacle_segments,
    min_distance_to_segments_sampled,
    point_in_polygon_crossing,
)


class TestPolygon:
    def test_requires_three_vertices(self):
        with pytest.raises(ValueError):
            Polygon([(0, 0), (1, 0)])

    def test_requires_ccw(self):
        with pytest.raises(ValueError):
            Polygon([(0, 0), (0, 1), (1, 1), (1, 0)])

    def test_rejects_self_intersection(self):
        with pytest.raises(ValueError):
            Polygon([(0, 0), (2, 2), (2, 0), (0, 2)])

    def test_signed_area(self):
        assert square(0, 0, 2, 3).signed_area == pytest.approx(6.0)

    def test_contains_point_matches_crossing_oracle(self):
        poly = Polygon([(1, 1), (6, 2), (7, 6), (3, 8), (0, 4)])
        rng = np.random.default_rng(7)
        for _ in range(500):
            x, y = rng.uniform(-1, 9, size=2)
            assert poly.contains_point(x, y) == point_in_polygon_crossing(
                x, y, poly.vertices
            )

    def test_boundary_point_counts_as_inside(self):
        poly = square(0, 0, 2, 2)
        assert poly.contains_point(1.0, 0.0)
        assert poly.contains_point(2.0, 2.0)


class TestRobotModel:
    def test_point_radius_zero(self):
        assert RobotModel("point").bounding_radius == 0.0

    def test_bounding_radius_is_max_vertex_distance(self):
        shape = Polygon([(-1, -2), (3, -2), (3, 1), (-1, 1)])
        robot = RobotModel("rigid", shape)
        expected = max(math.hypot(x, y) for x, y in shape.vertices)
        assert robot.bounding_radius == pytest.approx(expected)

    def test_rigid_requires_shape(self):
        with pytest.raises(ValueError):
            RobotModel("rigid")


class TestEnvironment:
    def test_obstacle_outside_boundary_rejected(self):
        with pytest.raises(ValueError):
            Environment((0, 0, 5, 5), [square(4, 4, 6, 6)], RobotModel("point"))

    def test_touching_boundary_allowed(self):
        Environment((0, 0, 5, 5), [square(0, 0, 2, 5)], RobotModel("point"))

    def test_roundtrip_json(self, tmp_path, rigid_env):
        path = tmp_path / "env.json"
        rigid_env.save(path)
        loaded = Environment.load(path)
        assert loaded.boundary == rigid_env.boundary
        assert len(loaded.obstacles) == 1
        assert loaded.robot.bounding_radius == pytest.approx(
            rigid_env.robot.bounding_radius
        )


class TestValidityFull:
    def test_empty_env_center_valid(self, empty_env):
        assert is_valid_full(empty_env, Configuration(5, 5))

    def test_obstacle_centroid_invalid(self, unit_square_env):
        assert not is_valid_full(unit_square_env, Configuration(4.5, 4.5))

    def test_out_of_boundary_false_not_error(self, empty_env):
        assert not is_valid_full(empty_env, Configuration(-1, 5))
        assert not is_valid_full(empty_env, Configuration(5, 11))

    def test_rigid_square_overlapping_edge_matches_sat_oracle(self, rigid_env):
        # robot center 0.5 from the obstacle's left edge; half-width 1
        q = Configuration(9.5, 10.0, 0.0)
        robot_poly = [(q.x + dx, q.y + dy) for dx, dy in ((-1, -1), (1, -1), (1, 1), (-1, 1))]
        obstacle = [tuple(p) for p in rigid_env.obstacles[0].vertices]
        assert convex_polygons_overlap_sat(robot_poly, obstacle)  # oracle: collision
        assert not is_valid_full(rigid_env, q)

    def test_rigid_rotated_fits_diagonally(self):
        # gap of half-width 0.8: square of half-width 1 fails axis-aligned
        # but its 45-degree pose (half-diagonal sqrt(2) -> width 1.414) also fails
        shape = Polygon([(-1, -1), (1, -1), (1, 1), (-1, 1)])
        env = Environment(
            (0, 0, 10, 10),
            [square(0, 0, 4.2, 10)],
            RobotModel("rigid", shape),
        )
        assert is_valid_full(env, Configuration(5.3, 5, 0.0))
        assert not is_valid_full(env, Configuration(5.1, 5, 0.0))

    def test_robot_containment_in_obstacle_is_collision(self, rigid_env):
        assert not is_valid_full(rigid_env, Configuration(15, 10, 0.3))

    def test_counter_increments(self, unit_square_env):
        env = unit_square_env
        before = env.counter.full_cd_calls
        is_valid_full(env, Configuration(1, 1))
        is_valid_full(env, Configuration(4.5, 4.5))
        assert env.counter.full_cd_calls == before + 2
        assert env.counter.partial_cd_calls == 0


class TestValidityPartial:
    def test_containment_passes_partial(self, rigid_env):
        q = Configuration(15, 10, 0.0)  # fully inside the block
        assert is_valid_partial(rigid_env, q)
        assert not is_valid_full(rigid_env, q)

    def test_straddling_edge_fails_partial(self, rigid_env):
        assert not is_valid_partial(rigid_env, Configuration(9.5, 10, 0.0))

    def test_point_robot_delegates_to_full_semantics(self, unit_square_env):
        # 1000 random poses: partial and full must agree exactly for a point
        env = unit_square_env
        rng = np.random.default_rng(3)
        for _ in range(1000):
            q = Configuration(rng.uniform(0, 10), rng.uniform(0, 10))
            full = is_valid_full(env, q)
            partial = is_valid_partial(env, q)
            assert full == partial
            # independent crossing-number oracle (generic points)
            oracle_free = not point_in_polygon_crossing(
                q.x, q.y, env.obstacles[0].vertices
            )
            assert full == oracle_free

    def test_partial_counter(self, rigid_env):
        before = rigid_env.counter.partial_cd_calls
        is_valid_partial(rigid_env, Configuration(5, 5, 0))
        assert rigid_env.counter.partial_cd_calls == before + 1
        assert rigid_env.counter.full_cd_calls == 0

    @settings(max_examples=200, deadline=None)
    @given(
        x=st.floats(0.0, 30.0),
        y=st.floats(0.0, 30.0),
        theta=st.floats(-math.pi, math.pi),
    )
    def test_full_implies_partial(self, x, y, theta):
        env = Environment(
            (0, 0, 30, 30),
            [square(10, 0, 20, 20)],
            RobotModel("rigid", Polygon([(-1, -1), (1, -1), (1, 1), (-1, 1)])),
        )
        q = Configuration(x, y, theta)
        if is_valid_full(env, q):
            assert is_valid_partial(env, q)


class TestClearance:
    def test_center_of_empty_boundary(self, empty_env):
        assert clearance(empty_env, 5, 5) == pytest.approx(5.0)

    def test_on_obstacle_edge_zero(self, unit_square_env):
        assert clearance(unit_square_env, 4.0, 4.5) == pytest.approx(0.0, abs=1e-9)

    def test_fixture_point_matches_brute_force(self, unit_square_env):
        # boundary at distance 2.0 beats the square corner at 2*sqrt(2)
        d = clearance(unit_square_env, 2, 2)
        assert d == pytest.approx(2.0)
        segs = env_obstacle_segments(unit_square_env) + env_boundary_segments(
            unit_square_env
        )
        oracle = min_distance_to_segments_sampled(2, 2, segs, samples_per_segment=4000)
        assert d == pytest.approx(oracle, abs=1e-3)

    def test_random_points_match_brute_force(self, unit_square_env):
        rng = np.random.default_rng(11)
        segs = env_obstacle_segments(unit_square_env) + env_boundary_segments(
            unit_square_env
        )
        for _ in range(25):
            x, y = rng.uniform(0.2, 9.8, size=2)
            d = clearance(unit_square_env, x, y)
            oracle = min_distance_to_segments_sampled(x, y, segs, samples_per_segment=4000)
            assert d == pytest.approx(oracle, abs=1e-3)

    def test_zero_iff_on_segment(self, unit_square_env):
        # strictly positive off the boundary segments, zero on them
        assert clearance(unit_square_env, 4.5, 4.0) < 1e-9
        assert clearance(unit_square_env, 0.0, 3.0) < 1e-9  # workspace wall
        assert clearance(unit_square_env, 4.5, 3.9) > 1e-9

    def test_witness_point_realizes_distance(self, unit_square_env):
        d, (wx, wy) = clearance_witness(unit_square_env, 2, 3)
        assert math.hypot(2 - wx, 3 - wy) == pytest.approx(d)

    def test_counter(self, empty_env):
        clearance(empty_env, 1, 1)
        assert empty_env.counter.clearance_calls == 1
        assert empty_env.counter.total == 1


class TestInterpolation:
    def test_wrap_angle_range(self):
        for t in np.linspace(-10, 10, 101):
            w = wrap_angle(t)
            assert -math.pi < w <= math.pi

    def test_shortest_arc(self):
        q1 = Configuration(0, 0, 3.0)
        q2 = Configuration(0, 0, -3.0)
        mid = interpolate(q1, q2, 0.5)
        # shortest arc crosses pi, not zero
        assert abs(mid.theta) > 3.0 or abs(abs(mid.theta) - math.pi) < 0.3

    def test_cspace_distance_weights_rotation(self):
        q1 = Configuration(0, 0, 0.0)
        q2 = Configuration(3, 4, math.pi)
        assert cspace_distance(q1, q2, 0.0) == pytest.approx(5.0)
        assert cspace_distance(q1, q2, 2.0) == pytest.approx(5.0 + 2.0 * math.pi)


class TestEdgeValid:
    def test_zero_length_edge(self, empty_env):
        q = Configuration(5, 5)
        assert edge_valid(empty_env, q, q, 0.5)

    def test_crossing_obstacle_fails(self, unit_square_env):
        assert not edge_valid(
            unit_square_env, Configuration(1, 4.5), Configuration(9, 4.5), 0.1
        )

    def test_near_miss_agrees_with_dense_oracle(self, unit_square_env):
        # segment passing 0.1 above the obstacle at resolution 0.05
        env = unit_square_env
        q1, q2 = Configuration(1, 5.1), Configuration(9, 5.1)
        result = edge_valid(env, q1, q2, 0.05)
        # oracle: fixed-step sampling at 10x finer resolution
        n = int(math.hypot(q2.x - q1.x, q2.y - q1.y) / 0.005)
        oracle = all(
            not point_in_polygon_crossing(
                q1.x + (q2.x - q1.x) * i / n, q1.y + (q2.y - q1.y) * i / n,
                env.obstacles[0].vertices,
            )
            for i in range(n + 1)
        )
        assert result is True
        assert result == oracle

    def test_symmetry(self, unit_square_env):
        rng = np.random.default_rng(4)
        env = unit_square_env
        for _ in range(40):
            a = Configuration(rng.uniform(0, 10), rng.uniform(0, 10))
            b = Configuration(rng.uniform(0, 10), rng.uniform(0, 10))
            assert edge_valid(env, a, b, 0.2) == edge_valid(env, b, a, 0.2)

    def test_rotation_contributes_to_step_count(self, rigid_env):
        # pure rotation still needs interior checks (sweep bound > 0)
        env = rigid_env
        before = env.counter.full_cd_calls
        edge_valid(env, Configuration(5, 5, 0.0), Configuration(5, 5, 3.0), 0.5)
        spent = env.counter.full_cd_calls - before
        assert spent > 2  # endpoints plus interior samples

    def test_instrumentation_matches_mode(self, rigid_env):
        env = rigid_env
        edge_valid(env, Configuration(3, 3, 0), Configuration(5, 5, 0), 0.5, mode="partial")
        assert env.counter.full_cd_calls == 0
        assert env.counter.partial_cd_calls > 0


class TestInstrumentationCompleteness:
    def test_every_op_increments_exactly_one_counter(self, rigid_env):
        env = rigid_env
        ops = [
            lambda: is_valid_full(env, Configuration(3, 3, 0)),
            lambda: is_valid_partial(env, Configuration(3, 3, 0)),
            lambda: clearance(env, 3, 3),
        ]
        for op in ops:
            before = env.counter.snapshot()
            op()
            delta = env.counter.delta(before)
            assert delta.total == 1
        assert env.counter.total == 3

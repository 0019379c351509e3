import numpy as np
import pytest

from skelplan.geometry import Configuration, Environment, Polygon, RobotModel


def square(x0, y0, x1, y1):
    return Polygon([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])


@pytest.fixture
def empty_env():
    return Environment((0, 0, 10, 10), [], RobotModel("point"))


@pytest.fixture
def unit_square_env():
    # unit square obstacle at [4,5]x[4,5] inside a 10x10 boundary
    return Environment((0, 0, 10, 10), [square(4, 4, 5, 5)], RobotModel("point"))


@pytest.fixture
def rigid_env():
    # rigid square robot with half-width 1 and one big block
    shape = Polygon([(-1, -1), (1, -1), (1, 1), (-1, 1)])
    return Environment(
        (0, 0, 30, 30), [square(10, 0, 20, 20)], RobotModel("rigid", shape)
    )


def random_point_env(rng: np.random.Generator, n_obstacles=4, size=20.0):
    """Random rectangles inside the boundary; may overlap each other."""
    obstacles = []
    for _ in range(n_obstacles):
        w = rng.uniform(1.0, 4.0)
        h = rng.uniform(1.0, 4.0)
        x0 = rng.uniform(0.5, size - w - 0.5)
        y0 = rng.uniform(0.5, size - h - 0.5)
        obstacles.append(square(x0, y0, x0 + w, y0 + h))
    return Environment((0, 0, size, size), obstacles, RobotModel("point"))

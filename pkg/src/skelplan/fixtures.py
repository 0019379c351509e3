"""Bundled benchmark environments: Create, Rhombus, and Store.

Each factory returns a ready-to-run :class:`~skelplan.harness.Scenario`
with three queries ordered hardest first, so multi-query reuse is
visible in the timing columns.  Geometry is desk-scale; obstacle
placement is deterministic.
"""

from __future__ import annotations

from .geometry import Configuration, Environment, Polygon, RobotModel
from .harness import Scenario
from .planners import PlannerBudget


def _rect(x0: float, y0: float, x1: float, y1: float) -> Polygon:
    return Polygon([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])


def _diamond(cx: float, cy: float, rx: float, ry: float) -> Polygon:
    return Polygon([(cx + rx, cy), (cx, cy + ry), (cx - rx, cy), (cx, cy - ry)])


def make_create(budget: PlannerBudget | None = None) -> Scenario:
    """Square rigid robot, one wide and one narrow corridor.

    A single block leaves a 6-unit-wide corridor above and a 0.6-unit
    slot below.  The slot is physically passable at near-zero heading
    but its clearance (0.3) is below the robot's bounding radius
    (~0.354), so clearance-guided planning routes through the wide
    corridor.
    """
    robot = RobotModel("rigid", _rect_shape(0.25, 0.25))
    env = Environment(
        boundary=(0.0, 0.0, 22.0, 14.0),
        obstacles=[_rect(5.0, 0.6, 17.0, 8.0)],
        robot=robot,
    )
    queries = [
        (Configuration(2.0, 7.0, 0.0), Configuration(20.0, 7.0, 0.0)),
        (Configuration(2.0, 12.0, 0.0), Configuration(20.0, 12.0, 0.0)),
        (Configuration(16.0, 11.0, 0.0), Configuration(6.0, 11.0, 0.0)),
    ]
    return Scenario(
        name="create",
        env=env,
        queries=queries,
        budget=budget or PlannerBudget(),
        resolution=0.15,
    )


def make_rhombus(budget: PlannerBudget | None = None) -> Scenario:
    """Point robot with three rhombi stacked mid-field.

    The four gaps (top rim, two inter-rhombus passages, bottom rim)
    have pairwise distinct clearances: roughly 0.7, 1.1, 1.3, 1.5.
    """
    env = Environment(
        boundary=(0.0, 0.0, 20.0, 20.0),
        obstacles=[
            _diamond(10.0, 16.9, 2.6, 1.7),
            _diamond(10.0, 10.8, 3.2, 2.2),
            _diamond(10.0, 4.5, 2.8, 1.5),
        ],
        robot=RobotModel("point"),
    )
    queries = [
        (Configuration(2.0, 10.0), Configuration(18.0, 10.0)),
        (Configuration(2.0, 2.0), Configuration(18.0, 18.0)),
        (Configuration(2.0, 10.0), Configuration(2.0, 18.0)),
    ]
    return Scenario(
        name="rhombus",
        env=env,
        queries=queries,
        budget=budget or PlannerBudget(),
        resolution=0.15,
    )


def make_store(n_obstacles: int = 50, budget: PlannerBudget | None = None) -> Scenario:
    """Grocery-store grid: up to 52 shelf slots in 4 rows of 13 columns.

    Shelf lengths vary deterministically so the aisles between rows
    have different lengths; two slots are skipped to open a plaza,
    giving the default 50 obstacles.
    """
    if not 1 <= n_obstacles <= 52:
        raise ValueError("store layout supports 1..52 obstacles")
    skipped = {(1, 6), (2, 6)}
    slots = []
    for row in range(4):
        for col in range(13):
            if (row, col) in skipped:
                continue
            slots.append((row, col))
    for row, col in sorted(skipped):
        slots.append((row, col))  # reinstated only if n_obstacles > 50
    obstacles = []
    for row, col in slots[:n_obstacles]:
        cx = 2.5 + col * (31.0 / 12.0)
        y0 = 1.5 + row * 5.7
        height = 3.0 + 1.2 * ((col * 7 + row * 3) % 5) / 4.0
        obstacles.append(_rect(cx - 0.45, y0, cx + 0.45, y0 + height))
    env = Environment(
        boundary=(0.0, 0.0, 36.0, 24.0),
        obstacles=obstacles,
        robot=RobotModel("rigid", _rect_shape(0.3, 0.2)),
    )
    queries = [
        (Configuration(1.2, 1.2, 0.0), Configuration(34.8, 22.8, 0.0)),
        (Configuration(1.2, 22.8, 0.0), Configuration(34.8, 1.2, 0.0)),
        (Configuration(1.2, 1.2, 0.0), Configuration(18.0, 1.2, 0.0)),
    ]
    return Scenario(
        name="store",
        env=env,
        queries=queries,
        budget=budget or PlannerBudget(),
        resolution=0.12,
    )


def _rect_shape(hx: float, hy: float) -> Polygon:
    return Polygon([(-hx, -hy), (hx, -hy), (hx, hy), (-hx, hy)])


FIXTURES = {
    "create": make_create,
    "rhombus": make_rhombus,
    "store": make_store,
}


def make_fixture(name: str, budget: PlannerBudget | None = None) -> Scenario:
    try:
        factory = FIXTURES[name]
    except KeyError:
        raise ValueError(f"unknown fixture {name!r}; choose from {sorted(FIXTURES)}") from None
    return factory(budget=budget)

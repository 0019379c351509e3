"""Skeleton-guided probabilistic roadmap planning for 2D robots.

Modules:

- :mod:`skelplan.geometry` -- polygons, collision checks, clearance.
- :mod:`skelplan.skeleton` -- medial-axis workspace skeletons with
  clearance annotations.
- :mod:`skelplan.roadmap` -- the C-space roadmap, sampling regions, and
  connection machinery shared by the planners.
- :mod:`skelplan.query` -- shortest-path and k-shortest-path search
  over partially validated roadmaps.
- :mod:`skelplan.planners` -- the hierarchical skeleton-guided planner
  and five probabilistic-roadmap baselines.
- :mod:`skelplan.fixtures` -- the three bundled benchmark environments.
- :mod:`skelplan.harness` -- benchmark trials, suites, result files.
"""

from .geometry import (
    CollisionCounter,
    Configuration,
    Environment,
    Polygon,
    RobotModel,
    clearance,
    edge_valid,
    is_valid_full,
    is_valid_partial,
)
from .skeleton import (
    AcceptanceCriteria,
    AnnotatedSkeleton,
    accepts,
    annotate_skeleton,
    build_workspace_skeleton,
)
from .roadmap import EdgeStatus, Roadmap, SamplingRegion
from .query import Path, evaluate_path, k_shortest_paths, shortest_path
from .planners import (
    BudgetExhausted,
    Disconnected,
    PLANNER_NAMES,
    PlannerBudget,
    PlanningFailure,
    make_planner,
)
from .fixtures import make_create, make_fixture, make_rhombus, make_store
from .harness import RunStats, Scenario, run_suite, run_trial

__all__ = [
    "AcceptanceCriteria",
    "AnnotatedSkeleton",
    "BudgetExhausted",
    "CollisionCounter",
    "Configuration",
    "Disconnected",
    "EdgeStatus",
    "Environment",
    "PLANNER_NAMES",
    "Path",
    "PlannerBudget",
    "PlanningFailure",
    "Polygon",
    "Roadmap",
    "RobotModel",
    "RunStats",
    "SamplingRegion",
    "Scenario",
    "accepts",
    "annotate_skeleton",
    "build_workspace_skeleton",
    "clearance",
    "edge_valid",
    "evaluate_path",
    "is_valid_full",
    "is_valid_partial",
    "k_shortest_paths",
    "make_create",
    "make_fixture",
    "make_planner",
    "make_rhombus",
    "make_store",
    "run_suite",
    "run_trial",
    "shortest_path",
]

__version__ = "0.1.0"

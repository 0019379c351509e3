"""Benchmark harness: trials, suites, and result files.

A trial is (scenario, planner, seed): it builds the initial roadmap
under the sampling budget, then solves the scenario's queries in order
against the same roadmap.  Collision-call figures are measured as
counter deltas around the trial, never taken from the planner.
Skeleton construction and annotation count as pre-processing and run
outside the measured window.

Trials are mutually independent (each owns its environment copy,
roadmap, and counter) and could be dispatched to a worker pool; this
module runs them sequentially.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field
from pathlib import Path as FilePath

from .geometry import Configuration, Environment, is_valid_full
from .planners import PlannerBudget, PlanningFailure, PLANNERS, make_planner
from .query import evaluate_path
from .skeleton import AnnotatedSkeleton, annotate_skeleton, build_workspace_skeleton


class ScenarioLoadError(Exception):
    """A scenario file or config entry could not be loaded."""


@dataclass
class Scenario:
    """One benchmark problem: environment, queries, budget, knobs."""

    name: str
    env: Environment
    queries: list[tuple[Configuration, Configuration]]
    budget: PlannerBudget
    skeleton: AnnotatedSkeleton | None = None
    resolution: float | None = None
    grid_resolution: float | None = None
    safety_factor: float = 1.0

    def validate(self) -> None:
        if not self.queries:
            raise ScenarioLoadError(f"scenario {self.name!r} defines no query")
        probe = self.env.copy()
        for i, (s, g) in enumerate(self.queries):
            for label, q in (("start", s), ("goal", g)):
                if not is_valid_full(probe, q):
                    raise ScenarioLoadError(
                        f"scenario {self.name!r} query {i} {label} is invalid"
                    )

    def ensure_skeleton(self) -> AnnotatedSkeleton:
        """Build and annotate the workspace skeleton once, lazily.

        Skeletonization is pre-processing: it is cached on the scenario
        and excluded from trial timings and counter deltas.
        """
        if self.skeleton is None:
            sk = build_workspace_skeleton(self.env, self.grid_resolution)
            self.skeleton = annotate_skeleton(sk, self.env)
        return self.skeleton


@dataclass
class QueryStats:
    index: int
    solved: bool
    solve_time: float
    path_cost: float | None = None
    min_clearance: float | None = None
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "solved": self.solved,
            "solve_time": self.solve_time,
            "path_cost": self.path_cost,
            "min_clearance": self.min_clearance,
            "error": self.error,
        }


@dataclass
class RunStats:
    scenario: str
    planner: str
    seed: int
    build_time: float = 0.0
    cd_calls: dict = field(default_factory=dict)
    nodes: int = 0
    edges: int = 0
    queries: list[QueryStats] = field(default_factory=list)
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "planner": self.planner,
            "seed": self.seed,
            "build_time": self.build_time,
            "cd_calls": self.cd_calls,
            "nodes": self.nodes,
            "edges": self.edges,
            "queries": [q.to_dict() for q in self.queries],
            "error": self.error,
        }


def run_trial(scenario: Scenario, planner_name: str, seed: int) -> RunStats:
    """Run one seeded trial; planner failures are reported, not raised."""
    stats = RunStats(scenario=scenario.name, planner=planner_name, seed=seed)
    if planner_name not in PLANNERS:
        stats.error = f"unknown planner {planner_name!r}"
        return stats
    env = scenario.env.copy()
    skeleton = None
    if PLANNERS[planner_name].needs_skeleton:
        skeleton = scenario.ensure_skeleton()
    planner = make_planner(
        planner_name,
        env,
        skeleton=skeleton,
        budget=scenario.budget,
        seed=seed,
        resolution=scenario.resolution,
        safety_factor=scenario.safety_factor,
    )
    before = env.counter.snapshot()
    t0 = time.perf_counter()
    planner.build()
    stats.build_time = time.perf_counter() - t0
    paths = []
    for i, (s, g) in enumerate(scenario.queries):
        t0 = time.perf_counter()
        try:
            path = planner.query(s, g)
            elapsed = time.perf_counter() - t0
            stats.queries.append(QueryStats(i, True, elapsed))
            paths.append(path)
        except PlanningFailure as exc:
            elapsed = time.perf_counter() - t0
            stats.queries.append(QueryStats(i, False, elapsed, error=str(exc)))
            paths.append(None)
    stats.cd_calls = env.counter.delta(before).as_dict()
    stats.nodes, stats.edges = planner.roadmap_size()
    # path evaluation is harness post-processing, outside the measured delta
    for qs, path in zip(stats.queries, paths):
        if path is not None:
            cost, min_cl = evaluate_path(env, planner.rm, path, scenario.resolution)
            qs.path_cost = cost
            qs.min_clearance = min_cl
    return stats


# ---------------------------------------------------------------------------
# suite execution
# ---------------------------------------------------------------------------

CSV_COLUMNS = [
    "scenario",
    "planner",
    "seed",
    "query",
    "solved",
    "build_time",
    "solve_time",
    "path_cost",
    "min_clearance",
    "cd_full",
    "cd_partial",
    "cd_clearance",
    "cd_total",
    "nodes",
    "edges",
    "error",
]


def stats_to_rows(stats: RunStats) -> list[dict]:
    if stats.error is not None:
        return [
            {
                "scenario": stats.scenario,
                "planner": stats.planner,
                "seed": stats.seed,
                "query": "",
                "solved": "",
                "build_time": "",
                "solve_time": "",
                "path_cost": "",
                "min_clearance": "",
                "cd_full": "",
                "cd_partial": "",
                "cd_clearance": "",
                "cd_total": "",
                "nodes": "",
                "edges": "",
                "error": stats.error,
            }
        ]
    rows = []
    for qs in stats.queries:
        rows.append(
            {
                "scenario": stats.scenario,
                "planner": stats.planner,
                "seed": stats.seed,
                "query": qs.index,
                "solved": int(qs.solved),
                "build_time": f"{stats.build_time:.6f}",
                "solve_time": f"{qs.solve_time:.6f}",
                "path_cost": "" if qs.path_cost is None else f"{qs.path_cost:.6f}",
                "min_clearance": ""
                if qs.min_clearance is None
                else f"{qs.min_clearance:.6f}",
                "cd_full": stats.cd_calls["full_cd_calls"],
                "cd_partial": stats.cd_calls["partial_cd_calls"],
                "cd_clearance": stats.cd_calls["clearance_calls"],
                "cd_total": stats.cd_calls["total"],
                "nodes": stats.nodes,
                "edges": stats.edges,
                "error": qs.error or "",
            }
        )
    return rows


def _aggregate(values: list[float]) -> dict:
    if not values:
        return {"mean": None, "min": None, "max": None, "n": 0}
    return {
        "mean": sum(values) / len(values),
        "min": min(values),
        "max": max(values),
        "n": len(values),
    }


def aggregate_stats(all_stats: list[RunStats]) -> list[dict]:
    """Table-style aggregation: one cell per (scenario, planner)."""
    cells: dict[tuple[str, str], list[RunStats]] = {}
    order: list[tuple[str, str]] = []
    for st in all_stats:
        key = (st.scenario, st.planner)
        if key not in cells:
            cells[key] = []
            order.append(key)
        cells[key].append(st)
    out = []
    for key in order:
        group = [s for s in cells[key] if s.error is None]
        cell = {
            "scenario": key[0],
            "planner": key[1],
            "seeds": sorted(s.seed for s in cells[key]),
            "errors": [s.error for s in cells[key] if s.error is not None],
            "cd_calls": _aggregate([s.cd_calls["total"] for s in group]),
            "nodes": _aggregate([float(s.nodes) for s in group]),
            "edges": _aggregate([float(s.edges) for s in group]),
            "build_time": _aggregate([s.build_time for s in group]),
            "solved_fraction": (
                sum(q.solved for s in group for q in s.queries)
                / max(1, sum(len(s.queries) for s in group))
            ),
            "queries": [],
        }
        n_queries = max((len(s.queries) for s in group), default=0)
        for qi in range(n_queries):
            qstats = [s.queries[qi] for s in group if len(s.queries) > qi]
            cell["queries"].append(
                {
                    "index": qi,
                    "solve_time": _aggregate([q.solve_time for q in qstats if q.solved]),
                    "path_cost": _aggregate(
                        [q.path_cost for q in qstats if q.path_cost is not None]
                    ),
                    "min_clearance": _aggregate(
                        [q.min_clearance for q in qstats if q.min_clearance is not None]
                    ),
                    "solved": sum(q.solved for q in qstats),
                    "attempted": len(qstats),
                }
            )
        out.append(cell)
    return out


def run_suite(config: dict | str, out_dir: str | FilePath | None = None):
    """Cross-product execution of scenarios x planners x seeds.

    ``config`` is a dict or a path to a JSON file with keys
    ``scenarios`` (list of scenario specs), ``planners`` (names), and
    ``seeds`` (list) or ``n_seeds`` (int, seeds 0..n-1).  Per-row
    failures are recorded and the suite continues.  Returns (rows,
    aggregate, stats); when ``out_dir`` is given, writes
    ``results.csv`` and ``results.json`` there.
    """
    if isinstance(config, (str, FilePath)):
        with open(config) as f:
            config = json.load(f)
    scenarios = [load_scenario(spec) for spec in config["scenarios"]]
    planners = list(config["planners"])
    seeds = list(config["seeds"]) if "seeds" in config else list(range(config.get("n_seeds", 1)))
    all_stats: list[RunStats] = []
    rows: list[dict] = []
    for scenario in scenarios:
        for planner in planners:
            for seed in seeds:
                stats = run_trial(scenario, planner, seed)
                all_stats.append(stats)
                rows.extend(stats_to_rows(stats))
    aggregate = aggregate_stats(all_stats)
    if out_dir is not None:
        out = FilePath(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_csv(rows, out / "results.csv")
        with open(out / "results.json", "w") as f:
            json.dump(
                {"aggregate": aggregate, "trials": [s.to_dict() for s in all_stats]},
                f,
                indent=2,
            )
    return rows, aggregate, all_stats


def write_csv(rows: list[dict], path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)


# ---------------------------------------------------------------------------
# scenario loading
# ---------------------------------------------------------------------------


def _parse_config_pair(item) -> tuple[Configuration, Configuration]:
    def conf(v):
        if isinstance(v, dict):
            return Configuration(v["x"], v["y"], v.get("theta", 0.0))
        vals = list(v)
        return Configuration(vals[0], vals[1], vals[2] if len(vals) > 2 else 0.0)

    if isinstance(item, dict):
        return conf(item["start"]), conf(item["goal"])
    return conf(item[0]), conf(item[1])


def load_queries(source) -> list[tuple[Configuration, Configuration]]:
    """Query pairs from a JSON file path or an already-parsed list."""
    if isinstance(source, (str, FilePath)):
        with open(source) as f:
            source = json.load(f)
    return [_parse_config_pair(item) for item in source]


def load_scenario(spec: dict | str) -> Scenario:
    """Build a scenario from a config entry.

    ``{"fixture": "create", ...overrides}`` starts from a bundled
    fixture; otherwise ``env`` (path or inline dict), ``queries`` (path
    or inline list), optional ``skeleton`` path, ``budget`` fields, and
    the resolution knobs are read directly.
    """
    from .fixtures import make_fixture  # cycle: fixtures build Scenario objects

    if isinstance(spec, (str, FilePath)):
        with open(spec) as f:
            spec = json.load(f)
    try:
        budget_kwargs = dict(spec.get("budget", {}))
        budget = PlannerBudget(**budget_kwargs) if budget_kwargs else None
        if "fixture" in spec:
            scenario = make_fixture(spec["fixture"], budget=budget)
            if "name" in spec:
                scenario.name = spec["name"]
        else:
            env_spec = spec["env"]
            env = (
                Environment.load(env_spec)
                if isinstance(env_spec, (str, FilePath))
                else Environment.from_dict(env_spec)
            )
            scenario = Scenario(
                name=spec.get("name", "scenario"),
                env=env,
                queries=load_queries(spec["queries"]),
                budget=budget or PlannerBudget(),
            )
        if "queries" in spec and "fixture" in spec:
            scenario.queries = load_queries(spec["queries"])
        if spec.get("skeleton"):
            scenario.skeleton = AnnotatedSkeleton.load(spec["skeleton"])
        for key in ("resolution", "grid_resolution", "safety_factor"):
            if key in spec:
                setattr(scenario, key, spec[key])
        scenario.validate()
    except ScenarioLoadError:
        raise
    except (OSError, KeyError, ValueError, TypeError) as exc:
        raise ScenarioLoadError(f"failed to load scenario: {exc}") from exc
    return scenario

"""Command-line interface.

``skelplan plan``    -- run one planner on one scenario, write run stats.
``skelplan bench``   -- run a suite config, write results.csv/results.json.
``skelplan fixtures``-- export the bundled environments to files.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .fixtures import FIXTURES, make_fixture
from .harness import (
    Scenario,
    ScenarioLoadError,
    load_queries,
    run_suite,
    run_trial,
    stats_to_rows,
    write_csv,
)
from .geometry import Environment
from .planners import PLANNER_NAMES, PlannerBudget
from .skeleton import AnnotatedSkeleton


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skelplan")
    sub = parser.add_subparsers(dest="command", required=True)

    plan = sub.add_parser("plan", help="solve one scenario with one planner")
    plan.add_argument("--env", required=True, help="environment JSON file or fixture:<name>")
    plan.add_argument("--skeleton", help="pre-built skeleton JSON file")
    plan.add_argument("--planner", required=True, choices=sorted(PLANNER_NAMES))
    plan.add_argument("--seed", type=int, default=0)
    plan.add_argument("--queries", help="queries JSON file (fixtures carry defaults)")
    plan.add_argument("--budget", type=int, default=1000, help="max sampling attempts")
    plan.add_argument("--timeout", type=float, default=60.0, help="per-query seconds")
    plan.add_argument("--epsilon", type=float, default=2.0)
    plan.add_argument("--max-paths", type=int, default=5)
    plan.add_argument("--resolution", type=float, help="collision-check step override")
    plan.add_argument("--out", help="write run stats JSON here")

    bench = sub.add_parser("bench", help="run a benchmark suite config")
    bench.add_argument("--config", required=True)
    bench.add_argument("--out", required=True, help="output directory")

    fixtures = sub.add_parser("fixtures", help="export bundled environments")
    fixtures.add_argument("--out", required=True, help="output directory")
    fixtures.add_argument(
        "--skeletons", action="store_true", help="also build and export skeletons"
    )
    return parser


def _plan_scenario(args) -> Scenario:
    budget = PlannerBudget(
        max_sample_attempts=args.budget,
        epsilon=args.epsilon,
        max_paths=args.max_paths,
        time_limit=args.timeout,
    )
    if args.env.startswith("fixture:"):
        scenario = make_fixture(args.env.split(":", 1)[1], budget=budget)
        if args.queries:
            scenario.queries = load_queries(args.queries)
    else:
        if not args.queries:
            raise ScenarioLoadError("--queries is required with a file environment")
        scenario = Scenario(
            name=Path(args.env).stem,
            env=Environment.load(args.env),
            queries=load_queries(args.queries),
            budget=budget,
        )
    if args.skeleton:
        scenario.skeleton = AnnotatedSkeleton.load(args.skeleton)
    if args.resolution:
        scenario.resolution = args.resolution
    scenario.validate()
    return scenario


def cmd_plan(args) -> int:
    scenario = _plan_scenario(args)
    stats = run_trial(scenario, args.planner, args.seed)
    for row in stats_to_rows(stats):
        solved = row["solved"]
        print(
            f"{row['scenario']} {row['planner']} seed={row['seed']} query={row['query']} "
            f"solved={solved} cost={row['path_cost'] or '-'} "
            f"clearance={row['min_clearance'] or '-'} cd={row['cd_total']}"
        )
    if args.out:
        with open(args.out, "w") as f:
            json.dump(stats.to_dict(), f, indent=2)
    return 0


def cmd_bench(args) -> int:
    rows, aggregate, _ = run_suite(args.config, args.out)
    print(f"wrote {len(rows)} result rows to {args.out}/results.csv")
    for cell in aggregate:
        nodes = cell["nodes"]["mean"]
        edges = cell["edges"]["mean"]
        cd = cell["cd_calls"]["mean"]
        print(
            f"  {cell['scenario']:<10} {cell['planner']:<8} "
            f"cd={cd and round(cd)} nodes={nodes and round(nodes)} "
            f"edges={edges and round(edges)} solved={cell['solved_fraction']:.2f}"
        )
    return 0


def cmd_fixtures(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name in sorted(FIXTURES):
        scenario = make_fixture(name)
        scenario.env.save(out / f"{name}.env.json")
        queries = [
            {"start": list(s.as_tuple()), "goal": list(g.as_tuple())}
            for s, g in scenario.queries
        ]
        with open(out / f"{name}.queries.json", "w") as f:
            json.dump(queries, f, indent=2)
        if args.skeletons:
            scenario.ensure_skeleton().save(out / f"{name}.skeleton.json")
        print(f"wrote {name} environment and queries to {out}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "plan":
            return cmd_plan(args)
        if args.command == "bench":
            return cmd_bench(args)
        if args.command == "fixtures":
            return cmd_fixtures(args)
    except (ScenarioLoadError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface.

Commands: ``radius``, ``median``, ``approx``, ``oracle``,
``reduce-setcover``, ``witness``, ``eval``. Reports are JSON on stdout (or
``--output``); per-root value curves can be emitted as CSV for plotting.
Exit status 0 on success, 1 with a machine-readable error JSON on invalid
input, 2 on an internal failure.

Solvers always run with a normalized budget; ``--budget`` rescales the
reported objectives and absolute per-edge budgets at serialization time.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .core import (
    Allocation,
    AllocationError,
    BudgetGraph,
    GraphError,
    evaluate_median,
    evaluate_radius,
    load_allocation,
    load_graph,
    root_tree,
    weighted_distances,
)
from .hardness import (
    ReductionError,
    SetCoverInstance,
    cover_to_allocation,
    load_cover,
    reduce_setcover,
)
from .median import solve_all_roots_median, solve_rooted_median, solve_unrooted_median
from .metric import MetricError, MetricSpace, approx_metric_radius
from .oracle import (
    EnumerationCapError,
    OracleConfig,
    exact_small_graph_radius,
    numeric_optimize_median,
    numeric_optimize_radius,
)
from .radius import solve_all_roots_radius, solve_rooted_radius

_INPUT_ERRORS = (
    GraphError,
    AllocationError,
    MetricError,
    ReductionError,
    EnumerationCapError,
    FileNotFoundError,
    IsADirectoryError,
)


class CLIError(ValueError):
    """Bad command line or unusable input file."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CLIError(message)


def _read(path: str) -> str:
    return Path(path).read_text()


def _load_tree(args) -> tuple[BudgetGraph, int]:
    graph = load_graph(_read(args.input))
    if args.all_roots:
        return graph, 0
    if args.root is None:
        raise CLIError("--root is required unless --all-roots is given")
    return graph, graph.vertex(args.root)


def _cmd_radius(args):
    graph, root = _load_tree(args)
    if args.all_roots:
        result = solve_all_roots_radius(root_tree(graph, root))
        if args.csv:
            lines = [
                f"{graph.labels[v]},{result.values[v] / args.budget!r}"
                for v in range(graph.n)
            ]
            return "\n".join(lines) + "\n"
        return {
            "kind": "radius",
            "budget": args.budget,
            "values": {
                graph.labels[v]: result.values[v] / args.budget for v in range(graph.n)
            },
            "best_root": graph.labels[result.best_root],
            "best": result.best.to_json_obj(graph, args.budget),
        }
    report = solve_rooted_radius(root_tree(graph, root))
    return report.to_json_obj(graph, args.budget)


def _cmd_median(args):
    graph = load_graph(_read(args.input))
    if args.unrooted:
        report = solve_unrooted_median(root_tree(graph, 0))
        return report.to_json_obj(graph, args.budget)
    if args.all_roots:
        values = solve_all_roots_median(root_tree(graph, 0))
        if args.csv:
            lines = [
                f"{graph.labels[v]},{values[v] / args.budget!r},"
                f"{values[v] / args.budget!r},{values[v] / args.budget / graph.n!r}"
                for v in range(graph.n)
            ]
            return "\n".join(lines) + "\n"
        return {
            "kind": "median",
            "budget": args.budget,
            "values": {
                graph.labels[v]: values[v] / args.budget for v in range(graph.n)
            },
        }
    if args.root is None:
        raise CLIError("--root is required unless --all-roots or --unrooted is given")
    report = solve_rooted_median(root_tree(graph, graph.vertex(args.root)))
    return report.to_json_obj(graph, args.budget)


def _parse_csv_rows(text: str) -> list[list[float]]:
    rows = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        try:
            rows.append([float(x) for x in parts])
        except ValueError:
            raise CLIError(f"bad numeric row: {line!r}") from None
    if not rows:
        raise CLIError("empty point/matrix file")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise CLIError("rows have inconsistent width")
    return rows


def _cmd_approx(args):
    if (args.points is None) == (args.matrix is None):
        raise CLIError("give exactly one of --points or --matrix")
    if args.points is not None:
        metric = MetricSpace.from_points(_parse_csv_rows(_read(args.points)))
    else:
        metric = MetricSpace.from_matrix(
            _parse_csv_rows(_read(args.matrix)),
            validate_triangle=not args.skip_triangle_check,
        )
    report = approx_metric_radius(metric)
    obj = report.to_json_obj()
    obj["allocation"] = report.allocation.to_json_obj(report.graph)
    return obj


def _cmd_oracle(args):
    graph = load_graph(_read(args.input))
    root = graph.vertex(args.root)
    if args.exact_enum:
        if args.objective != "radius":
            raise CLIError("--exact-enum only supports the radius objective")
        report = exact_small_graph_radius(graph, root, cap=args.enum_cap)
        return report.to_json_obj(graph, args.budget)
    cfg = OracleConfig(
        max_iters=args.max_iters,
        restarts=args.restarts,
        seed=args.seed,
        tol=args.tol,
    )
    solve = numeric_optimize_radius if args.objective == "radius" else numeric_optimize_median
    report = solve(graph, root, cfg)
    return report.to_json_obj(graph, args.budget)


def _cmd_reduce_setcover(args):
    instance = SetCoverInstance.from_json(_read(args.input))
    red = reduce_setcover(instance)
    return {
        "instance": instance.to_json_obj(),
        "graph": red.graph.to_json_obj(),
        "root": red.graph.labels[red.root],
        "roles": red.node_roles,
        "constants": red.constants,
        "nodes": red.graph.n,
        "edges": red.graph.m,
    }


def _cmd_witness(args):
    instance = SetCoverInstance.from_json(_read(args.input))
    red = reduce_setcover(instance)
    cover = load_cover(_read(args.cover))
    alloc, cost = cover_to_allocation(red, cover)
    radius = evaluate_radius(red.graph, alloc, red.root)
    return {
        "budget_cost": cost,
        "radius_at_cost": radius,
        "allocation": alloc.to_json_obj(red.graph),
    }


def _cmd_eval(args):
    graph = load_graph(_read(args.input))
    root = graph.vertex(args.root)
    fractions, budget = load_allocation(_read(args.allocation))
    alloc = Allocation.from_mapping(graph, fractions, budget)
    dist = weighted_distances(graph, alloc, root)
    radius = evaluate_radius(graph, alloc, root)
    msum, mavg = evaluate_median(graph, alloc, root)
    return {
        "root": args.root,
        "budget": budget,
        "radius": radius,
        "median_sum": msum,
        "median_average": mavg,
        "distances": {graph.labels[v]: dist[v] for v in range(graph.n)},
    }


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="budgetgraph", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", required=True, help="graph file (edge list or JSON)")
        p.add_argument("--budget", type=float, default=1.0)
        p.add_argument("--tol", type=float, default=1e-9)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--output", help="write the report here instead of stdout")

    p = sub.add_parser("radius", help="exact budget radius on a tree")
    common(p)
    p.add_argument("--root")
    p.add_argument("--all-roots", action="store_true")
    p.add_argument("--csv", action="store_true", help="emit 'vertex,value' rows")
    p.set_defaults(func=_cmd_radius)

    p = sub.add_parser("median", help="exact budget median on a tree")
    common(p)
    p.add_argument("--root")
    p.add_argument("--all-roots", action="store_true")
    p.add_argument("--unrooted", action="store_true")
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=_cmd_median)

    p = sub.add_parser("approx", help="metric-space approximation pipeline")
    common(p, needs_input=False)
    p.add_argument("--points", help="CSV of point coordinates (Euclidean metric)")
    p.add_argument("--matrix", help="CSV distance matrix")
    p.add_argument("--skip-triangle-check", action="store_true")
    p.set_defaults(func=_cmd_approx)

    p = sub.add_parser("oracle", help="numerical / enumeration reference solvers")
    p.add_argument("objective", choices=["radius", "median"])
    common(p)
    p.add_argument("--root", required=True)
    p.add_argument("--exact-enum", action="store_true", help="spanning-tree enumeration")
    p.add_argument("--max-iters", type=int, default=OracleConfig.max_iters)
    p.add_argument("--restarts", type=int, default=OracleConfig.restarts)
    p.add_argument("--enum-cap", type=int, default=OracleConfig.enum_cap)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("reduce-setcover", help="build a hardness-reduction instance")
    common(p)
    p.set_defaults(func=_cmd_reduce_setcover)

    p = sub.add_parser("witness", help="cover-to-allocation witness for a reduction")
    common(p)
    p.add_argument("--cover", required=True, help="cover JSON file")
    p.set_defaults(func=_cmd_witness)

    p = sub.add_parser("eval", help="evaluate an explicit allocation")
    common(p)
    p.add_argument("--allocation", required=True)
    p.add_argument("--root", required=True)
    p.set_defaults(func=_cmd_eval)
    return parser


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        result = args.func(args)
    except (CLIError, *_INPUT_ERRORS) as exc:
        payload = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        _emit(json.dumps(payload, indent=2) + "\n", None)
        return 1
    except Exception as exc:  # internal invariant violation
        payload = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        _emit(json.dumps(payload, indent=2) + "\n", None)
        return 2
    if isinstance(result, str):
        _emit(result, args.output)
    else:
        _emit(json.dumps(result, indent=2) + "\n", args.output)
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: distances, geodesics, probes, experiments and the acceptance battery."""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Any, Callable, Sequence

import numpy as np

from finsler_lab import __version__
from finsler_lab.convex_bodies import ConvexBody, load_body, sample_interior
from finsler_lab.errors import FinslerLabError
from finsler_lab.experiments import (
    ExperimentReport,
    reports_frame,
    run_battery,
    run_busemann_check,
    run_chord_identity_check,
    run_closed_form_check,
    run_example_1,
    run_example_2,
    run_example_3,
    run_example_4,
    run_main_theorem_check,
    run_remark_counterexample,
    run_symmetry_check,
    run_theorem_max_check,
    run_theorem_sum_check,
    run_triangle_check,
)
from finsler_lab.finsler import GeodesicOptions, Lagrangian, approach_sequence, induced_distance
from finsler_lab.funk_hilbert import (
    funk_distance,
    funk_family_value,
    funk_lagrangian,
    funk_metric,
    hilbert_distance,
    hilbert_lagrangian,
    hilbert_metric,
    weighted_funk_lagrangian,
    weighted_funk_max_lagrangian,
    weighted_funk_metric,
)
from finsler_lab.triangle_space import asymmetry_witness, eta, eta_scaling_residual, family_profile
from finsler_lab.utils.export import export_to_json, write_output
from finsler_lab.weak_metrics import WeakMetric, busemann_probe, triangle_inequality_probe

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


class _UsageError(Exception):
    """Raised by the parser instead of exiting, so that main() owns the exit code."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _point(text: str) -> np.ndarray:
    try:
        values = [float(tok) for tok in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid point {text!r}; expected comma-separated numbers") from exc
    if not all(np.isfinite(values)):
        raise argparse.ArgumentTypeError(f"point {text!r} has non-finite coordinates")
    return np.array(values)


def _weight(text: str) -> float:
    try:
        t = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid weight {text!r}") from exc
    if not 0.0 <= t <= 1.0:
        raise argparse.ArgumentTypeError(f"weight {t} must lie in [0, 1]")
    return t


def _bounded(kind: Callable[[str], Any], low: float, name: str) -> Callable[[str], Any]:
    def parse(text: str):
        try:
            value = kind(text)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"invalid {name} {text!r}") from exc
        if not value >= low:
            raise argparse.ArgumentTypeError(f"{name} must be at least {low}, got {value}")
        return value

    return parse


def _positive_float(name: str) -> Callable[[str], float]:
    def parse(text: str) -> float:
        try:
            value = float(text)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"invalid {name} {text!r}") from exc
        if not (np.isfinite(value) and value > 0):
            raise argparse.ArgumentTypeError(f"{name} must be positive, got {text}")
        return value

    return parse


def _add_solver_flags(parser: argparse.ArgumentParser) -> None:
    defaults = GeodesicOptions()
    parser.add_argument("--nodes", type=_bounded(int, 2, "node count"), default=defaults.nodes)
    parser.add_argument("--tol", type=_positive_float("tolerance"), default=defaults.tolerance)
    parser.add_argument("--seed", type=_bounded(int, 0, "seed"), default=defaults.seed)
    parser.add_argument("--multistart", type=_bounded(int, 1, "multistart"), default=defaults.multistart)
    parser.add_argument("--order", type=_bounded(int, 1, "quadrature order"), default=defaults.quadrature_order)


def _options(args: argparse.Namespace) -> GeodesicOptions:
    return GeodesicOptions(
        nodes=args.nodes,
        initial_nodes=min(GeodesicOptions.initial_nodes, args.nodes),
        quadrature_order=args.order,
        tolerance=args.tol,
        multistart=args.multistart,
        seed=args.seed,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="finsler-lab", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG logging")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    dist = sub.add_parser("dist", help="closed-form Funk-type distance between two points")
    dist.add_argument("--body", required=True)
    dist.add_argument("--metric", choices=["funk", "hilbert", "arith", "max", "reverse"], default="funk")
    dist.add_argument("--from", dest="x", type=_point, required=True)
    dist.add_argument("--to", dest="y", type=_point, required=True)
    dist.add_argument("--t", type=_weight, default=0.5)

    geo = sub.add_parser("geodesic", help="induced distance of a Funk-type Lagrangian by path optimization")
    geo.add_argument("--body", required=True)
    geo.add_argument("--lagrangian", choices=["funk", "hilbert", "arith", "max"], default="funk")
    geo.add_argument("--from", dest="x", type=_point, required=True)
    geo.add_argument("--to", dest="y", type=_point, required=True)
    geo.add_argument("--t", type=_weight, default=0.5)
    geo.add_argument("--path-csv", help="write the optimized path, one node per row")
    _add_solver_flags(geo)

    probe = sub.add_parser("probe", help="sampling probe of a metric axiom")
    probe.add_argument("--body", required=True)
    probe.add_argument("--kind", choices=["triangle", "busemann"], default="triangle")
    probe.add_argument("--metric", choices=["funk", "hilbert", "arith", "max"], default="funk")
    probe.add_argument("--t", type=_weight, default=0.5)
    probe.add_argument("--count", type=_bounded(int, 1, "count"), default=1000)
    probe.add_argument("--length", type=_bounded(int, 4, "sequence length"), default=200)
    probe.add_argument("--at", type=_point, help="target point of the Busemann probe")
    probe.add_argument("--seed", type=_bounded(int, 0, "seed"), default=0)

    example = sub.add_parser("example", help="run one named experiment")
    example.add_argument("--name", choices=sorted(EXPERIMENTS), required=True)
    example.add_argument("--y1", type=float, default=0.5)
    example.add_argument("--y2", type=float, default=2.0)
    example.add_argument("--a", type=_positive_float("a"), default=4.0)
    example.add_argument("--b", type=_positive_float("b"), default=9.0)
    example.add_argument("--t", type=_weight, default=0.5)
    example.add_argument("--pairs", type=_bounded(int, 1, "pair count"), default=20)
    _add_solver_flags(example)

    tri = sub.add_parser("triangle", help="triangle-space metric computations")
    tri.add_argument("--action", choices=["eta", "witness", "scaling", "profile"], default="eta")
    tri.add_argument("--X", type=_point, default=None)
    tri.add_argument("--Y", type=_point, default=None)
    tri.add_argument("--t", type=_weight, default=0.0)
    tri.add_argument("--kind", choices=["arith", "max"], default="arith")
    tri.add_argument("--count", type=_bounded(int, 1, "count"), default=10_000)
    tri.add_argument("--seed", type=_bounded(int, 0, "seed"), default=0)
    tri.add_argument("--lam", type=_positive_float("lam"), default=1.0)
    tri.add_argument("--lam-prime", type=_positive_float("lam-prime"), default=1.0)

    report = sub.add_parser("report", help="run the full experiment battery and write a summary")
    report.add_argument("--full", action="store_true", help="full-size pair counts and multistarts")
    report.add_argument("--seed", type=_bounded(int, 0, "seed"), default=0)
    for command in (dist, geo, probe, example, tri, report):
        command.add_argument("--out", help="write the result to this file (.json, .csv or .parquet)")
    return parser


def _metric(body: ConvexBody, name: str, t: float) -> WeakMetric:
    if name == "funk":
        return funk_metric(body)
    if name == "hilbert":
        return hilbert_metric(body)
    return weighted_funk_metric(body, t, name)


def _lagrangian(body: ConvexBody, name: str, t: float) -> Lagrangian:
    if name == "funk":
        return funk_lagrangian(body)
    if name == "hilbert":
        return hilbert_lagrangian(body)
    if name == "arith":
        return weighted_funk_lagrangian(body, t)
    return weighted_funk_max_lagrangian(body, t)


def _cmd_dist(args) -> tuple[dict, int]:
    body = load_body(args.body)
    if args.metric == "funk":
        value = funk_distance(body, args.x, args.y)
    elif args.metric == "reverse":
        value = funk_distance(body, args.y, args.x)
    elif args.metric == "hilbert":
        value = hilbert_distance(body, args.x, args.y)
    else:
        value = funk_family_value(body, args.t, args.metric, args.x, args.y)
    return {"value": value}, EXIT_OK


def _cmd_geodesic(args) -> tuple[dict, int]:
    body = load_body(args.body)
    result = induced_distance(_lagrangian(body, args.lagrangian, args.t), args.x, args.y, _options(args))
    if args.path_csv:
        write_output(args.path_csv, None, result.path.to_frame())
    return result.to_dict(), EXIT_OK


def _cmd_probe(args) -> tuple[dict, int]:
    body = load_body(args.body)
    d = _metric(body, args.metric, args.t)
    if args.kind == "triangle":

        def sampler(rng, size):
            return sample_interior(body, rng, size)

        report = triangle_inequality_probe(d, sampler, args.count, args.seed)
    else:
        rng = np.random.default_rng(args.seed)
        x = args.at if args.at is not None else body.interior_point()
        x = body.require_interior(x, name="--at")
        direction = rng.normal(size=body.dim)
        direction /= np.linalg.norm(direction)
        reach = body.ray_exit(x, direction)
        scale = 0.5 * reach if np.isfinite(reach) else 1.0
        report = busemann_probe(d, x, approach_sequence(x, direction, args.length, scale=scale))
    return report.to_dict(), EXIT_OK if report.passed else EXIT_FAILED


EXPERIMENTS: dict[str, Callable[[argparse.Namespace, GeodesicOptions], ExperimentReport]] = {
    "ex1": lambda a, o: run_example_1(a.y1, a.y2, o),
    "ex2": lambda a, o: run_example_2(opts=o),
    "ex3": lambda a, o: run_example_3(a.a, a.b, count=a.pairs, seed=a.seed, opts=o),
    "ex4": lambda a, o: run_example_4(a.a, a.b, count=a.pairs, seed=a.seed, opts=o),
    "remark": lambda a, o: run_remark_counterexample(),
    "sum": lambda a, o: run_theorem_sum_check(t=a.t, opts=o),
    "max": lambda a, o: run_theorem_max_check(t=a.t, opts=o),
    "main": lambda a, o: run_main_theorem_check(pairs=a.pairs, seed=a.seed, opts=o),
    "chord": lambda a, o: run_chord_identity_check(seed=a.seed),
    "closed": lambda a, o: run_closed_form_check(seed=a.seed),
    "busemann": lambda a, o: run_busemann_check(seed=a.seed),
    "triangle": lambda a, o: run_triangle_check(seed=a.seed),
    "symmetry": lambda a, o: run_symmetry_check(seed=a.seed),
}


def _cmd_example(args) -> tuple[dict, int]:
    report = EXPERIMENTS[args.name](args, _options(args))
    return report.to_dict(), EXIT_OK if report.passed else EXIT_FAILED


def _cmd_triangle(args) -> tuple[dict, int]:
    if args.action == "witness":
        witness = asymmetry_witness(args.t, args.kind, args.count, args.seed)
        return {"t": args.t, "kind": args.kind, "witness": witness}, EXIT_OK
    if args.action == "profile":
        frame = family_profile(args.kind, [0.0, 0.25, 0.5, 0.75, 1.0], min(args.count, 2000), args.seed)
        return {"profile": frame.to_dict(orient="records")}, EXIT_OK
    if args.X is None or args.Y is None:
        raise FinslerLabError(f"--X and --Y are required for --action {args.action}")
    if args.action == "eta":
        return {"value": eta(args.X, args.Y)}, EXIT_OK
    residual = eta_scaling_residual(args.X, args.Y, args.lam, args.lam_prime)
    return {"residual": residual}, EXIT_OK if residual <= 1e-12 else EXIT_FAILED


def _cmd_report(args, out: str | None) -> int:
    reports = run_battery(quick=not args.full, seed=args.seed)
    frame = reports_frame(reports)
    if out:
        write_output(out, [r.to_dict() for r in reports], frame)
    else:
        sys.stdout.write(frame.drop(columns=["runtime"]).to_csv(index=False))
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED


COMMANDS = {
    "dist": _cmd_dist,
    "geodesic": _cmd_geodesic,
    "probe": _cmd_probe,
    "example": _cmd_example,
    "triangle": _cmd_triangle,
}


def main(argv: Sequence[str] | None = None) -> int:
    """
    Run one subcommand.

    Returns:
        0 on success, 1 when a check or assertion fails, 2 on usage or input errors
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE

    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)]
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")

    try:
        if args.command == "report":
            return _cmd_report(args, args.out)
        payload, code = COMMANDS[args.command](args)
        if args.out:
            write_output(args.out, payload)
        else:
            sys.stdout.write(export_to_json(payload).decode("utf-8"))
        return code
    except (FinslerLabError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE

"""Command-line driver: python -m curverad.main <command> [flags]."""
import argparse
import logging
import sys
from dataclasses import asdict
from typing import Callable, Dict, List, Optional

from curverad.config import COMMANDS, COMMON_PARAMETERS, resolve_log_level, resolve_threads
from curverad.errors import EXIT_FAILURE, EXIT_OK, CurveRadError, exit_code_for
from curverad.services.output_service import OutputService, RunManifest
from curverad.services.sweep_service import ELLIPSE_COLUMNS, INTERSECTION_COLUMNS, SweepService
from curverad.tools.closed_forms import n_circle, n_ellipse_axes
from curverad.tools.curve_spec import load_curve, load_ops
from curverad.tools.geometry import CurveKind, check_simple, closest_self_approach, diameter
from curverad.tools.invariance import check_composite_invariance
from curverad.tools.quadrature import QuadratureConfig, convergence_order, integrate_n

logger = logging.getLogger(__name__)

ARG_TYPES = {"integer": int, "number": float, "string": str}


def build_parser() -> argparse.ArgumentParser:
    """Sub-commands and flags from the COMMANDS registry."""
    parser = argparse.ArgumentParser(prog="curverad", description="Photon-number integral of closed curves")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="-v for progress, -vv for debug output (stderr)")
    subparsers = parser.add_subparsers(dest="command", required=True)

    for declaration in COMMANDS["command_declarations"]:
        sub = subparsers.add_parser(declaration["name"], help=declaration["description"],
                                    description=declaration["description"])
        properties = dict(declaration["parameters"]["properties"])
        if declaration.get("quadrature"):
            properties.update(COMMON_PARAMETERS)
        required = set(declaration["parameters"]["required"])
        for name, prop in properties.items():
            sub.add_argument(
                f"--{name.replace('_', '-')}",
                dest=name,
                type=ARG_TYPES[prop["type"]],
                default=prop.get("default"),
                required=name in required,
                help=prop["description"],
            )
    return parser


def quadrature_config(args: argparse.Namespace) -> QuadratureConfig:
    return QuadratureConfig(
        initial_grid=args.grid,
        max_grid=args.max_grid,
        rel_tol=args.tol,
        threads=resolve_threads(args.threads),
    )


def cmd_compute(args: argparse.Namespace) -> int:
    curve, spec = load_curve(args.curve)
    config = quadrature_config(args)
    manifest = RunManifest("compute", spec, asdict(config))
    result = integrate_n(curve, config)

    closed_form = None
    if curve.kind is CurveKind.CIRCLE:
        closed_form = n_circle()
    elif curve.kind is CurveKind.ELLIPSE:
        closed_form = n_ellipse_axes(curve.params["a"], curve.params["b"])
    deviation = abs(result.value - closed_form) / closed_form if closed_form is not None else None

    payload = {
        "n": result.value,
        "grid": result.grid,
        "error_estimate": result.error_estimate,
        "converged": result.converged,
        "history": result.to_dict()["history"],
        "convergence": convergence_order(result.history).kind,
        "closed_form": closed_form,
        "deviation": deviation,
    }
    OutputService.emit(OutputService.to_json(manifest.finish(payload)), args.output)
    return EXIT_OK


def cmd_sweep_ellipse(args: argparse.Namespace) -> int:
    config = quadrature_config(args)
    manifest = RunManifest(
        "sweep-ellipse", None, {**asdict(config), "xi_min": args.xi_min, "xi_max": args.xi_max, "steps": args.steps}
    )
    rows = SweepService.ellipse_sweep(args.xi_min, args.xi_max, args.steps, config)
    summary = {
        "rows": len(rows),
        "max_rel_err": max(row.rel_err for row in rows),
        "all_converged": all(row.converged for row in rows),
    }
    text = OutputService.to_csv(manifest.finish(summary), ELLIPSE_COLUMNS, [row.as_tuple() for row in rows])
    OutputService.emit(text, args.output)
    return EXIT_OK


def cmd_invariance(args: argparse.Namespace) -> int:
    curve, spec = load_curve(args.curve)
    ops = load_ops(args.transform)
    config = quadrature_config(args)
    manifest = RunManifest(
        "invariance", spec, {**asdict(config), "transform": args.transform, "pass_tol": args.pass_tol}
    )
    report = check_composite_invariance(curve, ops, args.pass_tol, config)
    OutputService.emit(OutputService.to_json(manifest.finish(report.to_dict())), args.output)
    if not report.passed:
        logger.warning(f"invariance check failed: rel dev {report.rel_dev:.3e} > {report.tolerance:g}")
        return EXIT_FAILURE
    return EXIT_OK


def cmd_intersection(args: argparse.Namespace) -> int:
    manifest = RunManifest(
        "intersection",
        None,
        {"phi": args.phi, "mu_min": args.mu_min, "mu_max": args.mu_max, "steps": args.steps},
    )
    result = SweepService.intersection_sweep(args.phi, args.mu_min, args.mu_max, args.steps)
    summary = result.fit.to_dict() if result.fit else {"model": result.rows[0].model, "coefficient_fit": None}
    text = OutputService.to_csv(manifest.finish(summary), INTERSECTION_COLUMNS, SweepService.intersection_rows(result))
    OutputService.emit(text, args.output)
    return EXIT_OK


def cmd_check_simple(args: argparse.Namespace) -> int:
    curve, spec = load_curve(args.curve)
    manifest = RunManifest("check-simple", spec, {"samples": args.samples, "threshold": args.threshold})
    ratio = check_simple(curve, args.samples)
    width = diameter(curve)
    normalized = ratio / width
    chord, t1, t2 = closest_self_approach(curve, args.samples)
    simple = normalized >= args.threshold and chord >= args.threshold * width
    payload = {
        "ratio": ratio,
        "diameter": width,
        "normalized": normalized,
        "min_chord": chord,
        "min_chord_at": [t1, t2],
        "simple": simple,
    }
    OutputService.emit(OutputService.to_json(manifest.finish(payload)), args.output)
    return EXIT_OK if simple else EXIT_FAILURE


HANDLERS: Dict[str, Callable[[argparse.Namespace], int]] = {
    "compute": cmd_compute,
    "sweep-ellipse": cmd_sweep_ellipse,
    "invariance": cmd_invariance,
    "intersection": cmd_intersection,
    "check-simple": cmd_check_simple,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        logging.basicConfig(
            level=resolve_log_level(args.verbose),
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
            stream=sys.stderr,
        )
        return HANDLERS[args.command](args)
    except CurveRadError as e:
        print(f"error: {e}", file=sys.stderr)
        return exit_code_for(e)
    except Exception as e:
        logger.exception(f"internal failure in {args.command}: {e}")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())

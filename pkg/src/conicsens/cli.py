"""Command-line front end.

Usage examples::

    conicsens solve fixtures/example_5_1.json
    conicsens analyze-obj fixtures/example_6_1.json --direction "[0,-1]" --t-grid 0.5,0.1

Exit codes: 0 success, 2 hypothesis violation, 3 schema or input error,
4 numerical failure.
"""
import argparse
import json
import os
import sys

import numpy as np

from . import sensitivity as sens
from .errors import (ConicSensError, DimensionError, EmptyInterior,
                     HypothesisViolation, NumericalFailure, SchemaError)
from .problem import Perturbation, load_problem
from .solver import DEFAULT_SETTINGS, certify_strict_dual, certify_strict_primal, solve_any
from .solver.api import with_settings

EXIT_OK = 0
EXIT_HYPOTHESIS = 2
EXIT_SCHEMA = 3
EXIT_NUMERICAL = 4

DEFAULT_VERIFY_GRID = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5)


def _floats(text):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from exc
    if not vals:
        raise argparse.ArgumentTypeError("empty number list")
    return vals


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("problem", help="problem JSON file")
    common.add_argument("--tol-feas", type=float, default=None)
    common.add_argument("--tol-gap", type=float, default=None)
    common.add_argument("--eps-level", type=float, default=None,
                        help="relative slack of level-set constraints")
    common.add_argument("--seed", type=int, default=sens.DEFAULT_SEED)
    common.add_argument("--format", choices=("json", "text"), default="json")

    directed = argparse.ArgumentParser(add_help=False)
    directed.add_argument("--direction", required=True,
                          help="JSON array literal or path to a JSON file holding one")
    directed.add_argument("--t-grid", type=_floats, default=None,
                          help="comma separated, strictly decreasing positive steps")

    parser = argparse.ArgumentParser(prog="conicsens",
                                     description="Conic program sensitivity analysis")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="solve and classify the program")
    sub.add_parser("certify", parents=[common], help="strict feasibility certificates")
    sub.add_parser("analyze-rhs", parents=[common, directed],
                   help="sensitivity of the value to b + t d")
    sub.add_parser("analyze-obj", parents=[common, directed],
                   help="sensitivity of the value to c + t h")
    verify = sub.add_parser("verify", parents=[common, directed],
                            help="difference quotients against the derivative")
    verify.add_argument("--kind", choices=("rhs", "obj"), default="rhs")
    probe = sub.add_parser("probe", parents=[common], help="Lipschitz and boundedness probes")
    probe.add_argument("--radius", type=float, default=0.1)
    probe.add_argument("--samples", type=int, default=50)
    return parser


def parse_direction(text):
    """Inline JSON array, or a path to a file containing one."""
    src = text
    if not text.lstrip().startswith("["):
        if not os.path.exists(text):
            raise SchemaError(f"direction is neither a JSON array nor a file: {text!r}",
                              field="direction")
        with open(text, encoding="utf-8") as fh:
            src = fh.read()
    try:
        vec = json.loads(src)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid direction: {exc.msg}", field="direction",
                          line=exc.lineno) from exc
    if not isinstance(vec, list) or any(isinstance(v, bool) or not isinstance(v, (int, float))
                                        for v in vec):
        raise SchemaError("direction must be a list of numbers", field="direction")
    return np.array(vec, dtype=float)


def _settings(args):
    return with_settings(DEFAULT_SETTINGS, tol_feas=args.tol_feas, tol_gap=args.tol_gap,
                         eps_level=args.eps_level)


def _cmd_solve(P, args, settings):
    return solve_any(P, settings).to_dict()


def _cmd_certify(P, args, settings):
    out = {}
    for name, fn in (("primal", certify_strict_primal), ("dual", certify_strict_dual)):
        try:
            out[name] = fn(P, settings).to_dict()
        except EmptyInterior as exc:
            out[name] = {"error": "empty_interior", "detail": str(exc)}
    return out


def _grid(args, default=()):
    return tuple(args.t_grid) if args.t_grid else tuple(default)


def _cmd_analyze_rhs(P, args, settings):
    d = parse_direction(args.direction)
    return sens.analyze_rhs(P, d, _grid(args), settings).to_dict()


def _cmd_analyze_obj(P, args, settings):
    h = parse_direction(args.direction)
    return sens.analyze_obj(P, h, _grid(args), settings).to_dict()


def _cmd_verify(P, args, settings):
    v = parse_direction(args.direction)
    grid = _grid(args, DEFAULT_VERIFY_GRID)
    fd_settings = with_settings(sens.FD_SETTINGS, eps_level=args.eps_level)
    if args.kind == "rhs":
        deriv = sens.phi_dir_deriv(P, v, settings)
        table = sens.fd_verify(P, Perturbation.rhs(v), grid, fd_settings)
    else:
        deriv = sens.psi_dir_deriv(P, v, settings)
        table = sens.fd_verify(P, Perturbation.obj(v), grid, fd_settings)
    return {"kind": args.kind, "derivative": deriv.to_json(), "fd_table": table.to_list(),
            "monotone": table.monotone(), "pass": sens.fd_check(table, deriv)}


def _cmd_probe(P, args, settings):
    lip = sens.lipschitz_probe(P, args.radius, args.samples, seed=args.seed, settings=settings)
    bounded = sens.dual_solution_boundedness_probe(P, P.b, settings=settings)
    return {"lipschitz": lip.to_dict(), "dual_solutions_bounded": bounded, "seed": args.seed}


COMMANDS = {
    "solve": _cmd_solve,
    "certify": _cmd_certify,
    "analyze-rhs": _cmd_analyze_rhs,
    "analyze-obj": _cmd_analyze_obj,
    "verify": _cmd_verify,
    "probe": _cmd_probe,
}


def _text(obj, prefix=""):
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, dict):
                lines.append(f"{prefix}{k}:")
                lines.extend(_text(v, prefix + "  "))
            else:
                lines.append(f"{prefix}{k}: {json.dumps(v)}")
    else:
        lines.append(prefix + json.dumps(obj))
    return lines


def emit(obj, fmt, stream):
    if fmt == "json":
        stream.write(json.dumps(obj, indent=2, allow_nan=False) + "\n")
    else:
        stream.write("\n".join(_text(obj)) + "\n")


def run(argv=None, stdout=None, stderr=None):
    """Execute one command; returns the process exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        P = load_problem(args.problem)
        if getattr(args, "t_grid", None) is not None:
            sens._schedule(args.t_grid)
        result = COMMANDS[args.command](P, args, _settings(args))
    except HypothesisViolation as exc:
        emit({"error": "hypothesis_violation", "hypothesis": exc.hypothesis,
              "detail": exc.detail}, args.format, stdout)
        stderr.write(f"conicsens: {exc}\n")
        return EXIT_HYPOTHESIS
    except EmptyInterior as exc:
        emit({"error": "hypothesis_violation", "hypothesis": sens.PRIMAL_STRICT,
              "detail": str(exc)}, args.format, stdout)
        stderr.write(f"conicsens: {exc}\n")
        return EXIT_HYPOTHESIS
    except (SchemaError, DimensionError, OSError, ValueError) as exc:
        stderr.write(f"conicsens: input error: {exc}\n")
        return EXIT_SCHEMA
    except NumericalFailure as exc:
        stderr.write(f"conicsens: numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    except ConicSensError as exc:
        stderr.write(f"conicsens: {type(exc).__name__}: {exc}\n")
        return EXIT_NUMERICAL
    emit(result, args.format, stdout)
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()


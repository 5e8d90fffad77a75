"""``jetgeo`` command line.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration
error, 3 numerical error during evaluation or integration.

Vector flags take comma-separated numbers; a vector starting with a minus
sign needs the ``--at=-1,2`` form so argparse does not read it as a flag.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import dynamics as D
from . import geometry as G
from . import lorenz5 as L
from .field import (
    EvaluationError,
    FieldParseError,
    UnboundParameterError,
    VectorField,
    load_field,
)
from .verify import run_suites

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _vector(text: str) -> np.ndarray:
    try:
        return np.array([float(p) for p in text.split(",")], dtype=float)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _param(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep or not name.strip():
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    try:
        return name.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"parameter {name!r}: {value!r} is not a number")


def _field_options(p: argparse.ArgumentParser, required: bool = True):
    src = p.add_mutually_exclusive_group(required=required)
    src.add_argument("--model", choices=["lorenz5"], help="built-in model")
    src.add_argument("--field", metavar="PATH", help="field file (X<i> = <expr> per line)")
    p.add_argument("--param", type=_param, action="append", default=[], metavar="NAME=VALUE",
                   help="bind a parameter (repeatable)")


def _out_option(p: argparse.ArgumentParser, formats=("json",)):
    p.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    p.add_argument("--format", choices=formats, default=formats[0])


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="jetgeo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("geometry", help="geometric objects at a point (JSON)")
    _field_options(p)
    p.add_argument("--at", type=_vector, required=True, metavar="X1,...,XN")
    _out_option(p)

    p = sub.add_parser("integrate", help="RK4 trajectory (CSV)")
    _field_options(p)
    p.add_argument("--x0", type=_vector, required=True)
    p.add_argument("--v0", type=_vector)
    p.add_argument("--el", action="store_true", help="integrate the Euler-Lagrange flow")
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--t1", type=float, required=True)
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--observables", action="store_true",
                   help="append eym and jls columns")
    _out_option(p, formats=("csv", "json"))

    p = sub.add_parser("action", help="least-squares action of a trajectory CSV")
    _field_options(p)
    p.add_argument("--traj", required=True, metavar="CSV")
    _out_option(p)

    p = sub.add_parser("levelset", help="classify a Lorenz Yang-Mills level set")
    p.add_argument("--C", type=float, required=True, dest="C")
    p.add_argument("--param", type=_param, action="append", default=[], metavar="eps=VALUE")
    _out_option(p)

    p = sub.add_parser("verify", help="run the invariant suites")
    _field_options(p, required=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--box", type=float, default=5.0,
                   help="random points are drawn from [-box, box]^n")
    p.add_argument("--out", metavar="PATH")
    return parser


def _resolve_field(args) -> VectorField:
    params = dict(args.param)
    if args.model == "lorenz5":
        if "eps" not in params:
            raise UsageError("--model lorenz5 needs --param eps=VALUE")
        extra = set(params) - {"eps"}
        if extra:
            raise UsageError("unknown parameter(s) for lorenz5: " + ", ".join(sorted(extra)))
        return L.lorenz_field(params["eps"])
    try:
        field = load_field(args.field, params)
    except OSError as exc:
        raise UsageError(f"cannot read field file: {exc}")
    if field.unbound:
        raise UsageError("unbound parameter(s): " + ", ".join(sorted(field.unbound))
                         + " (use --param NAME=VALUE)")
    return field


def _check_dim(field: VectorField, vec: np.ndarray | None, flag: str):
    if vec is not None and vec.shape != (field.n,):
        raise UsageError(f"{flag} has {vec.size} entries but the field has dimension {field.n}")


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_geometry(args) -> int:
    field = _resolve_field(args)
    _check_dim(field, args.at, "--at")
    report = G.geometry_report(field, args.at)
    _emit(report.to_json(indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_integrate(args) -> int:
    field = _resolve_field(args)
    _check_dim(field, args.x0, "--x0")
    if args.el and args.v0 is None:
        raise UsageError("--el requires --v0")
    if not args.el and args.v0 is not None:
        raise UsageError("--v0 is only meaningful with --el")
    _check_dim(field, args.v0, "--v0")
    if not args.dt > 0:
        raise UsageError("--dt must be positive")
    if not args.t1 > args.t0:
        raise UsageError("--t1 must exceed --t0")
    if args.el:
        traj = D.integrate_el(field, args.x0, args.v0, args.t0, args.t1, args.dt)
    else:
        traj = D.integrate_field(field, args.x0, args.t0, args.t1, args.dt)
    extra = {}
    if args.observables:
        v = traj.vs if traj.vs is not None else D.finite_difference_velocities(traj)
        extra["eym"] = G.yang_mills_energy(field, traj.xs)
        extra["jls"] = D.jls(field, traj.xs, v)
    if args.format == "csv":
        text = traj.to_csv(extra)
    else:
        doc = {"t": traj.ts.tolist(), "x": traj.xs.tolist()}
        if traj.vs is not None:
            doc["v"] = traj.vs.tolist()
        doc.update({k: np.asarray(v).tolist() for k, v in extra.items()})
        text = json.dumps(doc) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def cmd_action(args) -> int:
    field = _resolve_field(args)
    try:
        with open(args.traj, encoding="utf-8") as fh:
            traj = D.Trajectory.from_csv(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read trajectory: {exc}")
    except ValueError as exc:
        raise UsageError(f"malformed trajectory CSV: {exc}")
    if traj.n != field.n:
        raise UsageError(f"trajectory has {traj.n} coordinates but the field has {field.n}")
    _emit(json.dumps({"action": D.action(field, traj)}) + "\n", args.out)
    return EXIT_OK


def cmd_levelset(args) -> int:
    params = dict(args.param)
    extra = set(params) - {"eps"}
    if extra:
        raise UsageError("unknown parameter(s): " + ", ".join(sorted(extra)))
    eps = params.get("eps")
    if eps is None:
        # the empty case does not depend on eps
        if args.C < 1.0 - L.LINE_TOLERANCE:
            eps = 0.0
        else:
            raise UsageError("--param eps=VALUE is required when C >= 1")
    result = L.classify_level_set(args.C, eps)
    _emit(json.dumps(result.to_dict()) + "\n", args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    lorenz = args.field is None
    if lorenz:
        field = None
        if args.param:
            raise UsageError("the lorenz5 verification sweeps eps itself; drop --param")
    else:
        field = _resolve_field(args)
    results = run_suites(field, seed=args.seed, box=args.box, lorenz=lorenz)
    source = "lorenz5 (eps in 0, 0.1, 1)" if lorenz else args.field
    lines = [f"jetgeo verify: {source}, seed={args.seed}, box={args.box!r}"]
    lines += [r.line() for r in results]
    ok = all(r.passed for r in results)
    lines.append("ALL PASS" if ok else "FAILED: " + ", ".join(r.name for r in results
                                                             if not r.passed))
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if ok else EXIT_VERIFY


COMMANDS = {
    "geometry": cmd_geometry,
    "integrate": cmd_integrate,
    "action": cmd_action,
    "levelset": cmd_levelset,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, FieldParseError, UnboundParameterError) as exc:
        print(f"jetgeo {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (EvaluationError, D.IntegrationError, FloatingPointError, OverflowError) as exc:
        print(f"jetgeo {args.command}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface: ``expander-net {solve,curve,field,verify}``.

Exit codes: 0 success, 1 verification failure, 2 invalid input,
3 solver or shooting failure.  Errors are written to stderr as a JSON
object with keys ``error`` and ``message``.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import io
from .acceptance import check_names, run_checks, worker_count
from .errors import ExpanderError, InvalidConfig, NoConvergence
from .geometry import HalfLine
from .network import NetworkConfig, network_at_time, solve_triple_point, tangent_field
from .core import scale_network_time
from .shooting import curve_through_point, expander_curve

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INVALID = 2
EXIT_SOLVER = 3


class UsageError(Exception):
    pass


def _angle(value: float, radians: bool) -> float:
    return float(value) if radians else math.radians(float(value))


def _emit(text: str, path: str | None) -> None:
    if path in (None, "-"):
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            # reader went away (e.g. piped into head); drop the rest quietly
            sys.stdout = open(os.devnull, "w")
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _fail(kind: str, message: str, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    return code


def _config(args) -> NetworkConfig:
    return NetworkConfig.from_angles([_angle(a, args.radians) for a in args.angles])


def cmd_solve(args) -> int:
    if not args.time > 0:
        raise UsageError(f"time must be positive, got {args.time}")
    config = _config(args)
    net, report = solve_triple_point(config, tol=args.tol, spacing=args.spacing)
    net = network_at_time(net, args.time)
    if args.format == "json":
        text = io.dumps(io.network_to_dict(net, report)) + "\n"
    elif args.format == "csv":
        text = io.curves_to_csv(net.curves)
    else:
        text = io.network_to_svg(net)
    _emit(text, args.output)
    return EXIT_OK


def cmd_curve(args) -> int:
    if not args.time > 0:
        raise UsageError(f"time must be positive, got {args.time}")
    line = HalfLine(_angle(args.angle, args.radians))
    if args.point is not None:
        shot = curve_through_point(np.array(args.point), line, spacing=args.spacing)
        curve, extra = shot.curve, {"tangent_at_point": shot.tangent_at_P.tolist(),
                                    "residual": shot.residual}
    else:
        curve, extra = expander_curve(args.height, line, spacing=args.spacing), {}
    curve = scale_network_time(curve, args.time)
    if args.format == "json":
        text = io.dumps({"time": args.time, "asymptote_theta": line.theta,
                         "family_height": curve.family_height,
                         "vertices": curve.vertices.tolist(), **extra}) + "\n"
    elif args.format == "csv":
        text = io.curves_to_csv([curve])
    else:
        text = io.to_svg([curve], [line.theta], title="expanding curve")
    _emit(text, args.output)
    return EXIT_OK


def cmd_field(args) -> int:
    if args.resolution < 1:
        raise UsageError("grid resolution must be at least 1")
    xmin, xmax, ymin, ymax = args.bounds
    if not (xmin <= xmax and ymin <= ymax):
        raise UsageError("bounds must satisfy xmin <= xmax and ymin <= ymax")
    config = _config(args)
    n = args.resolution
    xs = np.linspace(xmin, xmax, n) if n > 1 else np.array([0.5 * (xmin + xmax)])
    ys = np.linspace(ymin, ymax, n) if n > 1 else np.array([0.5 * (ymin + ymax)])
    pts = [(x, y) for x in xs for y in ys]

    def value(p):
        try:
            return tangent_field(config, p, tol=args.tol)
        except ExpanderError:
            return np.array([np.nan, np.nan])

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        vals = list(pool.map(value, pts))
    failed = sum(1 for v in vals if np.isnan(v[0]))
    _emit(io.field_to_csv(pts, vals), args.output)
    if failed:
        frac = failed / len(pts)
        if frac >= 0.01:
            return _fail("ShootingFailure", f"{failed} of {len(pts)} grid nodes failed",
                         EXIT_SOLVER)
        sys.stderr.write(json.dumps({"warning": f"{failed} of {len(pts)} grid nodes are NaN"})
                         + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    if not args.tighten > 0:
        raise UsageError("tighten factor must be positive")
    results = run_checks(args.only, scale=args.tighten)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    if failed:
        print("failed: " + ", ".join(f"{r.name} ({r.tag})" for r in failed))
        return EXIT_VERIFY_FAILED
    print(f"all {len(results)} checks passed")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="expander-net",
        description="Triple-junction networks that expand homothetically under curve shortening flow.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, angles=True):
        if angles:
            p.add_argument("angles", type=float, nargs=3, metavar="ANGLE",
                           help="directions of the three half-lines (degrees unless --radians)")
        p.add_argument("--radians", action="store_true", help="angles are given in radians")
        p.add_argument("-o", "--output", default=None, help="output file (default stdout)")

    p = sub.add_parser("solve", help="solve for the balanced network")
    common(p)
    p.add_argument("--time", type=float, default=0.5, help="flow time (default 0.5)")
    p.add_argument("--tol", type=float, default=1e-10, help="balance tolerance |T1+T2+T3|")
    p.add_argument("--spacing", type=float, default=2e-3, help="vertex spacing of the curves")
    p.add_argument("--format", choices=("json", "csv", "svg"), default="json")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("curve", help="one expanding curve asymptotic to a half-line")
    common(p, angles=False)
    p.add_argument("angle", type=float, help="direction of the half-line")
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--point", type=float, nargs=2, metavar=("X", "Y"),
                     help="start the curve at this point")
    grp.add_argument("--height", type=float, default=1.0,
                     help="two-ended curve at this distance from the origin (default 1)")
    p.add_argument("--time", type=float, default=0.5)
    p.add_argument("--spacing", type=float, default=2e-3)
    p.add_argument("--format", choices=("json", "csv", "svg"), default="json")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("field", help="tangent-sum field V on a grid, as CSV")
    common(p)
    p.add_argument("--bounds", type=float, nargs=4, default=(-2.0, 2.0, -2.0, 2.0),
                   metavar=("XMIN", "XMAX", "YMIN", "YMAX"))
    p.add_argument("--resolution", type=int, default=21, help="nodes per axis")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_field)

    p = sub.add_parser("verify", help="run the acceptance checks")
    p.add_argument("--only", nargs="+", choices=check_names(), metavar="CHECK",
                   help="run only these checks: " + ", ".join(check_names()))
    p.add_argument("--tighten", type=float, default=1.0,
                   help="divide every tolerance by this factor")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (InvalidConfig, UsageError, ValueError) as exc:
        return _fail(type(exc).__name__, str(exc), EXIT_INVALID)
    except (NoConvergence, ExpanderError) as exc:
        return _fail(type(exc).__name__, str(exc), EXIT_SOLVER)


if __name__ == "__main__":
    sys.exit(main())

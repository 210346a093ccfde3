"""``localmath`` command line tool.

Exit codes: 0 success, 1 a check failed, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import math
import os
import sys
import textwrap

import numpy as np

from . import __version__
from .arithmetic import natural_value_table
from .calculus import (
    AnalyticScalar,
    scaled_derivative,
    scaled_integral_with_error,
    transported_difference_quotient,
)
from .config import ConfigError, load_field, load_gauge, load_path, load_spinor, load_theta
from .expr import ParseError
from .field import check_local_restriction, resolve_threads
from .gauge import gauge_check, lagrangian_on_grid
from .paths import PathDomainError, path_length, solve_geodesic

log = logging.getLogger("localmath")


class UsageError(Exception):
    pass


def _fmt(x: float) -> str:
    return repr(float(x))


def _vector(text: str, name: str) -> np.ndarray:
    try:
        v = np.array([float(t) for t in text.replace(" ", "").split(",")])
    except ValueError:
        raise UsageError(f"{name}: expected 4 comma separated numbers, got {text!r}")
    if v.shape != (4,):
        raise UsageError(f"{name}: expected 4 comma separated numbers, got {text!r}")
    return v


def _writer(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", newline=""), True


# ------------------------------------------------------------------ commands

def cmd_value_table(args) -> int:
    try:
        table = natural_value_table(args.n)
    except ValueError as exc:
        raise UsageError(str(exc))
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["value", "subset"])
    w.writerows(table)
    return 0


def cmd_integrate(args) -> int:
    cfg = load_field(args.field)
    psi = AnalyticScalar.parse(args.psi, args.psi_im)
    ref = _vector(args.ref, "--ref")
    report = scaled_integral_with_error(cfg.spec, psi, cfg.grid, ref)
    value = report.result.value
    if isinstance(value, complex):
        print(f"value_re: {_fmt(value.real)}")
        print(f"value_im: {_fmt(value.imag)}")
    else:
        print(f"value: {_fmt(value)}")
    print(f"scale: {_fmt(report.result.scale)}")
    print("spacing: " + ",".join(_fmt(h) for h in report.spacing))
    print(f"error_estimate: {report.error_estimate:.3e}")
    return 0


def cmd_derivative_check(args) -> int:
    from .checks import ORDER_TOL
    cfg = load_field(args.field)
    psi = AnalyticScalar.parse(args.psi, args.psi_im)
    y = _vector(args.point, "--point")
    steps = [float(s) for s in args.steps.split(",")]
    if len(steps) < 2 or any(not s > 0 for s in steps):
        raise UsageError("--steps needs at least two positive step sizes")
    exact = scaled_derivative(cfg.spec, psi, y, args.mu)
    rows = []
    for h in steps:
        q = transported_difference_quotient(cfg.spec, psi, y, args.mu, h)
        rows.append((h, q, abs(q - exact)))
    errs = np.array([r[2] for r in rows])
    hs = np.array(steps)
    if np.all(errs > 0):
        order = float(np.polyfit(np.log10(hs), np.log10(errs), 1)[0])
    else:
        order = math.inf
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["h", "quotient_re", "quotient_im", "derivative_re", "derivative_im", "abs_error"])
    for h, q, e in rows:
        w.writerow([_fmt(h), _fmt(q.real), _fmt(q.imag), _fmt(exact.real), _fmt(exact.imag), _fmt(e)])
    print(f"# observed order: {order:.4f}")
    if args.figure:
        from .plotting import plot_convergence

        plot_convergence(hs, errs, args.figure, title=f"mu = {args.mu}")
    return 0 if order >= 1.0 - ORDER_TOL else 1


def cmd_lagrangian(args) -> int:
    cfg = load_field(args.field)
    psi = load_spinor(args.psi)
    gf = load_gauge(args.gauge)
    pts, vals = lagrangian_on_grid(psi, cfg.spec, gf.gauge, cfg.grid, gf.convention,
                                   method=gf.method, h=gf.h, threads=args.threads)
    out, close = _writer(args.out)
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["y0", "y1", "y2", "y3", "re_L", "im_L"])
        for p, v in zip(pts, vals):
            w.writerow([*(_fmt(c) for c in p), _fmt(v.real), _fmt(v.imag)])
    finally:
        if close:
            out.close()
    if args.gauge_check:
        theta = load_theta(args.gauge_check)
        delta = gauge_check(psi, cfg.spec, gf.gauge, theta, cfg.grid, gf.convention,
                            gf.method, gf.h, args.threads)
        print(f"max_abs_delta_L: {delta:.6e}")
        print(f"tolerance: {args.tolerance:.1e}")
        passed = delta <= args.tolerance
        print(f"result: {'pass' if passed else 'fail'}")
        return 0 if passed else 1
    return 0


def cmd_geodesic(args) -> int:
    cfg = load_field(args.field)
    y0 = _vector(args.start, "--start")
    v0 = _vector(args.velocity, "--velocity")
    try:
        sol = solve_geodesic(cfg.spec, y0, v0, args.tau, args.steps, args.metric)
    except ValueError as exc:
        raise UsageError(str(exc))
    out, close = _writer(args.out)
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["tau", "p0", "p1", "p2", "p3", "v0", "v1", "v2", "v3"])
        for t, p, v in zip(sol.tau, sol.positions, sol.velocities):
            w.writerow([_fmt(t), *(_fmt(c) for c in p), *(_fmt(c) for c in v)])
    finally:
        if close:
            out.close()
    if args.figure:
        from .plotting import plot_trajectory

        plot_trajectory(sol, args.figure, title=f"alpha = {cfg.spec.source}")
    if not sol.completed:
        print(f"aborted: non-finite state after tau = {_fmt(sol.tau[-1])}", file=sys.stderr)
        return 1
    return 0


def cmd_path_length(args) -> int:
    cfg = load_field(args.field)
    pf = load_path(args.path)
    ref = _vector(args.ref, "--ref") if args.ref else None
    metric = args.metric or pf.metric
    try:
        length = path_length(cfg.spec, pf.path, ref, metric, pf.quadrature)
    except PathDomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"length: {_fmt(length.value)}")
    print(f"scale: {_fmt(length.scale)}")
    print(f"metric: {metric}")
    return 0


def cmd_restrict_check(args) -> int:
    cfg = load_field(args.field)
    if not args.epsilon > 0:
        raise UsageError("--epsilon must be positive")
    rep = check_local_restriction(cfg.spec, cfg.grid, args.epsilon, args.threads)
    print(f"maxNorm: {_fmt(rep.max_norm)}")
    print("argmax: " + ",".join(_fmt(c) for c in rep.argmax))
    print(f"epsilon: {_fmt(rep.epsilon)}")
    print(f"result: {'pass' if rep.passed else 'fail'}")
    return 0 if rep.passed else 1


def cmd_selftest(args) -> int:
    from .checks import run_all

    results = run_all(args.seed, args.perturb_gamma)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0


# ------------------------------------------------------------------ parser

_EXAMPLES = {
    "value-table": "localmath value-table 30",
    "integrate": 'localmath integrate --field f.cfg --psi "1" --ref "0,0,0,0"',
    "derivative-check": 'localmath derivative-check --field f.cfg --psi "sin(y1)" --point "0,0.3,0,0" --mu 1',
    "lagrangian": "localmath lagrangian --field f.cfg --psi psi.cfg --gauge gauge.cfg --out density.csv",
    "geodesic": 'localmath geodesic --field f.cfg --start "0,0,0,0" --velocity "1,0.2,0,0" --tau 1 --steps 1000 --out traj.csv',
    "path-length": 'localmath path-length --field f.cfg --path path.cfg --ref "0,0,0,0"',
    "restrict-check": "localmath restrict-check --field f.cfg --epsilon 1e-9",
    "selftest": "localmath selftest --seed 0",
}


def _sub(subs, name, help_text, func):
    p = subs.add_parser(
        name, help=help_text, description=help_text,
        epilog="example:\n  " + _EXAMPLES[name],
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.set_defaults(func=func)
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="localmath",
        description="Number-scaling arithmetic and the scaled calculus it induces.",
        epilog="examples:\n" + textwrap.indent("\n".join(_EXAMPLES.values()), "  "),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads for lattice sweeps (default: $LOCALMATH_THREADS or 1)")
    parser.add_argument("-v", "--verbose", action="store_true")
    subs = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = _sub(subs, "value-table", "print the values a natural number takes in the subsets N_d as CSV",
             cmd_value_table)
    p.add_argument("n", type=int)

    p = _sub(subs, "integrate", "integral of a scalar field carried to a reference point", cmd_integrate)
    p.add_argument("--field", required=True)
    p.add_argument("--psi", required=True, help="real part of the integrand")
    p.add_argument("--psi-im", default="0", help="imaginary part of the integrand")
    p.add_argument("--ref", required=True, help="reference point x0,x1,x2,x3")

    p = _sub(subs, "derivative-check", "compare the scaled derivative with difference quotients",
             cmd_derivative_check)
    p.add_argument("--field", required=True)
    p.add_argument("--psi", required=True)
    p.add_argument("--psi-im", default="0")
    p.add_argument("--point", required=True)
    p.add_argument("--mu", type=int, choices=range(4), required=True)
    p.add_argument("--steps", default="1e-2,1e-3,1e-4")
    p.add_argument("--figure", help="write a convergence plot (png/pdf/svg)")

    p = _sub(subs, "lagrangian", "Dirac Lagrangian density on the field grid as CSV", cmd_lagrangian)
    p.add_argument("--field", required=True)
    p.add_argument("--psi", required=True)
    p.add_argument("--gauge", required=True)
    p.add_argument("--out", default="-")
    p.add_argument("--gauge-check", metavar="THETA_CFG",
                   help="also report max |L' - L| under the gauge transformation in this file")
    p.add_argument("--tolerance", type=float, default=1e-10)

    p = _sub(subs, "geodesic", "integrate the geodesic equation with RK4", cmd_geodesic)
    p.add_argument("--field", required=True)
    p.add_argument("--start", required=True)
    p.add_argument("--velocity", required=True)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--metric", choices=("minkowski", "euclidean"), default="minkowski")
    p.add_argument("--out", default="-")
    p.add_argument("--figure", help="write a trajectory plot (png/pdf/svg)")

    p = _sub(subs, "path-length", "length of a path measured at a reference point", cmd_path_length)
    p.add_argument("--field", required=True)
    p.add_argument("--path", required=True)
    p.add_argument("--ref", help="reference point (default: path start)")
    p.add_argument("--metric", choices=("minkowski", "euclidean"))

    p = _sub(subs, "restrict-check", "check |A| < epsilon over the field grid", cmd_restrict_check)
    p.add_argument("--field", required=True)
    p.add_argument("--epsilon", type=float, required=True)

    p = _sub(subs, "selftest", "run the acceptance checks", cmd_selftest)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--perturb-gamma", type=float, default=0.0, help=argparse.SUPPRESS)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    args.threads = resolve_threads(args.threads)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OverflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

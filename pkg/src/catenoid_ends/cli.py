"""Command-line front end.

Subcommands::

    catenoid-ends roots  --n N [--out FILE]
    catenoid-ends verify CONFIG [--tol T] [--csv FILE]
    catenoid-ends solve  CONFIG --fixed I[,J...] --out FILE [--tol T] [--max-iter K]
    catenoid-ends mesh   CONFIG --out FILE [--rmin R --rmax R --nr N --ntheta N --cut C] [--force]

CONFIG may be ``-`` for standard input.  Point indices are 0-based.

Exit codes: 0 success, 1 verification failure or unbalanced mesh input,
2 bad arguments or unreadable config, 3 root-finder failure, 4 solver
failure, 5 quadrature failure.
"""
from __future__ import annotations

import argparse
import csv
import sys
import warnings

import numpy as np

from .balance import SolverOptions, balance_residuals, legendre_config, solve_balance
from .configio import ConfigFileError, dumps_config, loads_config, write_config
from .exceptions import (
    CatenoidEndsError,
    GeometryError,
    IterationError,
    QuadratureError,
    RankError,
    SupportedRangeError,
)
from .polynomials import MAX_DEGREE
from .surface import PERIOD, GridSpec, build_mesh, export_obj
from .weierstrass import contour_period, verify_conditions

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_ROOTS, EXIT_SOLVER, EXIT_QUAD = 0, 1, 2, 3, 4, 5

BALANCE_TOL = 1e-9
MESH_BALANCE_TOL = 1e-8


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load(path):
    if path == "-":
        return loads_config(sys.stdin.read(), source="<stdin>")
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigFileError(f"{path}: {exc.strerror}") from exc
    return loads_config(text, source=path)


def cmd_roots(args) -> int:
    try:
        c = legendre_config(args.n)
    except SupportedRangeError as exc:
        print(f"error: {exc} (supported range 1..{MAX_DEGREE})", file=sys.stderr)
        return EXIT_USAGE
    except IterationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ROOTS
    max_f = balance_residuals(c).max_abs
    report = sys.stdout
    if args.out:
        write_config(c, args.out)
    else:
        sys.stdout.write(dumps_config(c))
        report = sys.stderr
    print(f"max|F_k| = {max_f:.3e}", file=report)
    return EXIT_OK if max_f <= BALANCE_TOL else EXIT_FAIL


def _period_defects(c):
    rows = []
    for k, pk in enumerate(c.points):
        per = contour_period(c, pk).coords
        rows.append((k, per, float(np.abs(per).max())))
    origin = contour_period(c, 0.0).coords
    d0 = float(min(np.abs(origin - PERIOD).max(), np.abs(origin + PERIOD).max()))
    return rows, origin, d0


def cmd_verify(args) -> int:
    c = _load(args.config)
    rep = balance_residuals(c)
    cond = verify_conditions(c)
    try:
        rows, origin, d0 = _period_defects(c)
    except (GeometryError, QuadratureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL

    out = sys.stdout
    if c.label:
        print(f"configuration: {c.label}", file=out)
    print(f"{'k':>3} {'Re p':>22} {'Im p':>22} {'alpha':>12} {'|F_k|':>10}  period (x1, x2, x3)", file=out)
    absF = np.abs(rep.residuals)
    for k, per, _ in rows:
        p = c.points[k]
        print(
            f"{k:>3} {p.real:>22.15g} {p.imag:>22.15g} {c.alphas[k]:>12.6g} {absF[k]:>10.3e}  "
            f"({per[0]: .3e}, {per[1]: .3e}, {per[2]: .3e})",
            file=out,
        )
    print(f"period around 0: ({origin[0]: .3e}, {origin[1]: .12f}, {origin[2]: .3e})", file=out)
    print(f"max|F_k| = {rep.max_abs:.3e}", file=out)
    print(
        f"residue-theorem defect = {abs(rep.residue_theorem_defect):.3e} (scale {rep.defect_scale:.3e})",
        file=out,
    )
    for ch in cond.checks:
        status = "pass" if ch.passed else "FAIL"
        extra = f"  {ch.detail}" if ch.detail else ""
        print(f"check {ch.name:<13} {status}  defect={ch.defect:.3e}{extra}", file=out)

    worst = max([d for _, _, d in rows] + [d0])
    ok = worst <= args.tol
    print(f"max period defect = {worst:.3e} (tol {args.tol:g}): {'PASS' if ok else 'FAIL'}", file=out)

    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["k", "re_p", "im_p", "alpha", "abs_F", "period_x1", "period_x2", "period_x3"])
            for k, per, _ in rows:
                p = c.points[k]
                w.writerow([k, repr(float(p.real)), repr(float(p.imag)), repr(float(c.alphas[k])), repr(float(absF[k]))]
                           + [repr(float(x)) for x in per])
            w.writerow(["origin", "0.0", "0.0", "", repr(float(rep.max_abs))] + [repr(float(x)) for x in origin])
    return EXIT_OK if ok else EXIT_FAIL


def _parse_indices(text):
    try:
        idx = [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not idx:
        raise argparse.ArgumentTypeError("index list is empty")
    return idx


def cmd_solve(args) -> int:
    c = _load(args.config)
    opts = SolverOptions(tol=args.tol, max_iter=args.max_iter)
    try:
        sol = solve_balance(c, args.fixed, opts)
    except IterationError as exc:
        if exc.best is not None:
            write_config(exc.best, args.out + ".partial")
        print(f"error: {exc}; best iterate written to {args.out}.partial", file=sys.stderr)
        return EXIT_SOLVER
    except RankError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    write_config(sol.config, args.out)
    print(f"iterations = {sol.iterations}")
    print(f"max|F_k| = {sol.residual:.3e}")
    return EXIT_OK


def cmd_mesh(args) -> int:
    c = _load(args.config)
    max_f = balance_residuals(c).max_abs
    if max_f > MESH_BALANCE_TOL and not args.force:
        print(
            f"error: configuration is unbalanced (max|F_k| = {max_f:.3e}); use --force to mesh anyway",
            file=sys.stderr,
        )
        return EXIT_FAIL
    kw = {}
    for key, name in [("r_min", "rmin"), ("r_max", "rmax"), ("n_r", "nr"), ("n_theta", "ntheta"), ("puncture_cut", "cut")]:
        if getattr(args, name) is not None:
            kw[key] = getattr(args, name)
    try:
        grid = GridSpec.default_for(c, **kw)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            mesh = build_mesh(c, grid)
    except QuadratureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_QUAD
    except (GeometryError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    with open(args.out, "wb") as fh:
        nbytes = export_obj(mesh, fh)
    s = mesh.seam_offset
    print(f"wrote {args.out}: {len(mesh.vertices)} vertices, {len(mesh.faces)} faces, {nbytes} bytes")
    print(f"seam_offset = ({s[0]: .12e}, {s[1]: .12e}, {s[2]: .12e})")
    print(f"period defect = {mesh.seam_defect:.3e}")
    print(f"loop closure defect = {mesh.closure_defect:.3e}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="catenoid-ends", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("roots", help="write the balanced configuration built from the roots of f_n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", help="output JSON (default: standard output)")
    p.set_defaults(func=cmd_roots)

    p = sub.add_parser("verify", help="report balance residuals, structural checks and periods")
    p.add_argument("config")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--csv", help="also write the per-puncture table as CSV")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("solve", help="solve the balance equations for the unfixed points")
    p.add_argument("config")
    p.add_argument("--fixed", type=_parse_indices, required=True, help="0-based indices held fixed, e.g. 3 or 0,3")
    p.add_argument("--out", required=True)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--max-iter", type=int, default=100)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("mesh", help="integrate the surface over a log-polar grid and write OBJ")
    p.add_argument("config")
    p.add_argument("--out", required=True)
    p.add_argument("--rmin", type=float)
    p.add_argument("--rmax", type=float)
    p.add_argument("--nr", type=int)
    p.add_argument("--ntheta", type=int)
    p.add_argument("--cut", type=float)
    p.add_argument("--force", action="store_true", help="mesh even if the configuration is unbalanced")
    p.set_defaults(func=cmd_mesh)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CatenoidEndsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

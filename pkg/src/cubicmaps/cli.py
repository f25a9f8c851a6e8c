"""Command-line entry point: ``cubicmaps <command> [flags]``.

Exit status: 0 success, 1 usage error, 2 computational failure.
Diagnostics go to standard error; results to files or standard output.
"""
from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import __version__
from ._accel import default_threads
from .errors import CubicMapsError, DomainError
from .io import dumps, fmt_float, write_csv, write_json, write_pgm

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _formatter(prog):
    return argparse.HelpFormatter(prog, width=88, max_help_position=32)


def _sign(text):
    if text in ("+1", "1", "+"):
        return 1
    if text in ("-1", "-"):
        return -1
    raise argparse.ArgumentTypeError("expected +1 or -1")


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return v


def _window(p, default=None):
    p.add_argument("--window", nargs=4, type=float, metavar=("XMIN", "XMAX", "YMIN", "YMAX"),
                   default=default, required=default is None,
                   help="parameter rectangle, x range then y range")


def _size(p, default=None):
    p.add_argument("--size", nargs=2, type=_positive_int, metavar=("W", "H"),
                   default=default, required=default is None, help="grid width and height in pixels")


def _threads(p):
    p.add_argument("--threads", type=_positive_int, default=None,
                   help="worker threads (default: CUBICMAPS_THREADS or all cores)")


def build_parser():
    ap = _Parser(prog="cubicmaps", formatter_class=_formatter,
                 description="Dynamics of cubic maps: moduli, regions, entropy, centers and pictures.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("render", formatter_class=_formatter, help="render a parameter plane to PGM",
                       description="Render a parameter plane to a binary PGM with a JSON sidecar.")
    from .raster import FAMILIES
    p.add_argument("--family", required=True, choices=sorted(FAMILIES), metavar="FAMILY",
                   help="one of: " + ", ".join(sorted(FAMILIES)))
    _window(p)
    _size(p)
    p.add_argument("--out", required=True, help="output PGM path (sidecar: OUT.json)")
    p.add_argument("--nmax", type=_positive_int, default=400, help="orbit length (default 400)")
    p.add_argument("--pmax", type=_positive_int, default=64, help="largest period checked (default 64)")
    p.add_argument("--tol", type=_positive_float, default=1e-6, help="periodicity tolerance (default 1e-6)")
    p.add_argument("--sign", type=_sign, default=1, help="arch branch sign, +1 or -1 (default +1)")
    p.add_argument("--seed", type=int, default=0, help="Henon random seed (default 0)")
    p.add_argument("--trials", type=_positive_int, default=16, help="Henon starts per pixel (default 16)")
    p.add_argument("--no-structure", action="store_true", help="skip the structure-change pass")
    _threads(p)

    p = sub.add_parser("classify", formatter_class=_formatter, help="region class R0..R3 of a real cubic",
                       description="Region class of x -> sigma x^3 - 3Ax + b with B = sigma b^2.")
    p.add_argument("--A", type=float, required=True)
    p.add_argument("--B", type=float, required=True)
    p.add_argument("--sigma", type=_sign, default=None, help="+1 or -1 (default: sign of B)")

    p = sub.add_parser("entropy", formatter_class=_formatter, help="growth number s = exp(h) of a real cubic",
                       description="Topological entropy estimate from lap numbers.")
    p.add_argument("--A", type=float, required=True)
    p.add_argument("--B", type=float, required=True)
    p.add_argument("--sigma", type=_sign, default=None, help="+1 or -1 (default: sign of B)")
    p.add_argument("--kmax", type=_positive_int, default=200, help="number of iterates (default 200)")
    p.add_argument("--cap", type=_positive_int, default=2_000_000, help="turning point cap (default 2e6)")

    p = sub.add_parser("entropy-grid", formatter_class=_formatter, help="growth numbers over a window",
                       description="Growth numbers over a parameter window, as CSV and optional contours.")
    p.add_argument("--plane", choices=["Ab", "Ab'", "AB"], default="Ab", help="parameter plane (default Ab)")
    _window(p)
    _size(p)
    p.add_argument("--out", required=True, help="output CSV (x, y, s, converged)")
    p.add_argument("--kmax", type=_positive_int, default=200, help="number of iterates (default 200)")
    p.add_argument("--contour", type=_positive_float, default=None, metavar="DS",
                   help="contour interval for --image")
    p.add_argument("--image", default=None, help="PGM of the level lines of s")
    _threads(p)

    p = sub.add_parser("curves", formatter_class=_formatter, help="sample a bifurcation curve B(A)",
                       description="Sample Per1(mu), Per2, Preper11 or Preper12(+/-) as CSV.")
    p.add_argument("--curve", required=True, help="e.g. 'Per1(-1)', Per2, Preper11, Preper12+")
    p.add_argument("--A-range", nargs=2, type=float, required=True, metavar=("A0", "A1"), dest="a_range")
    p.add_argument("--n", type=_positive_int, default=201, help="number of samples (default 201)")
    p.add_argument("--out", default=None, help="CSV path (default: standard output)")

    p = sub.add_parser("centers", formatter_class=_formatter, help="table of hyperbolic centers",
                       description="Check and refine the built-in table of hyperbolic centers.")
    p.add_argument("--verify", action="store_true", help="evaluate the itinerary residuals")
    p.add_argument("--refine", action="store_true", help="Newton-refine every center")
    p.add_argument("--entropy", action="store_true", help="compute entropies at the (refined) centers")
    p.add_argument("--tol", type=_positive_float, default=2e-3, help="verification tolerance (default 2e-3)")
    p.add_argument("--out", default=None, help="JSON path (default: standard output)")

    p = sub.add_parser("henon-search", formatter_class=_formatter, help="attracting cycles of Henon maps",
                       description="Random search for attracting cycles of (x,y) -> (y, y^2 - alpha - beta x).")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    _window(p, default=[])
    p.add_argument("--size", nargs=2, type=_positive_int, metavar=("W", "H"), default=None,
                   help="grid size for a window scan")
    p.add_argument("--out", default=None, help="CSV path for a window scan")
    p.add_argument("--trials", type=_positive_int, default=64, help="random starts (default 64)")
    p.add_argument("--nmax", type=_positive_int, default=1000, help="warm-up iterations (default 1000)")
    p.add_argument("--pmax", type=_positive_int, default=16, help="largest period (default 16)")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    _threads(p)

    p = sub.add_parser("tongues", formatter_class=_formatter, help="rotation numbers of circle maps",
                       description="Rotation numbers of t -> t + c + k sin(2 pi t).")
    p.add_argument("--point", nargs=2, type=float, metavar=("C", "K"), default=None)
    _window(p, default=[])
    p.add_argument("--size", nargs=2, type=_positive_int, metavar=("W", "H"), default=None)
    p.add_argument("--out", default=None, help="CSV path for a window scan")
    p.add_argument("--N", type=_positive_int, default=None,
                   help="iterates (default 100000 for a point, 2000 per grid cell)")

    p = sub.add_parser("normalize", formatter_class=_formatter, help="moduli (A, B) of a cubic",
                       description="Affine invariants of c3 x^3 + c2 x^2 + c1 x + c0.")
    p.add_argument("--coeffs", nargs=4, type=float, required=True, metavar=("C3", "C2", "C1", "C0"))
    return ap


def _print_json(obj):
    sys.stdout.write(dumps(obj) + "\n")


def _check_window(args):
    x0, x1, y0, y1 = args.window
    if not (x1 > x0 and y1 > y0):
        raise UsageError("--window needs XMIN < XMAX and YMIN < YMAX")


def cmd_render(args):
    from .raster import RasterConfig, render
    _check_window(args)
    cfg = RasterConfig(args.family, tuple(args.window), args.size[0], args.size[1], nmax=args.nmax,
                       pmax=args.pmax, tol=args.tol, sign=args.sign, seed=args.seed,
                       trials=args.trials, structure=not args.no_structure)
    res = render(cfg, threads=args.threads or default_threads())
    side = res.save(args.out)
    print(f"wrote {args.out} and {side}", file=sys.stderr)
    return EXIT_OK


def cmd_classify(args):
    from .classifier import classify_report
    _print_json(classify_report(args.A, args.B, args.sigma))
    return EXIT_OK


def cmd_entropy(args):
    from .core import MonicForm
    from .entropy import entropy_estimate
    m = MonicForm.from_moduli(args.A, args.B, args.sigma)
    est = entropy_estimate(m, kmax=args.kmax, cap=args.cap)
    _print_json({"A": args.A, "B": args.B, "sigma": m.sigma, "s": est.s, "h": est.h,
                 "k": est.k, "lap": est.lap, "h_upper": est.h_upper,
                 "converged": est.converged, "capped": est.capped})
    return EXIT_OK


def cmd_entropy_grid(args):
    from .entropy import entropy_grid
    from .raster import contour_gray
    _check_window(args)
    if (args.image is None) != (args.contour is None):
        raise UsageError("--image and --contour go together")
    g = entropy_grid(tuple(args.window), args.size[0], args.size[1], kmax=args.kmax,
                     threads=args.threads or default_threads(), plane=args.plane)
    rows = []
    for j, y in enumerate(g.b):
        for i, x in enumerate(g.A):
            rows.append((float(x), float(y), float(g.s[j, i]), int(g.converged[j, i])))
    write_csv(args.out, ["x", "y", "s", "converged"], rows)
    if args.image:
        write_pgm(args.image, contour_gray(g.s, args.contour))
    print(f"wrote {args.out}" + (f" and {args.image}" if args.image else ""), file=sys.stderr)
    return EXIT_OK


def cmd_curves(args):
    from .loci import CurveId, curve_B
    try:
        curve = CurveId.parse(args.curve)
    except ValueError as e:
        raise UsageError(str(e)) from e
    a0, a1 = args.a_range
    rows = []
    for A in np.linspace(a0, a1, args.n):
        try:
            Bs = curve_B(curve, float(A))
        except DomainError:
            continue
        for k, B in enumerate(Bs):
            rows.append((float(A), float(np.real(B)), k))
    header = ["A", "B", "branch"]
    if args.out:
        write_csv(args.out, header, rows)
    else:
        sys.stdout.write(",".join(header) + "\n")
        for A, B, k in rows:
            sys.stdout.write(f"{fmt_float(A)},{fmt_float(B)},{k}\n")
    return EXIT_OK


def cmd_centers(args):
    from .core import MonicForm
    from .entropy import entropy_estimate
    from .hyperbolic import (CenterReport, builtin_center_table, critical_cycle_multipliers,
                             refine_center, verify_center)
    reports = []
    failed = False
    for rec in builtin_center_table():
        rep = CenterReport(rec, verify_center(rec, args.tol))
        failed |= args.verify and not rep.verify.passed
        A, B, sigma = rec.A, rec.B, rec.sigma
        if args.refine:
            try:
                rep.refined = refine_center(rec.spec, (rec.A, rec.B), rec.sigma)
                A, B = rep.refined.A, rep.refined.B
                rep.multipliers = critical_cycle_multipliers(MonicForm.from_moduli(A, B, sigma))
            except CubicMapsError as e:
                rep.error = f"{type(e).__name__}: {e}"
                failed = True
        if args.entropy and A * B >= 0:
            rep.entropy_computed = entropy_estimate(MonicForm.from_moduli(A, B, sigma)).h
        reports.append(rep.to_json())
    npass = sum(r["passed"] for r in reports)
    out = {"count": len(reports), "passed": npass, "tol": args.tol, "rows": reports}
    if args.out:
        write_json(args.out, out)
    else:
        _print_json(out)
    print(f"{npass}/{len(reports)} rows pass verify_center at tol {args.tol:g}", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_henon(args):
    from .prototypes import henon_grid, henon_search
    if args.window:
        _check_window(args)
        if not args.size or not args.out:
            raise UsageError("a window scan needs --size and --out")
        from .entropy import grid_axes
        from ._accel import set_threads
        xs, ys = grid_axes(args.window, *args.size)
        prev = set_threads(args.threads or default_threads())
        try:
            per = henon_grid(xs, ys, trials=args.trials, nwarm=args.nmax, pmax=args.pmax, seed=args.seed)
        finally:
            if prev is not None:
                set_threads(prev)
        rows = [(float(x), float(y), int(per[j, i])) for j, y in enumerate(ys) for i, x in enumerate(xs)]
        write_csv(args.out, ["alpha", "beta", "period"], rows)
        print(f"wrote {args.out}", file=sys.stderr)
        return EXIT_OK
    if args.alpha is None or args.beta is None:
        raise UsageError("give --alpha and --beta, or --window/--size/--out")
    res = henon_search(args.alpha, args.beta, trials=args.trials, Nmax=args.nmax, pmax=args.pmax,
                       seed=args.seed)
    _print_json(res.to_json())
    return EXIT_OK


def cmd_tongues(args):
    from .prototypes import circle_rotation_number, tongue_grid
    if args.point is not None:
        c, k = args.point
        est = circle_rotation_number(c, k, N=args.N or 100_000)
        _print_json({"c": c, "k": k, "rho": est.rho,
                     "locked": None if est.locked is None else str(est.locked),
                     "injective": est.injective, "multiplier": est.multiplier})
        return EXIT_OK
    if not args.window or not args.size or not args.out:
        raise UsageError("give --point C K, or --window/--size/--out")
    _check_window(args)
    from .entropy import grid_axes
    xs, ys = grid_axes(args.window, *args.size)
    rho, locked = tongue_grid(xs, ys, N=args.N or 2000)
    rows = [(float(x), float(y), float(rho[j, i]), int(locked[j, i]))
            for j, y in enumerate(ys) for i, x in enumerate(xs)]
    write_csv(args.out, ["c", "k", "rho", "locked"], rows)
    print(f"wrote {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_normalize(args):
    from .core import GeneralCubic, normalize
    c3, c2, c1, c0 = args.coeffs
    if c3 == 0:
        raise UsageError("leading coefficient must be non-zero")
    p, m = normalize(GeneralCubic(c3, c2, c1, c0))
    _print_json({"A": p.A, "B": p.B, "sigma": p.sigma, "b": m.b})
    return EXIT_OK


COMMANDS = {
    "render": cmd_render,
    "classify": cmd_classify,
    "entropy": cmd_entropy,
    "entropy-grid": cmd_entropy_grid,
    "curves": cmd_curves,
    "centers": cmd_centers,
    "henon-search": cmd_henon,
    "tongues": cmd_tongues,
    "normalize": cmd_normalize,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:  # --help / --version
        return int(e.code or 0)
    except (CubicMapsError, ArithmeticError, np.linalg.LinAlgError) as e:
        print(f"cubicmaps: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as e:
        print(f"cubicmaps: error: {e}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()

"""Command-line front end: ``eval``, ``verify``, ``scan``, ``table``, ``normalize``.

Exit codes: 0 success, 1 a verification or containment check failed,
2 usage error (bad flags, unknown quantity, point outside G2, unwritable CSV).
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from typing import Optional, Sequence

from . import closed_forms as cf
from . import geometry as geo
from .automorphism import normalize
from .errors import G2Error
from .verify import (
    DEFAULT_GRID,
    DEFAULT_TOLERANCES,
    quantity_names,
    quantity_value,
    relative_error,
    rows_to_csv,
    run_verification,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _fmt(v) -> str:
    return "" if v is None else "%.17g" % v


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` with ``stop`` included when it lies on the grid."""
    try:
        start, stop, step = (float(t) for t in text.split(":"))
    except ValueError:
        raise UsageError(f"grid must be start:stop:step, got {text!r}") from None
    if not (step > 0 and math.isfinite(start) and math.isfinite(stop)) or stop < start:
        raise UsageError(f"bad grid {text!r}: need step > 0 and start <= stop")
    n = int(math.floor((stop - start) / step + 1e-9))
    if n > 100000:
        raise UsageError(f"grid {text!r} has too many points")
    return [round(start + k * step, 12) for k in range(n + 1)]


def parse_point(text: str) -> tuple[complex, complex]:
    try:
        a, b, c, d = (float(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"point must be re,im,re,im, got {text!r}") from None
    return complex(a, b), complex(c, d)


def parse_tols(items: Sequence[str], allowed: Sequence[str]) -> dict[str, float]:
    out = {}
    for item in items or ():
        name, sep, val = item.partition("=")
        if not sep:
            raise UsageError(f"--tol expects NAME=VALUE, got {item!r}")
        if name not in allowed:
            raise UsageError(f"unknown tolerance {name!r}")
        try:
            out[name] = float(val)
        except ValueError:
            raise UsageError(f"tolerance {name!r} is not a number: {val!r}") from None
        if not out[name] >= 0:
            raise UsageError(f"tolerance {name!r} must be nonnegative")
    return out


def _write_csv(path: str, text: str) -> None:
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from None


def _check_quantity(name: str) -> None:
    if name not in quantity_names():
        raise UsageError(f"unknown quantity {name!r}; see 'table --list'")


# ---------------------------------------------------------------------------
# commands


def cmd_eval(args) -> int:
    _check_quantity(args.quantity)
    if (args.x is None) == (args.point is None):
        raise UsageError("eval needs exactly one of --x and --point")
    if args.point is not None:
        res = normalize(parse_point(args.point))
        x = res.x
        print(f"x {_fmt(x)}")
        print(f"{args.quantity} {_fmt(quantity_value(args.quantity, x, source=args.source))}")
    else:
        print(_fmt(quantity_value(args.quantity, args.x, source=args.source)))
    return EXIT_OK


def cmd_verify(args) -> int:
    grid = parse_grid(args.grid) if args.grid else list(DEFAULT_GRID)
    tols = parse_tols(args.tol, list(DEFAULT_TOLERANCES) + cf.closed_form_names())
    names = None
    if args.quantity:
        for q in args.quantity:
            cf.get_closed_form(q)
        names = args.quantity
    report = run_verification(grid, quantities=names, tolerances=tols)
    if args.csv:
        _write_csv(args.csv, report.to_csv())
    s = report.summary()
    print(f"rows {s['total']}  passed {s['passed']}  failed {s['failed']}  max_rel_err {s['max_rel_err']:.3e}")
    for r in report.failures():
        print(f"FAIL {r.quantity} x={_fmt(r.x)} closed={_fmt(r.closed_form)} "
              f"pipeline={_fmt(r.pipeline)} oracle={_fmt(r.oracle)} rel_err={r.rel_err:.3e}")
    return EXIT_OK if report.ok else EXIT_FAIL


def scan_rows(result: geo.PinchScanResult, tol: float) -> list[list[str]]:
    """Per-x CSV rows; ``pass`` marks containment of that x-slice."""
    rows = []
    bounds = {
        "L_min": (-10.0 - tol, math.inf),
        "L_max": (-math.inf, -0.5 + tol),
        "R_min": (-10.0 - tol, math.inf),
        "R_max": (-math.inf, -1.0 / 18.0 + tol),
    }
    for x, l0, l1, r0, r1, b in result.per_x:
        for name, v in zip(("L_min", "L_max", "R_min", "R_max"), (l0, l1, r0, r1)):
            lo, hi = bounds[name]
            rows.append([name, _fmt(x), "", _fmt(v), "", "", "", str(lo <= v <= hi).lower()])
        closed = cf.eval_closed_form("B_XY", x)
        err = abs(b - closed)
        rows.append(["B_XY", _fmt(x), _fmt(closed), _fmt(b), "", _fmt(err), _fmt(relative_error(b, closed)), ""])
    rows.sort(key=lambda r: (r[0], float(r[1])))
    return rows


def cmd_scan(args) -> int:
    xs = parse_grid(args.grid) if args.grid else list(geo.DEFAULT_X_GRID)
    tol = parse_tols(args.tol, ["containment"]).get("containment", 1e-6)
    workers = args.workers if args.workers is not None else min(8, os.cpu_count() or 1)
    res = geo.pinch_scan(xs, args.s_steps, args.phase_steps, workers=workers)
    for label, e, ref in (
        ("L min", res.L_min, res.L_min_refined),
        ("L max", res.L_max, res.L_max_refined),
        ("R min", res.R_min, res.R_min_refined),
        ("R max", res.R_max, res.R_max_refined),
    ):
        print(f"{label:6s} {e.value: .10f} at x={e.x:.4f} s={e.s:.4f} phase={e.phase:.4f} (refined {ref: .10f})")
    print(f"max B_XY {res.bxy_max:.10g} at x={res.bxy_argmax:.4f}")
    print(f"samples {res.samples}  nonnegative {res.nonnegative}")
    checks = res.contained(tol)
    for k, v in checks.items():
        print(f"{k:8s} {'pass' if v else 'FAIL'}")
    if args.csv:
        _write_csv(args.csv, rows_to_csv(scan_rows(res, tol)))
    return EXIT_OK if all(checks.values()) else EXIT_FAIL


def cmd_table(args) -> int:
    if args.list:
        print("\n".join(cf.closed_form_names()))
        return EXIT_OK
    if not args.quantity:
        raise UsageError("table needs --quantity (or --list)")
    for q in args.quantity:
        cf.get_closed_form(q)
    xs = parse_grid(args.grid) if args.grid else list(DEFAULT_GRID)
    rows = []
    for q in args.quantity:
        for x in xs:
            rows.append([q, _fmt(x), _fmt(cf.eval_closed_form(q, x)), "", "", "", "", ""])
    rows.sort(key=lambda r: (r[0], float(r[1])))
    text = rows_to_csv(rows)
    if args.csv:
        _write_csv(args.csv, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_normalize(args) -> int:
    if args.point is None:
        raise UsageError("normalize needs --point re,im,re,im")
    res = normalize(parse_point(args.point))
    print(f"x {_fmt(res.x)}")
    print(f"alpha {_fmt(res.h.alpha.real)},{_fmt(res.h.alpha.imag)}")
    print(f"theta {_fmt(res.h.theta)}")
    return EXIT_OK


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="g2bergman", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("eval", help="evaluate one quantity at (x, 0) or at a point of G2")
    e.add_argument("--x", type=float)
    e.add_argument("--point", help="w1 and w2 as re,im,re,im")
    e.add_argument("--quantity", required=True)
    e.add_argument("--source", choices=geo.SOURCES, default="auto")
    e.set_defaults(func=cmd_eval)

    v = sub.add_parser("verify", help="closed forms vs jet pipeline vs finite differences")
    v.add_argument("--grid", help="start:stop:step (default 0.05:0.95:0.05)")
    v.add_argument("--quantity", action="append", help="restrict to these quantities")
    v.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE",
                   help="pipeline, radical, oracle or a quantity name")
    v.add_argument("--csv", metavar="PATH")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("scan", help="pinching scan of the holomorphic sectional curvature")
    s.add_argument("--grid", help="x grid start:stop:step (default 0:0.99:0.01)")
    s.add_argument("--s-steps", type=int, default=geo.DEFAULT_S_STEPS)
    s.add_argument("--phase-steps", type=int, default=geo.DEFAULT_PHASE_STEPS)
    s.add_argument("--workers", type=int)
    s.add_argument("--tol", action="append", default=[], metavar="containment=VALUE")
    s.add_argument("--csv", metavar="PATH")
    s.set_defaults(func=cmd_scan)

    t = sub.add_parser("table", help="closed-form values over a grid as CSV")
    t.add_argument("--quantity", action="append")
    t.add_argument("--grid")
    t.add_argument("--csv", metavar="PATH")
    t.add_argument("--list", action="store_true", help="list registered names")
    t.set_defaults(func=cmd_table)

    n = sub.add_parser("normalize", help="automorphism taking a point of G2 to (x, 0)")
    n.add_argument("--point")
    n.set_defaults(func=cmd_normalize)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, G2Error) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        print(f"g2bergman: error: {msg}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

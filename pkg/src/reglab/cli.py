"""Command-line front end.

Usage:
  reglab mahler --k 5
  reglab mahler --h 0,0.5 --method grid
  reglab diamond --h 0.5 --pair combined --json
  reglab verify --suite main
  reglab lfun --k 1

Exit codes: 0 all checks pass, 1 a check failed, 2 usage/parse error or
singular input, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

SHORTHANDS = {
    "3sqrt2": 3 * math.sqrt(2),
    "isqrt2": 1j * math.sqrt(2),
    "-isqrt2": -1j * math.sqrt(2),
    "sqrt2": math.sqrt(2),
    "1/sqrt2": 1 / math.sqrt(2),
    "-3i": -3j,
}

PAIRS = ("xy", "xyphi", "f", "g", "gsigma", "combined")


class UsageError(ValueError):
    pass


def parse_complex(text: str) -> complex:
    """``RE`` or ``RE,IM`` decimal pair, or one of the named shorthands."""
    key = text.strip().lower()
    if key in SHORTHANDS:
        return complex(SHORTHANDS[key])
    parts = key.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise UsageError(f"cannot parse {text!r}; expected RE, RE,IM or one of {', '.join(SHORTHANDS)}")


def _fmt_complex(z: complex) -> str:
    if z.imag == 0:
        return f"{z.real:.12g}"
    return f"{z.real:.12g}{z.imag:+.12g}i"


# --------------------------------------------------------------------------
# commands


def cmd_mahler(args) -> int:
    from .mahler import QuadratureConfig, mahler_measure_2d_oracle, mahler_measure_estimate

    if (args.k is None) == (args.h is None):
        raise UsageError("give exactly one of --k and --h")
    if args.k is not None:
        k = parse_complex(args.k)
    else:
        h = parse_complex(args.h)
        if h == 0:
            raise UsageError("h must be nonzero")
        k = 2 * (h + 1 / h)
    if args.method == "grid":
        value = mahler_measure_2d_oracle(k, args.grid_n)
        err = abs(value - mahler_measure_2d_oracle(k, max(8, args.grid_n // 2)))
    else:
        cfg = QuadratureConfig(abs_tol=args.tol)
        value, err = mahler_measure_estimate(k, cfg)
    if args.format == "json":
        print(json.dumps({"k": [k.real, k.imag], "m": value, "error_estimate": err}))
    else:
        print(f"m({_fmt_complex(k)}) = {value:.15f}  (error estimate {err:.1e})")
    return EXIT_OK


def _pair_class(h: complex, pair: str):
    from . import curve as cv
    from . import verify as vf

    if pair == "xy":
        return vf._xy_class(h)
    if pair == "xyphi":
        return vf._xy_phi_class(h)
    if pair == "f":
        return vf.f_class(h)
    if abs(h - 0.5) > 1e-9:
        raise UsageError(f"--pair {pair} is defined on E_5 only (h = 0.5)")
    return {"g": vf.g_class, "gsigma": vf.g_sigma_class, "combined": vf.combined_class}[pair]()


def cmd_diamond(args) -> int:
    from .curve import standard_labels

    h = parse_complex(args.h)
    if h == 0:
        raise UsageError("h must be nonzero")
    c = _pair_class(h, args.pair)
    if not args.keep_torsion:
        c = c.modulo_torsion()
    labels = standard_labels(h)
    if args.json or args.format == "json":
        print(json.dumps(c.to_json(labels)))
    else:
        print(c.to_text(labels))
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_suite

    results = run_suite(args.suite)
    fmt = "json" if args.json else args.format
    if fmt == "json":
        print(json.dumps([r.to_json() for r in results], indent=1))
    elif fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["name", "lhs", "rhs", "residual", "tolerance", "passed", "runtime_ms"])
        for r in results:
            w.writerow([r.name, r.lhs, r.rhs, r.residual, r.tolerance, r.passed, r.runtime_ms])
        sys.stdout.write(buf.getvalue())
    else:
        for r in results:
            print(r.line())
        npass = sum(r.passed for r in results)
        print(f"{npass}/{len(results)} checks passed")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def cmd_lfun(args) -> int:
    from . import lseries as ls

    M = ls.integral_model(args.k)
    N, w = ls.conductor_scan(M)
    value = ls.l_prime_at_zero(M, n_max=args.terms)
    if args.format == "json":
        print(json.dumps({"k": args.k, "N": N, "w": w, "l_prime_at_zero": value}))
    else:
        print(f"L'(E_{args.k}, 0) = {value:.15f}  (N = {N}, w = {w:+d})")
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reglab", description=__doc__.split("\n")[0])
    parser.add_argument("--format", choices=("plain", "json", "csv"), default="plain")
    parser.add_argument("--cache-dir", help="a_p / conductor cache (default $REGLAB_CACHE or ~/.cache/reglab)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mahler", help="Mahler measure m(k)")
    p.add_argument("--k", help="RE[,IM] or shorthand (3sqrt2, isqrt2, ...)")
    p.add_argument("--h", help="parameter with k = 2(h + 1/h)")
    p.add_argument("--tol", type=float, default=1e-11)
    p.add_argument("--method", choices=("jensen", "grid"), default="jensen")
    p.add_argument("--grid-n", type=int, default=1024)
    p.set_defaults(func=cmd_mahler)

    p = sub.add_parser("diamond", help="diamond class of a function pair")
    p.add_argument("--h", required=True)
    p.add_argument("--pair", choices=PAIRS, required=True)
    p.add_argument("--json", action="store_true")
    p.add_argument("--keep-torsion", action="store_true", help="also print 2-torsion terms")
    p.set_defaults(func=cmd_diamond)

    p = sub.add_parser("verify", help="run check suites")
    p.add_argument(
        "--suite",
        choices=("all", "functional", "divisors", "dilog", "main", "lseries", "properties"),
        default="all",
    )
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("lfun", help="L'(E_k, 0) for integer k")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--terms", type=int, default=None, help="number of Dirichlet terms (n_max)")
    p.set_defaults(func=cmd_lfun)
    return parser


def _check_ranges(args) -> None:
    if getattr(args, "tol", None) is not None and not (0 < args.tol < 1):
        raise UsageError("--tol must lie in (0, 1)")
    if getattr(args, "grid_n", None) is not None and args.grid_n < 8:
        raise UsageError("--grid-n must be >= 8")
    if getattr(args, "terms", None) is not None and args.terms < 1:
        raise UsageError("--terms must be positive")


def main(argv: list[str] | None = None) -> int:
    from .curve import SingularCurveError
    from .lseries import LSeriesError
    from .mahler import QuadratureError

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.cache_dir:
        os.environ["REGLAB_CACHE"] = args.cache_dir
    try:
        _check_ranges(args)
        return args.func(args)
    except (UsageError, SingularCurveError) as exc:
        print(f"reglab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QuadratureError, LSeriesError) as exc:
        print(f"reglab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

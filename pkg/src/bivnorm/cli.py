"""Command-line entry point: ``bivnorm {eval,profile,selftest,oracle}``."""

import argparse
import math
import sys
import time

import numpy as np

from . import harness
from .diagonal import phi2_diagonal
from .oracle import AccuracyError, oracle_batch, oracle_dd, phi2_plackett, phi2_tetrachoric
from .reduction import DomainError, phi2
from .univariate import cdf

EXIT_DOMAIN = 2
EXIT_ORACLE = 3


def _g17(v):
    return f"{v:.17g}"


def _cmd_eval(args):
    try:
        if args.diagonal:
            if len(args.values) != 2:
                print("eval --diagonal takes <x> <rho>", file=sys.stderr)
                return EXIT_DOMAIN
            x, rho = args.values
            if not 0.0 <= rho <= 1.0 or x > 0.0:
                raise DomainError("diagonal path needs x <= 0 and 0 <= rho <= 1")
            lam = math.sqrt((1.0 - rho) / (1.0 + rho))
            value = phi2_diagonal(x, 1.0 - rho, cdf(x), cdf(lam * x))
        else:
            if len(args.values) != 3:
                print("eval takes <x> <y> <rho>", file=sys.stderr)
                return EXIT_DOMAIN
            value = phi2(*args.values)
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    print(_g17(value))
    return 0


def _cmd_oracle(args):
    try:
        v = oracle_dd(args.x, args.y, args.rho)
    except (ValueError, AccuracyError) as exc:
        print(f"oracle error: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    print(f"hi {v.hi!r}")
    print(f"lo {v.lo!r}")
    return 0


def _cmd_profile(args):
    samples = harness.FULL_SCALE_SAMPLES if args.full_scale else args.samples
    cfg = harness.ProfileConfig(
        buckets=args.buckets,
        samples_per_bucket=samples,
        seed=args.seed,
        rho_formula=args.rho_formula,
    )
    start = time.perf_counter()

    def progress(s):
        if args.verbose:
            print(f"bucket {s.n:3d} x={s.x_center:+.1f} q99={s.q99_abs_err:.3e} max={s.max_abs_err:.3e}",
                  file=sys.stderr)

    try:
        stats = harness.run_profile(cfg, workers=args.workers, progress=progress)
    except harness.OracleFailure as exc:
        print(f"oracle failure: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    harness.write_profile_csv(stats, args.out)
    top = harness.global_max(stats)
    x, y, rho = top.max_err_input
    print(f"global max abs error {top.max_abs_err:.6e} in bucket {top.n} (x_center={top.x_center:g})")
    print(f"at x={x!r} y={y!r} rho={rho!r}")
    rejected = sum(s.rejected for s in stats)
    if rejected:
        print(f"{rejected} samples with |rho| > 1 skipped")
    print(f"wrote {args.out} ({len(stats)} buckets, {time.perf_counter() - start:.1f} s)")
    return 0


def selftest_checks():
    """Yield ``(name, passed, detail)`` for quick anchors of the evaluator and oracle."""
    rhos = [-0.999, -0.9, -0.5, 0.0, 0.5, 0.7712, 0.9, 0.999]
    err = max(abs(phi2(0.0, 0.0, r) - (0.25 + math.asin(r) / (2.0 * math.pi))) for r in rhos)
    yield "origin closed form", err <= 2e-16, f"max err {err:.2e}"

    rng = np.random.default_rng(7)
    pts = rng.uniform(-6.0, 6.0, (50, 2))
    ok = all(phi2(a, b, 1.0) == cdf(min(a, b)) and
             phi2(a, b, -1.0) == max(0.0, min(1.0, cdf(a) + cdf(b) - 1.0)) for a, b in pts)
    yield "endpoint closed forms", ok, "rho = +-1"

    rs = np.linspace(-0.999, 0.999, 50)
    oh, ol = oracle_batch(np.zeros(50), np.zeros(50), rs)
    ref = 0.25 + np.arcsin(rs) / (2.0 * np.pi)
    err = float(np.max(np.abs((oh - ref) + ol)))
    yield "oracle origin closed form", err <= 1e-16, f"max err {err:.2e}"

    worst = 0.0
    for x, y, r in [(-1.0, -1.0, 0.5), (-2.0, 1.0, 0.3), (3.0, -0.5, -0.8), (0.7, 2.2, 0.9)]:
        p = float(phi2_plackett(x, y, r))
        t = float(phi2_tetrachoric(x, y, r))
        worst = max(worst, abs(p - t))
    yield "oracle cross-validation", worst <= 1e-16, f"max gap {worst:.2e}"

    x = rng.uniform(-8.0, 8.0, 200)
    y = rng.uniform(-8.0, 8.0, 200)
    r = np.tanh(rng.uniform(-4.0, 4.0, 200))
    oh, ol = oracle_batch(x, y, r)
    err = max(abs((phi2(a, b, c) - h) - l) for a, b, c, h, l in zip(x, y, r, oh, ol))
    yield "phi2 vs oracle", err <= 1e-14, f"max err {err:.2e}"


def _cmd_selftest(args):
    failed = 0
    for name, ok, detail in selftest_checks():
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        failed += not ok
    return 1 if failed else 0


def build_parser():
    parser = argparse.ArgumentParser(prog="bivnorm", description="Bivariate normal CDF")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate Phi2(x, y; rho)")
    p.add_argument("--diagonal", action="store_true", help="diagonal path: arguments are <x> <rho>")
    p.add_argument("values", type=float, nargs="+", metavar="VALUE")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("profile", help="run the error profile against the oracle")
    p.add_argument("--buckets", type=int, default=201)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=harness.DEFAULT_SEED)
    p.add_argument("--out", default="profile.csv")
    p.add_argument("--full-scale", action="store_true", help=f"{harness.FULL_SCALE_SAMPLES} samples per bucket")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--rho-formula", choices=harness.RHO_FORMULAS, default="corrected")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=_cmd_profile)

    p = sub.add_parser("selftest", help="closed-form anchors and oracle cross-checks")
    p.set_defaults(func=_cmd_selftest)

    p = sub.add_parser("oracle", help="reference value as hi and lo parts")
    p.add_argument("x", type=float)
    p.add_argument("y", type=float)
    p.add_argument("rho", type=float)
    p.set_defaults(func=_cmd_oracle)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

"""Run the error profile and print a per-region summary.

    python scripts/run_profile.py --samples 10000 --out results/profile_desk.csv
"""

import argparse
import time

from bivnorm import harness


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=10_000)
    ap.add_argument("--buckets", type=int, default=201)
    ap.add_argument("--seed", type=int, default=harness.DEFAULT_SEED)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--rho-formula", choices=harness.RHO_FORMULAS, default="corrected")
    ap.add_argument("--out", default="results/profile_desk.csv")
    args = ap.parse_args()

    cfg = harness.ProfileConfig(buckets=args.buckets, samples_per_bucket=args.samples,
                                seed=args.seed, rho_formula=args.rho_formula)
    start = time.perf_counter()
    stats = harness.run_profile(cfg, workers=args.workers)
    elapsed = time.perf_counter() - start
    harness.write_profile_csv(stats, args.out)

    top = harness.global_max(stats)
    print(f"{len(stats)} buckets x {args.samples} samples in {elapsed:.1f} s -> {args.out}")
    print(f"global max {top.max_abs_err:.3e} at x_center {top.x_center:+.1f}, input {top.max_err_input}")
    print(f"{'x_center':>8} {'q99':>10} {'max':>10}")
    for s in stats[:: max(1, len(stats) // 40)]:
        print(f"{s.x_center:+8.1f} {s.q99_abs_err:10.3e} {s.max_abs_err:10.3e}")
    print("local peaks of q99:", ", ".join(f"{s.x_center:+.1f}" for s in harness.local_peaks(stats, "q99_abs_err")
                                           if s.q99_abs_err > 1e-16))


if __name__ == "__main__":
    main()

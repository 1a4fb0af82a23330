"""Plot q99 and max absolute error per bucket from a profile CSV (needs matplotlib).

    python scripts/plot_profile.py results/profile_desk.csv results/profile_desk.png
"""

import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from bivnorm.harness import read_profile_csv  # noqa: E402


def main(src, dst):
    stats = read_profile_csv(src)
    xc = [s.x_center for s in stats]
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.semilogy(xc, [s.max_abs_err for s in stats], ".", label="max")
    ax.semilogy(xc, [s.q99_abs_err for s in stats], "-", label="99% quantile")
    ax.axhline(2.0**-53, color="grey", lw=0.5, ls="--", label="2^-53")
    ax.set_xlabel("bucket center x")
    ax.set_ylabel("absolute error vs oracle")
    ax.legend()
    fig.tight_layout()
    fig.savefig(dst, dpi=120)
    print(f"wrote {dst}")


if __name__ == "__main__":
    if len(sys.argv) != 3:
        sys.exit(__doc__)
    main(*sys.argv[1:])

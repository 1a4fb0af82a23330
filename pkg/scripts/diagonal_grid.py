"""Absolute error of the diagonal evaluator on an (x, rho) grid against the oracle.

    python scripts/diagonal_grid.py [--step-x 0.25] [--step-rho 0.025]
"""

import argparse
import math

import numpy as np

from bivnorm.diagonal import diagonal_trace
from bivnorm.oracle import oracle_batch
from bivnorm.univariate import cdf


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--step-x", type=float, default=0.25)
    ap.add_argument("--step-rho", type=float, default=0.025)
    args = ap.parse_args()

    xs = -np.arange(0.0, 15.0 + 1e-9, args.step_x)
    rs = np.minimum(np.arange(0.0, 1.0 + 1e-9, args.step_rho), 1.0)
    X, R = (a.ravel() for a in np.meshgrid(xs, rs, indexing="ij"))
    hi, lo = oracle_batch(X, X, R)
    err = np.empty_like(X)
    iters = np.empty(X.size, dtype=int)
    for i, (x, r) in enumerate(zip(X.tolist(), R.tolist())):
        lam = math.sqrt((1.0 - r) / (1.0 + r))
        t = diagonal_trace(x, 1.0 - r, cdf(x), cdf(lam * x))
        err[i] = abs((t.value - hi[i]) - lo[i])
        iters[i] = t.iterations
    i = int(np.argmax(err))
    print(f"{X.size} points, max error {err[i]:.3e} at x={X[i]:.2f}, rho={R[i]:.3f}; "
          f"max iterations {iters.max()}")
    E = err.reshape(xs.size, rs.size)
    print("worst rho per x:")
    for j in range(0, xs.size, max(1, xs.size // 30)):
        k = int(np.argmax(E[j]))
        print(f"  x={xs[j]:6.2f}  max {E[j, k]:.2e} at rho={rs[k]:.3f}")


if __name__ == "__main__":
    main()

"""Error profile of ``phi2`` against the reference oracle.

Bucket ``n`` draws ``x`` uniformly from ``[c_n - h, c_n + h]`` with
``c_n = n/10 - 10``, ``y`` uniformly from ``y_range`` and ``rho`` as
``2 Phi(r) - 1`` with ``r`` uniform on ``r_range``. Each sample's random
bits come from a Philox block addressed by ``(seed, n, m)``, so any sample
can be regenerated alone and the first ``M`` samples of a bucket are the
same whatever the bucket size.
"""

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .oracle import AccuracyError, QuadratureSpec, oracle_batch
from .reduction import phi2
from .univariate import cdf

CSV_HEADER = ("n", "x_center", "q99_abs_err", "max_abs_err", "max_x", "max_y", "max_rho")
RHO_FORMULAS = ("corrected", "paper")
FULL_SCALE_SAMPLES = 1_000_000
DEFAULT_SEED = 20240607
_UNIT = 2.0**-53


@dataclass(frozen=True)
class ProfileConfig:
    buckets: int = 201
    samples_per_bucket: int = 10_000
    seed: int = DEFAULT_SEED
    y_range: tuple = (-10.0, 10.0)
    r_range: tuple = (-10.0, 10.0)
    halfwidth: float = 0.05
    rho_formula: str = "corrected"
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)

    def __post_init__(self):
        if self.buckets < 1:
            raise ValueError("buckets must be >= 1")
        if self.samples_per_bucket < 1:
            raise ValueError("samples_per_bucket must be >= 1")
        if not self.halfwidth > 0.0:
            raise ValueError("halfwidth must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.rho_formula not in RHO_FORMULAS:
            raise ValueError(f"rho_formula must be one of {RHO_FORMULAS}")

    @staticmethod
    def center(n):
        return n / 10.0 - 10.0


class BucketStats(NamedTuple):
    n: int
    x_center: float
    q99_abs_err: float
    max_abs_err: float
    max_err_input: tuple
    rejected: int = 0  # draws with |rho| > 1, only possible under the uncorrected formula


class OracleFailure(RuntimeError):
    """The oracle could not certify a sample; the bucket is abandoned."""

    def __init__(self, n, detail):
        super().__init__(f"bucket {n}: {detail}")
        self.bucket = n


def _uniforms(cfg, n, start, count):
    bitgen = np.random.Philox(key=np.array([cfg.seed, n], dtype=np.uint64))
    if start:
        bitgen.advance(start)
    raw = bitgen.random_raw(4 * count).reshape(count, 4)
    return (raw[:, :3] >> np.uint64(11)).astype(float) * _UNIT


def _transform(cfg, n, u):
    c = cfg.center(n)
    x = (c - cfg.halfwidth) + 2.0 * cfg.halfwidth * u[:, 0]
    y_lo, y_hi = cfg.y_range
    y = y_lo + (y_hi - y_lo) * u[:, 1]
    r_lo, r_hi = cfg.r_range
    r = r_lo + (r_hi - r_lo) * u[:, 2]
    offset = 1.0 if cfg.rho_formula == "corrected" else 0.5
    rho = np.array([2.0 * cdf(float(v)) - offset for v in r])
    return x, y, rho


def sample_batch(cfg, n, count=None):
    """Arrays ``(x, y, rho)`` for samples ``0 .. count-1`` of bucket ``n``."""
    if count is None:
        count = cfg.samples_per_bucket
    return _transform(cfg, n, _uniforms(cfg, n, 0, count))


def sample_point(n, m, cfg):
    """The ``m``-th sample of bucket ``n`` as a float triple."""
    if not 0 <= n < cfg.buckets or not 0 <= m < cfg.samples_per_bucket:
        raise IndexError(f"sample ({n}, {m}) outside the configured profile")
    x, y, rho = _transform(cfg, n, _uniforms(cfg, n, m, 1))
    return float(x[0]), float(y[0]), float(rho[0])


def nearest_rank(sorted_values, p):
    """Order statistic at index ``ceil(p M) - 1`` of an ascending sequence."""
    m = len(sorted_values)
    return sorted_values[max(0, math.ceil(p * m) - 1)]


def bucket_errors(cfg, n, evaluator=phi2):
    """Absolute errors for one bucket, with the samples that produced them.

    Samples with ``|rho| > 1`` (possible only under the uncorrected ``"paper"`` formula) are
    dropped and counted.
    """
    x, y, rho = sample_batch(cfg, n)
    keep = np.abs(rho) <= 1.0
    rejected = int(keep.size - keep.sum())
    x, y, rho = x[keep], y[keep], rho[keep]
    try:
        hi, lo = oracle_batch(x, y, rho, cfg.quadrature)
    except AccuracyError as exc:
        raise OracleFailure(n, str(exc)) from exc
    got = np.array([evaluator(a, b, r) for a, b, r in zip(x.tolist(), y.tolist(), rho.tolist())])
    err = np.abs((got - hi) - lo)
    return err, (x, y, rho), rejected


def profile_bucket(cfg, n, evaluator=phi2):
    err, (x, y, rho), rejected = bucket_errors(cfg, n, evaluator)
    if err.size == 0:
        nan = math.nan
        return BucketStats(n, cfg.center(n), nan, nan, (nan, nan, nan), rejected)
    if not np.all(np.isfinite(err)):
        raise OracleFailure(n, "non-finite error")
    i = int(np.argmax(err))  # first occurrence, so ties go to the lowest m
    q99 = float(nearest_rank(np.sort(err), 0.99))
    return BucketStats(
        n,
        cfg.center(n),
        q99,
        float(err[i]),
        (float(x[i]), float(y[i]), float(rho[i])),
        rejected,
    )


def _profile_task(args):
    cfg, n, evaluator = args
    return profile_bucket(cfg, n, evaluator)


def run_profile(cfg, buckets=None, workers=1, evaluator=phi2, progress=None):
    """One :class:`BucketStats` per bucket, sorted by ``n``.

    ``buckets`` restricts the run to a subset of bucket indices. With
    ``workers > 1`` buckets are spread over processes; the result does not
    depend on the worker count. ``evaluator`` must be picklable in that case.
    """
    ids = range(cfg.buckets) if buckets is None else sorted(set(buckets))
    for n in ids:
        if not 0 <= n < cfg.buckets:
            raise IndexError(f"bucket {n} outside 0..{cfg.buckets - 1}")
    tasks = [(cfg, n, evaluator) for n in ids]
    if workers <= 1:
        results = []
        for task in tasks:
            results.append(_profile_task(task))
            if progress:
                progress(results[-1])
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = []
            for stats in pool.map(_profile_task, tasks):
                results.append(stats)
                if progress:
                    progress(stats)
    return sorted(results, key=lambda s: s.n)


def global_max(stats):
    """Bucket holding the largest error (lowest ``n`` on ties)."""
    valid = [s for s in stats if not math.isnan(s.max_abs_err)]
    if not valid:
        raise ValueError("no bucket has any samples")
    return max(valid, key=lambda s: (s.max_abs_err, -s.n))


def local_peaks(stats, key="max_abs_err"):
    """Buckets whose error exceeds both neighbours."""
    vals = [getattr(s, key) for s in stats]
    peaks = []
    for i, s in enumerate(stats):
        left = vals[i - 1] if i else -math.inf
        right = vals[i + 1] if i + 1 < len(vals) else -math.inf
        if vals[i] > left and vals[i] > right:
            peaks.append(s)
    return peaks


def _fmt(v):
    return repr(float(v))


def _rows(stats):
    for s in stats:
        mx, my, mr = s.max_err_input
        yield [str(s.n), _fmt(s.x_center), _fmt(s.q99_abs_err), _fmt(s.max_abs_err),
               _fmt(mx), _fmt(my), _fmt(mr)]


def format_profile_csv(stats):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerows(_rows(stats))
    return buf.getvalue()


def write_profile_csv(stats, destination):
    """Write bucket statistics to a path or text stream.

    Floats are written as shortest round-trip reprs. Raises ``ValueError``
    on empty input without touching the destination.
    """
    stats = list(stats)
    if not stats:
        raise ValueError("no bucket statistics to write")
    text = format_profile_csv(stats)
    if hasattr(destination, "write"):
        destination.write(text)
        return
    path = Path(destination)
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write profile CSV to {os.fspath(path)}: {exc.strerror}",
                      os.fspath(path)) from exc


def read_profile_csv(source):
    """Inverse of :func:`write_profile_csv` (``rejected`` is not stored)."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = Path(source).read_text()
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != CSV_HEADER:
        raise ValueError(f"unexpected header {header!r}")
    out = []
    for row in reader:
        n, xc, q, m, mx, my, mr = row
        out.append(BucketStats(int(n), float(xc), float(q), float(m),
                               (float(mx), float(my), float(mr))))
    return out

"""Reference values of ``Phi2(x, y; rho)`` from two independent representations.

Plackett's correlation integral

    Phi2(x, y; rho) = Phi(x) Phi(y)
        + 1/(2 pi) * int_0^rho exp(-(x^2 - 2 t x y + y^2) / (2 (1 - t^2))) / sqrt(1 - t^2) dt

is integrated with compensated accumulation for ``|rho| <= 0.95``. Beyond,
the value is anchored at the closed form for ``rho = sign(rho)`` and only
the short range from ``rho`` to ``sign(rho)`` is integrated, over the angle
``phi`` with ``|t| = cos(phi)`` by a tanh-sinh rule; there ``1 - t^2 =
sin(phi)^2`` and ``1 - |t| = 2 sin(phi/2)^2`` carry no cancellation, and the
small size of the integral keeps its rounding noise small.

The tetrachoric series

    Phi2 = Phi(x) Phi(y) + phi(x) phi(y) * sum_k rho^(k+1)/(k+1) h_k(x) h_k(y),

with ``h_k = He_k / sqrt(k!)`` the normalized Hermite polynomials, is the
second route. It is stopped by a rigorous tail bound from Cramer's
inequality ``|h_k(x)| <= K exp(x^2 / 4)``.

Nothing here imports the fast evaluator; the two must stay independent.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import dd
from .dd import CompensatedValue
from .normal import cdf_dd
from .quadrature import place, rule, tanh_sinh

INV_2PI = (0.15915494309189535, -9.839338337591243e-18)
SPLIT = 0.95
ARC_FLOOR = 0.1
CRAMER_K = 1.0864348112133080
TETRACHORIC_RHO = 0.9
TETRACHORIC_X = 8.0
AGREEMENT = 1e-15
CHUNK_ELEMENTS = 1 << 16  # keeps temporaries cache-resident


class AccuracyError(ArithmeticError):
    """A reference evaluation could not certify its accuracy target."""


@dataclass(frozen=True)
class QuadratureSpec:
    node_count: int = 128
    scheme: str = "gauss_legendre"
    target_abs_error: float = 1e-17
    max_node_count: int = 4096

    def __post_init__(self):
        if self.node_count < 16:
            raise ValueError("node_count must be at least 16")
        if self.node_count % 2:
            raise ValueError("node_count must be even")
        if self.scheme not in ("gauss_legendre", "tanh_sinh"):
            raise ValueError(f"unknown scheme {self.scheme!r}")


DEFAULT_SPEC = QuadratureSpec()


def _as_arrays(*args):
    arrs = np.broadcast_arrays(*[np.asarray(a, dtype=float) for a in args])
    return [np.ascontiguousarray(a).ravel() for a in arrs]


def _product_term(x, y):
    xh, xl = cdf_dd(x)
    yh, yl = cdf_dd(y)
    return dd.mul(xh, xl, yh, yl)


def _main_segment(x, y, ph, pl, r, n, scheme):
    u, uc, w = rule(scheme, n)
    s = place(0.0, r[:, None], u, uc)
    weights = r[:, None] * w

    x2h, x2l = dd.two_prod(x, x)
    y2h, y2l = dd.two_prod(y, y)
    bh, bl = dd.add(x2h, x2l, y2h, y2l)

    # s is split once and shared by s*s and s*p
    s_hi, s_lo = dd.split(s)
    p_hi, p_lo = dd.split(ph)
    p_hi, p_lo = p_hi[:, None], p_lo[:, None]
    ph = ph[:, None]
    sp = s * ph
    spe = ((s_hi * p_hi - sp) + s_hi * p_lo + s_lo * p_hi) + s_lo * p_lo + s * pl[:, None]
    # numerator x^2 + y^2 - 2 s p >= 0.05 (x^2 + y^2) for s <= 0.95
    nh, nl = dd.add_sloppy(bh[:, None], bl[:, None], -2.0 * sp, -2.0 * spe)

    ss = s * s
    sse = ((s_hi * s_hi - ss) + 2.0 * s_hi * s_lo) + s_lo * s_lo
    dh, dl = dd.two_sum(1.0, -ss)
    dl = dl - sse
    qh, ql = dd.div_fast(nh, nl, 2.0 * dh, 2.0 * dl)
    f = np.exp(-qh) * (1.0 - ql) / np.sqrt(dh) * (1.0 - 0.5 * dl / dh)
    return dd.dot_rows(weights, f)


def _arc_pieces(x, y, p, lo, hi, n):
    u, uc, w = tanh_sinh(2 * n)
    _, _, w_coarse = tanh_sinh(n)
    phi = place(lo[:, None], hi[:, None], u, uc)
    width = (hi - lo)[:, None]

    sin_phi = np.sin(phi)
    half = np.sin(0.5 * phi)
    d = np.abs(x) - np.abs(y)
    pos = (p > 0.0)[:, None]
    num = np.where(
        pos,
        (d * d)[:, None] + 4.0 * p[:, None] * half * half,
        (x * x + y * y)[:, None] - 2.0 * p[:, None] * np.cos(phi),
    )
    with np.errstate(invalid="ignore", divide="ignore"):
        g = np.exp(-num / (2.0 * sin_phi * sin_phi))
    # a piece of zero width (x = y = 0) has phi = 0 nodes; its weights vanish
    g = np.where(width > 0.0, g, 0.0)
    coarse = dd.dot_rows(width * w_coarse, g[:, ::2])
    fine = dd.dot_rows(width * w, g)
    return coarse, fine


def _arc_segment(x, y, p, r, n):
    """Integral over ``|t|`` from ``r`` to 1 as an angle integral on ``[0, acos(r)]``.

    Returns the ``n``- and ``2n``-step tanh-sinh values; the finer grid
    contains the coarser one, so the integrand is evaluated once. The
    integrand switches on near ``phi* = (|x| -+ |y|) / sqrt(2)``, which can
    sit inside the interval when ``|x| ~ |y|``; the interval is split there
    so that each piece sees the switch at an endpoint.
    """
    # 1 - r is exact for r > 0.5
    hi = 2.0 * np.arcsin(np.sqrt(0.5 * (1.0 - r)))
    d = np.abs(np.where(p > 0.0, np.abs(x) - np.abs(y), np.abs(x) + np.abs(y)))
    mid = np.minimum(d * np.sqrt(0.5), hi)
    # the numerator is at least cos(phi) d^2 >= 0.95 d^2, so below ARC_FLOOR * d
    # the integrand is under exp(-45) and the dropped piece under 1e-20
    lo = np.minimum(ARC_FLOOR * d, mid)
    (ch, cl), (fh, fl) = _arc_pieces(x, y, p, lo, mid, n)
    (dh, dl), (eh, el) = _arc_pieces(x, y, p, mid, hi, n)
    return dd.add(ch, cl, dh, dl), dd.add(fh, fl, eh, el)


def plackett_pair(x, y, rho, n, scheme="gauss_legendre"):
    """Correlation integral at ``n`` and ``2n`` nodes.

    For ``|rho| <= 0.95`` this is ``int_0^|rho|`` of the Plackett integrand
    (with ``x y`` signed by ``rho``) by the chosen rule; beyond, it is the
    arc integral from ``|rho|`` to 1 by tanh-sinh. Arrays of equal length,
    ``|rho| < 1``. Returns two double-double pairs.
    """
    ch_out, cl_out = np.zeros_like(x), np.zeros_like(x)
    fh_out, fl_out = np.zeros_like(x), np.zeros_like(x)
    ph, pl = dd.two_prod(x, y)
    sign = np.where(rho < 0.0, -1.0, 1.0)
    ph, pl = sign * ph, sign * pl
    r = np.abs(rho)

    near = np.flatnonzero(r <= SPLIT)
    step = max(1, CHUNK_ELEMENTS // (2 * n))
    for start in range(0, near.size, step):
        idx = near[start : start + step]
        args = (x[idx], y[idx], ph[idx], pl[idx], r[idx])
        # Gauss-Legendre rules are not nested, so both levels are evaluated
        ch, cl = _main_segment(*args, n, scheme)
        fh, fl = _main_segment(*args, 2 * n, scheme)
        ch_out[idx], cl_out[idx] = ch, cl
        fh_out[idx], fl_out[idx] = fh, fl

    far = np.flatnonzero(r > SPLIT)
    step = max(1, CHUNK_ELEMENTS // (4 * n + 2))
    for start in range(0, far.size, step):
        idx = far[start : start + step]
        (ch, cl), (fh, fl) = _arc_segment(x[idx], y[idx], ph[idx], r[idx], n)
        ch_out[idx], cl_out[idx] = ch, cl
        fh_out[idx], fl_out[idx] = fh, fl
    return (ch_out, cl_out), (fh_out, fl_out)


def _endpoint(x, y, rho):
    """Closed forms at ``rho = +1`` (``Phi(min(x, y))``) and ``rho = -1``
    (``max(0, Phi(x) - Phi(-y))``), by the sign of ``rho``."""
    xh, xl = cdf_dd(x)
    yh, yl = cdf_dd(y)
    first = x <= y
    mh = np.where(first, xh, yh)
    ml = np.where(first, xl, yl)
    nh, nl = cdf_dd(-y)
    sh, sl = dd.add(xh, xl, -nh, -nl)
    neg = sh < 0.0
    sh = np.where(neg, 0.0, sh)
    sl = np.where(neg, 0.0, sl)
    upper = rho > 0.0
    return np.where(upper, mh, sh), np.where(upper, ml, sl)


def _assemble(x, y, rho, ih, il):
    # near: Phi(x) Phi(y) + sign * I / (2 pi); far: endpoint - sign * I / (2 pi)
    far = np.abs(rho) > SPLIT
    sign = np.where(rho < 0.0, -1.0, 1.0) * np.where(far, -1.0, 1.0)
    ch, cl = dd.mul(ih, il, *INV_2PI)
    bh, bl = np.empty_like(x), np.empty_like(x)
    if far.any():
        bh[far], bl[far] = _endpoint(x[far], y[far], rho[far])
    if not far.all():
        bh[~far], bl[~far] = _product_term(x[~far], y[~far])
    return dd.add(bh, bl, sign * ch, sign * cl)


def plackett_fixed(x, y, rho, n, scheme="gauss_legendre"):
    """Plackett value at a fixed node count, no convergence check."""
    x, y, rho = _as_arrays(x, y, rho)
    (ih, il), _ = plackett_pair(x, y, rho, n, scheme)
    return _assemble(x, y, rho, ih, il)


def doubling_estimate(x, y, rho, n=128, scheme="gauss_legendre"):
    """``|I(n) - I(2n)| / (2 pi)`` per row, with no escalation."""
    x, y, rho = _as_arrays(x, y, rho)
    (ch, cl), (fh, fl) = plackett_pair(x, y, rho, n, scheme)
    return np.abs((ch - fh) + (cl - fl)) * INV_2PI[0]


def plackett_batch(x, y, rho, spec=DEFAULT_SPEC):
    """Plackett values with node-doubling certification.

    Returns ``(hi, lo, estimate)`` where ``estimate`` is ``|I(N) - I(2N)| / (2 pi)``
    at the finest pair used. Rows whose estimate exceeds the target are
    refined by doubling up to ``spec.max_node_count``; if any still fail,
    :class:`AccuracyError` is raised.
    """
    x, y, rho = _as_arrays(x, y, rho)
    if np.any(np.abs(rho) >= 1.0):
        raise ValueError("plackett_batch requires |rho| < 1")
    n = spec.node_count
    coarse, (ih, il) = plackett_pair(x, y, rho, n, spec.scheme)
    est = np.abs((coarse[0] - ih) + (coarse[1] - il)) * INV_2PI[0]
    bad = np.flatnonzero(est > spec.target_abs_error)
    while bad.size and 4 * n <= spec.max_node_count:
        n *= 2
        (ch, cl), (nh, nl) = plackett_pair(x[bad], y[bad], rho[bad], n, spec.scheme)
        est[bad] = np.abs((ch - nh) + (cl - nl)) * INV_2PI[0]
        ih[bad], il[bad] = nh, nl
        bad = bad[est[bad] > spec.target_abs_error]
    if bad.size:
        i = bad[0]
        raise AccuracyError(
            f"Plackett integral not converged at (x={x[i]!r}, y={y[i]!r}, rho={rho[i]!r}):"
            f" node-doubling estimate {est[i]:.3e} > {spec.target_abs_error:.1e}"
        )
    h, l = _assemble(x, y, rho, ih, il)
    return h, l, est


def phi2_plackett(x, y, rho, spec=DEFAULT_SPEC):
    """Scalar Plackett reference value as a :class:`CompensatedValue`."""
    h, l, _ = plackett_batch([x], [y], [rho], spec)
    return CompensatedValue(float(h[0]), float(l[0]))


def tetrachoric_batch(x, y, rho, max_terms=2000, tol=1e-20):
    """Tetrachoric-series values for ``|rho| <= 0.9`` and ``|x|, |y| <= 8``.

    Terms are added until Cramer's bound on the remaining tail, in units of
    the final result, is at most ``tol``. Raises :class:`AccuracyError` if
    ``max_terms`` is reached first.
    """
    x, y, rho = _as_arrays(x, y, rho)
    if np.any(np.abs(rho) > TETRACHORIC_RHO) or np.any(np.abs(x) > TETRACHORIC_X) or np.any(
        np.abs(y) > TETRACHORIC_X
    ):
        raise ValueError("tetrachoric series needs |rho| <= 0.9 and |x|, |y| <= 8")
    r = np.abs(rho)
    scale = CRAMER_K**2 * np.exp(-0.25 * (x * x + y * y)) * INV_2PI[0] / (1.0 - r)

    acc = dd.Accumulator(x.shape)
    hx_prev, hx = np.zeros_like(x), np.ones_like(x)
    hy_prev, hy = np.zeros_like(y), np.ones_like(y)
    power = rho.copy()  # rho^(k+1)
    tail_power = r * r  # |rho|^(k+2)
    active = np.ones(x.shape, dtype=bool)
    for k in range(max_terms):
        term = power / (k + 1) * hx * hy
        acc.add(np.where(active, term, 0.0))
        active &= scale * tail_power / (k + 2) > tol
        if not active.any():
            break
        c0 = math.sqrt(k) if k else 0.0
        c1 = math.sqrt(k + 1)
        hx_prev, hx = hx, (x * hx - c0 * hx_prev) / c1
        hy_prev, hy = hy, (y * hy - c0 * hy_prev) / c1
        power = power * rho
        tail_power = tail_power * r
    else:
        i = int(np.flatnonzero(active)[0])
        raise AccuracyError(
            f"tetrachoric series not converged in {max_terms} terms at"
            f" (x={x[i]!r}, y={y[i]!r}, rho={rho[i]!r})"
        )

    x2h, x2l = dd.two_prod(x, x)
    y2h, y2l = dd.two_prod(y, y)
    eh, el = dd.add(x2h, x2l, y2h, y2l)
    dens = np.exp(-0.5 * eh) * (1.0 - 0.5 * el)
    ch, cl = dd.mul_d(*INV_2PI, dens)
    sh, sl = dd.mul(ch, cl, acc.hi, acc.lo)
    ph, pl = _product_term(x, y)
    return dd.add(ph, pl, sh, sl)


def phi2_tetrachoric(x, y, rho, max_terms=2000):
    """Scalar tetrachoric reference value as a :class:`CompensatedValue`."""
    h, l = tetrachoric_batch([x], [y], [rho], max_terms)
    return CompensatedValue(float(h[0]), float(l[0]))


def oracle_batch(x, y, rho, spec=DEFAULT_SPEC):
    """Reference ``Phi2`` for arrays of finite ``x, y`` and ``rho`` in ``[-1, 1]``.

    Returns double-double ``(hi, lo)``. Interior points use the certified
    Plackett integral; where the tetrachoric series applies it is evaluated
    too, and a disagreement above ``1e-15`` raises :class:`AccuracyError`.
    """
    x, y, rho = _as_arrays(x, y, rho)
    if np.any(np.abs(rho) > 1.0) or np.any(np.isnan(rho)):
        raise ValueError("rho must lie in [-1, 1]")
    hi = np.empty_like(x)
    lo = np.empty_like(x)

    ends = (1.0 - rho) * (1.0 + rho) <= 0.0
    if ends.any():
        hi[ends], lo[ends] = _endpoint(x[ends], y[ends], rho[ends])

    inner = np.flatnonzero(~ends)
    if inner.size:
        xi, yi, ri = x[inner], y[inner], rho[inner]
        ph, pl, _ = plackett_batch(xi, yi, ri, spec)
        hi[inner], lo[inner] = ph, pl
        both = (
            (np.abs(ri) <= TETRACHORIC_RHO)
            & (np.abs(xi) <= TETRACHORIC_X)
            & (np.abs(yi) <= TETRACHORIC_X)
        )
        if both.any():
            th, tl = tetrachoric_batch(xi[both], yi[both], ri[both])
            gap = np.abs((ph[both] - th) + (pl[both] - tl))
            if np.any(gap > AGREEMENT):
                j = int(np.argmax(gap))
                raise AccuracyError(
                    f"oracle methods disagree by {gap[j]:.3e} at"
                    f" (x={xi[both][j]!r}, y={yi[both][j]!r}, rho={ri[both][j]!r})"
                )
    return hi, lo


def oracle_dd(x, y, rho, spec=DEFAULT_SPEC):
    """Scalar reference value as a :class:`CompensatedValue`; handles infinite arguments."""
    if math.isnan(x) or math.isnan(y) or math.isnan(rho):
        raise ValueError("oracle needs non-NaN arguments")
    if x == -math.inf or y == -math.inf:
        return CompensatedValue(0.0)
    if x == math.inf or y == math.inf:
        h, l = cdf_dd(np.array([y if x == math.inf else x]))
        if x == math.inf and y == math.inf:
            return CompensatedValue(1.0)
        return CompensatedValue(float(h[0]), float(l[0]))
    h, l = oracle_batch([x], [y], [rho], spec)
    return CompensatedValue(float(h[0]), float(l[0]))


def oracle(x, y, rho, spec=DEFAULT_SPEC):
    """Reference ``Phi2(x, y; rho)`` rounded to double."""
    return float(oracle_dd(x, y, rho, spec))

"""Quadrature rules on the unit interval.

Every rule is returned as ``(u, uc, w)``: nodes ``u`` in ``(0, 1)``, their
complements ``uc = 1 - u`` computed without cancellation (so nodes that
crowd an endpoint can be placed accurately on any interval), and weights
``w`` summing to one. Rules are cached per size; a racing first call at
worst builds the same arrays twice.
"""

import functools
import math

import numpy as np

from . import dd

TANH_SINH_WINDOW = 3.5


def legendre_roots(n, tol=1e-15, max_iter=100):
    """Roots of the Legendre polynomial ``P_n`` and Gauss weights on ``[-1, 1]``.

    Newton iteration from Tricomi-style starting points, with ``P_n`` and
    ``P_{n-1}`` from the three-term recurrence. Roots are returned ascending.
    """
    if n < 1:
        raise ValueError("n must be positive")
    i = np.arange(1, n + 1)
    x = np.cos(np.pi * (i - 0.25) / (n + 0.5))
    for it in range(max_iter):
        p, q = _legendre_pair(n, x)
        dp = n * (x * p - q) / ((x - 1.0) * (x + 1.0))
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) < tol:
            break
    else:
        raise RuntimeError(f"Legendre root iteration did not converge for n={n}")
    # weights from a double-double evaluation at the converged node,
    # corrected to first order towards the exact root
    ph, pl, qh, ql = _legendre_pair_dd(n, x)
    sh, sl = dd.two_prod(x, x)
    oh, ol = dd.add_d(-sh, -sl, 1.0)  # 1 - x^2
    th, tl = dd.mul_d(ph, pl, x)
    th, tl = dd.add(th, tl, -qh, -ql)
    th, tl = dd.mul_d(th, tl, -float(n))
    dph, dpl = dd.div(th, tl, oh, ol)  # P_n'(x)
    delta = ph / dph
    wh, wl = dd.mul(dph, dpl, dph, dpl)
    wh, wl = dd.mul(wh, wl, oh, ol)
    wh, wl = dd.div(np.full_like(x, 2.0), np.zeros_like(x), wh, wl)
    w = wh + (wl + wh * (2.0 * x * delta / oh))
    order = np.argsort(x)
    return x[order], w[order]


def _legendre_pair_dd(n, x):
    zero = np.zeros_like(x)
    p0h, p0l = np.ones_like(x), zero
    p1h, p1l = x.copy(), zero
    if n == 1:
        return p1h, p1l, p0h, p0l
    for k in range(2, n + 1):
        th, tl = dd.mul_d(p1h, p1l, x)
        th, tl = dd.mul_d(th, tl, float(2 * k - 1))
        uh, ul = dd.mul_d(p0h, p0l, float(k - 1))
        th, tl = dd.add(th, tl, -uh, -ul)
        th, tl = dd.div_d(th, tl, float(k))
        p0h, p0l, p1h, p1l = p1h, p1l, th, tl
    return p1h, p1l, p0h, p0l


def _legendre_pair(n, x):
    p0 = np.ones_like(x)
    p1 = x.copy()
    if n == 1:
        return p1, p0
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    return p1, p0


@functools.lru_cache(maxsize=None)
def gauss_legendre(n):
    x, w = legendre_roots(n)
    u = 0.5 * (1.0 + x)
    uc = 0.5 * (1.0 - x)
    return _frozen(u, uc, 0.5 * w)


@functools.lru_cache(maxsize=None)
def tanh_sinh(n, window=TANH_SINH_WINDOW):
    """Double-exponential rule with ``n + 1`` points, step ``2 * window / n``."""
    if n < 2 or n % 2:
        raise ValueError("tanh-sinh node count must be even and >= 2")
    h = 2.0 * window / n
    t = h * np.arange(-(n // 2), n // 2 + 1)
    v = 0.5 * math.pi * np.sinh(t)
    u = 1.0 / (1.0 + np.exp(-2.0 * v))
    uc = 1.0 / (1.0 + np.exp(2.0 * v))
    w = h * 0.25 * math.pi * np.cosh(t) / np.cosh(v) ** 2
    return _frozen(u, uc, w)


def rule(scheme, n):
    if scheme == "gauss_legendre":
        return gauss_legendre(n)
    if scheme == "tanh_sinh":
        return tanh_sinh(n)
    raise ValueError(f"unknown quadrature scheme {scheme!r}")


def place(a, b, u, uc):
    """Map unit-interval nodes onto ``[a, b]`` (broadcasting), measuring
    each node from its nearer endpoint."""
    width = b - a
    return np.where(u <= 0.5, a + width * u, b - width * uc)


def _frozen(*arrays):
    for arr in arrays:
        arr.setflags(write=False)
    return arrays

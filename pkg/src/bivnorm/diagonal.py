"""Bivariate normal CDF on the diagonal, ``Phi2(x, x; rho)`` for ``x <= 0``, ``rho >= 0``.

The value is written as the upper bound ``(1 + rho) Phi(x) Phi(lambda x)``
minus a deficit ``D(x)`` times the diagonal density. ``D`` is expanded in a
Taylor series around zero whose coefficients follow three coupled two-step
recursions (one pair driven by the derivatives of Mills' ratio at zero).
The correlation enters as ``a = 1 - rho`` so callers that already hold
``1 - rho`` never form ``1 - (1 - a)``.
"""

import math
import threading
from dataclasses import dataclass
from typing import NamedTuple

# Fixed literals, kept as written rather than recomputed from math constants.
SQRT_PI_2 = 1.25331413731550025
TWO_OVER_PI = 6.36619772367581343e-001
PI_2 = 1.57079632679489662
INV_2PI = 1.591549430918953358e-001

EARLY_EXIT = 5e-17
ASIN_CUTOFF = 0.1
MAX_ITERATIONS = 512

_cap_lock = threading.Lock()
_cap_hits = 0


def cap_hits():
    """Number of evaluations that stopped at ``MAX_ITERATIONS``."""
    return _cap_hits


def _record_cap_hit():
    global _cap_hits
    with _cap_lock:
        _cap_hits += 1


class DiagonalInput(NamedTuple):
    x: float  # <= 0
    a: float  # 1 - rho, in [0, 1]
    px: float  # Phi(x)
    pxs: float  # Phi(lambda(rho) * x)


class DiagonalTrace(NamedTuple):
    value: float
    raw: float
    lower: float
    upper: float
    iterations: int
    early_exit: bool


def arcsin_stable(a, sqrt_ab=None):
    """``arcsin(1 - a)`` for ``0 <= a <= 1``.

    Near ``rho = 1 - a -> 1`` the arcsine is ill-conditioned, so for
    ``a <= 0.1`` it is taken as ``arccos(sqrt(a (2 - a)))`` instead.
    """
    if a > ASIN_CUTOFF:
        return math.asin(1.0 - a)
    if sqrt_ab is None:
        sqrt_ab = math.sqrt(a * (2.0 - a))
    return math.acos(sqrt_ab)


def diagonal_bounds(rho, px, pxs):
    """Lower and upper bound of ``Phi2(x, x; rho)`` given ``Phi(x)`` and ``Phi(lambda x)``.

    ``(1 + 2/pi asin(rho)) px pxs <= Phi2 <= (1 + rho) px pxs``.
    """
    a = 1.0 - rho
    comp = px * pxs
    asr = arcsin_stable(a)
    return (1.0 + TWO_OVER_PI * asr) * comp, (2.0 - a) * comp


@dataclass
class RecursionState:
    """Step-by-step view of the series for ``D``; mirrors the loop in
    :func:`phi2_diagonal` and exists for inspection and tests."""

    a_even: float
    a_odd: float
    b_even: float
    b_odd: float
    d_even: float
    d_odd: float
    a_coeff: float
    b_coeff: float
    d_coeff: float
    k: int = 2
    partial_sum: float = 0.0

    @classmethod
    def start(cls, x, a):
        b = 2.0 - a
        sqrt_ab = math.sqrt(a * b)
        asr = arcsin_stable(a, sqrt_ab)
        xx = x * x
        tmp = SQRT_PI_2 * x
        a_coeff = a * xx / b
        state = cls(
            a_even=-tmp * a,
            a_odd=-sqrt_ab * a_coeff,
            b_even=tmp * sqrt_ab,
            b_odd=sqrt_ab * xx,
            d_even=(1.0 - a) * PI_2 - asr,
            d_odd=tmp * (sqrt_ab - a),
            a_coeff=a_coeff,
            b_coeff=xx,
            d_coeff=2.0 * xx / b,
        )
        state.partial_sum = state.d_even + state.d_odd
        return state

    def advance(self):
        """Compute the next even/odd pair and add their bracketed sum.

        Returns True while the partial sum still changes.
        """
        k = self.k
        self.d_even = (self.a_odd + self.b_odd + self.d_coeff * self.d_even) / k
        self.a_even *= self.a_coeff / k
        self.b_even *= self.b_coeff / k
        k += 1
        self.a_odd *= self.a_coeff / k
        self.b_odd *= self.b_coeff / k
        self.d_odd = (self.a_even + self.b_even + self.d_coeff * self.d_odd) / k
        self.k = k + 1
        old = self.partial_sum
        self.partial_sum = old + (self.d_even + self.d_odd)
        return self.partial_sum != old


def diagonal_trace(x, a, px, pxs):
    """Evaluate ``Phi2(x, x; 1 - a)`` and keep the intermediate quantities.

    ``raw`` is the series value before clamping against the lower bound.
    Degenerate ``a <= 0`` and ``a >= 1`` return with zero iterations.
    """
    if x != x or a != a:
        nan = math.nan
        return DiagonalTrace(nan, nan, nan, nan, 0, False)
    if a <= 0.0:
        return DiagonalTrace(px, px, px, px, 0, False)
    if a >= 1.0:
        v = px * px
        return DiagonalTrace(v, v, v, v, 0, False)

    b = 2.0 - a
    sqrt_ab = math.sqrt(a * b)
    asr = math.asin(1.0 - a) if a > ASIN_CUTOFF else math.acos(sqrt_ab)
    comp = px * pxs
    lower = (1.0 + TWO_OVER_PI * asr) * comp
    upper = b * comp
    if comp * (1.0 - a - TWO_OVER_PI * asr) < EARLY_EXIT:
        return DiagonalTrace(upper, upper, lower, upper, 0, True)

    xx = x * x
    tmp = SQRT_PI_2 * x
    a_coeff = a * xx / b
    a_even = -tmp * a
    a_odd = -sqrt_ab * a_coeff
    b_coeff = xx
    b_even = tmp * sqrt_ab
    b_odd = sqrt_ab * b_coeff
    d_coeff = 2.0 * xx / b
    d_even = (1.0 - a) * PI_2 - asr
    d_odd = tmp * (sqrt_ab - a)

    res = 0.0
    res_new = d_even + d_odd
    k = 2
    n = 0
    while res != res_new:
        if n == MAX_ITERATIONS:
            _record_cap_hit()
            res = res_new
            break
        d_even = (a_odd + b_odd + d_coeff * d_even) / k
        a_even *= a_coeff / k
        b_even *= b_coeff / k
        k += 1
        a_odd *= a_coeff / k
        b_odd *= b_coeff / k
        d_odd = (a_even + b_even + d_coeff * d_odd) / k
        k += 1
        res = res_new
        res_new += d_even + d_odd
        n += 1
    res *= math.exp(-xx / b) * INV_2PI
    raw = upper - max(0.0, res)
    return DiagonalTrace(max(lower, raw), raw, lower, upper, n, False)


def phi2_diagonal(x, a, px, pxs):
    """``Phi2(x, x; rho)`` for ``x <= 0`` and ``a = 1 - rho`` in ``[0, 1]``.

    ``px`` and ``pxs`` must be ``Phi(x)`` and ``Phi(lambda(rho) x)`` with
    ``lambda(rho) = sqrt((1 - rho) / (1 + rho))``; they are not checked.
    The result is clamped to the interval from :func:`diagonal_bounds`.
    """
    return diagonal_trace(x, a, px, pxs).value

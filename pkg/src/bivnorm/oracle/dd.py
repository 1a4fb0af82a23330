"""Double-double arithmetic on numpy arrays (or plain floats).

A value is carried as an unevaluated pair ``(hi, lo)`` with
``|lo| <= ulp(hi) / 2``. All kernels are branch-free so they vectorize;
they assume round-to-nearest and no overflow in the splitting step.
"""

from dataclasses import dataclass

import numpy as np

_SPLITTER = 134217729.0  # 2**27 + 1


@dataclass(frozen=True)
class CompensatedValue:
    hi: float
    lo: float = 0.0

    @classmethod
    def normalized(cls, hi, lo=0.0):
        s, e = quick_two_sum(float(hi), float(lo))
        return cls(float(s), float(e))

    def __float__(self):
        return self.hi + self.lo


def two_sum(a, b):
    """Error-free ``a + b = s + e``."""
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


def quick_two_sum(a, b):
    """Error-free ``a + b = s + e`` assuming ``|a| >= |b|``."""
    s = a + b
    e = b - (s - a)
    return s, e


def split(a):
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


def two_prod(a, b):
    """Error-free ``a * b = p + e`` (Dekker)."""
    p = a * b
    ah, al = split(a)
    bh, bl = split(b)
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def add(ah, al, bh, bl):
    s, e = two_sum(ah, bh)
    t, f = two_sum(al, bl)
    e = e + t
    s, e = quick_two_sum(s, e)
    e = e + f
    return quick_two_sum(s, e)


def add_sloppy(ah, al, bh, bl):
    """Cheaper addition; accurate unless ``a`` and ``b`` nearly cancel."""
    s, e = two_sum(ah, bh)
    e = e + (al + bl)
    return quick_two_sum(s, e)


def add_d(ah, al, b):
    s, e = two_sum(ah, b)
    e = e + al
    return quick_two_sum(s, e)


def mul(ah, al, bh, bl):
    p, e = two_prod(ah, bh)
    e = e + (ah * bl + al * bh)
    return quick_two_sum(p, e)


def mul_d(ah, al, b):
    p, e = two_prod(ah, b)
    e = e + al * b
    return quick_two_sum(p, e)


def div(ah, al, bh, bl):
    q1 = ah / bh
    ph, pl = mul_d(bh, bl, q1)
    rh, rl = add(ah, al, -ph, -pl)
    q2 = rh / bh
    ph, pl = mul_d(bh, bl, q2)
    rh, rl = add(rh, rl, -ph, -pl)
    q3 = rh / bh
    q1, q2 = quick_two_sum(q1, q2)
    return add_d(q1, q2, q3)


def div_fast(ah, al, bh, bl):
    """Quotient with a single correction step; relative error about 1e-30."""
    q = ah / bh
    p, e = two_prod(q, bh)
    c = (((ah - p) - e) + al - q * bl) / bh
    return quick_two_sum(q, c)


def div_d(ah, al, b):
    return div(ah, al, b, 0.0 * b)


def sqrt(ah, al):
    s = np.sqrt(ah)
    ph, pl = two_prod(s, s)
    rh, rl = add(ah, al, -ph, -pl)
    with np.errstate(invalid="ignore", divide="ignore"):
        c = np.where(s > 0.0, rh / (2.0 * s), 0.0)
    return quick_two_sum(s, c)


def row_sum(h, l):
    """Double-double sum along the last axis by pairwise reduction.

    Only the leading parts go through ``two_sum``; the trailing parts and
    rounding errors are summed in plain arithmetic, which costs a relative
    error of order ``eps**2 * log2(n)``.
    """
    while h.shape[-1] > 1:
        if h.shape[-1] % 2:
            pad = [(0, 0)] * (h.ndim - 1) + [(0, 1)]
            h = np.pad(h, pad)
            l = np.pad(l, pad)
        s, e = two_sum(h[..., ::2], h[..., 1::2])
        h, l = s, l[..., ::2] + l[..., 1::2] + e
    return quick_two_sum(h[..., 0], l[..., 0])


def dot_rows(w, v):
    """Compensated row-wise ``sum(w * v)`` for 2-D arrays."""
    p, e = two_prod(w, v)
    return row_sum(p, e)


class Accumulator:
    """Running double-double sum over a sequence of array-valued terms."""

    def __init__(self, shape=()):
        self.hi = np.zeros(shape)
        self.lo = np.zeros(shape)

    def add(self, h, l=0.0):
        self.hi, self.lo = add(self.hi, self.lo, h, l)

    def add_product(self, a, b):
        p, e = two_prod(a, b)
        self.hi, self.lo = add(self.hi, self.lo, p, e)

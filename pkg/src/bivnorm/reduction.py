"""General ``Phi2(x, y; rho)`` by reduction to two diagonal evaluations.

Each argument is first moved onto its axis (``Phi2(x, 0; rho_x)``), and each
axis value onto the diagonal with correlation ``1 - 2 rho_x**2``. For
``|rho| > 0.99`` the squared slope ``a_x`` and the transformed abscissa are
built from ``x - y`` (``rho -> 1``) or ``x + y`` (``rho -> -1``) to avoid
catastrophic cancellation.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

from .diagonal import phi2_diagonal
from .univariate import cdf

RHO_BRANCH = 0.99
RHO_SLACK = 1e-12


class DomainError(ValueError):
    """Correlation outside ``[-1, 1]``."""


@dataclass(frozen=True)
class Correlation:
    rho: float
    one_minus: float
    one_plus: float
    s: float  # sqrt(1 - rho**2)

    @classmethod
    def from_rho(cls, rho):
        if not -1.0 - RHO_SLACK <= rho <= 1.0 + RHO_SLACK:
            raise DomainError(f"correlation {rho!r} outside [-1, 1]")
        one_minus = 1.0 - rho
        one_plus = 1.0 + rho
        return cls(rho, one_minus, one_plus, math.sqrt(max(0.0, one_minus * one_plus)))

    @property
    def lam(self):
        return math.sqrt(self.one_minus / self.one_plus)


class ReductionTerms(NamedTuple):
    a_x: float
    b1: float
    b2: float
    c1: bool
    c2: bool
    c3: bool


def reduction_terms(x, y, rho, s=None):
    """Squared slope, diagonal abscissas and sign selectors for one axis term.

    Requires ``x != 0`` and ``|rho| < 1``.
    """
    if s is None:
        s = math.sqrt((1.0 - rho) * (1.0 + rho))
    b1 = -abs(x)
    if rho > RHO_BRANCH:
        tmp = math.sqrt((1.0 - rho) / (1.0 + rho))
        b2 = -abs((x - y) / s - x * tmp)
        u = (x - y) / x / s - tmp
        a = u * u
    elif rho < -RHO_BRANCH:
        tmp = math.sqrt((1.0 + rho) / (1.0 - rho))
        b2 = -abs((x + y) / s - x * tmp)
        u = (x + y) / x / s - tmp
        a = u * u
    else:
        b2 = -abs(rho * x - y) / s
        u = b2 / x
        a = u * u
    c1 = y / x >= rho
    c2 = x < 0.0
    c3 = c2 and y >= 0.0
    return ReductionTerms(a, b1, b2, c1, c2, c3)


def phi2_half(x, y, rho, s=None):
    """``Phi2(x, 0; rho_x) - delta_x``; adding the swapped call gives ``Phi2(x, y; rho)``.

    ``rho_x`` is the correlation that moves ``(x, y)`` onto the ``x``-axis and
    ``delta_x`` is 1/2 when ``x < 0 <= y``, else 0. Requires ``|rho| < 1``.
    """
    if x == 0.0:
        return 0.0 if y >= 0.0 else 0.5
    a, b1, b2, c1, c2, c3 = reduction_terms(x, y, rho, s)

    p1 = cdf(b1)
    p2 = cdf(b2)
    if a <= 1.0:
        q = 0.5 * phi2_diagonal(b1, 2.0 * a / (1.0 + a), p1, p2)
    else:
        q = p1 * p2 - 0.5 * phi2_diagonal(b2, 2.0 / (1.0 + a), p2, p1)

    if c1 and c3:
        return q - 0.5
    if c1 and c2:
        return q
    if c1:
        return 0.5 - p1 + q
    if c3:
        return p1 - q - 0.5
    if c2:
        return p1 - q
    return 0.5 - q


def phi2(x, y, rho):
    """Bivariate standard normal CDF ``P(X <= x, Y <= y)`` with correlation ``rho``.

    Absolute error is near double precision. Raises :class:`DomainError` if
    ``rho`` lies outside ``[-1, 1]`` by more than ``1e-12``; NaN propagates.
    """
    if x != x or y != y or rho != rho:
        return math.nan
    if not -1.0 - RHO_SLACK <= rho <= 1.0 + RHO_SLACK:
        raise DomainError(f"correlation {rho!r} outside [-1, 1]")
    if math.isinf(x) or math.isinf(y):
        if x == -math.inf or y == -math.inf:
            return 0.0
        if x == math.inf:
            return cdf(y)
        return cdf(x)

    ss = (1.0 - rho) * (1.0 + rho)
    if ss <= 0.0:
        if rho > 0.0:
            return cdf(min(x, y))
        return max(0.0, min(1.0, cdf(x) + cdf(y) - 1.0))

    if x == 0.0 and y == 0.0:
        if rho > 0.0:
            return phi2_diagonal(0.0, 1.0 - rho, 0.5, 0.5)
        return 0.5 - phi2_diagonal(0.0, 1.0 + rho, 0.5, 0.5)

    s = math.sqrt(ss)
    return max(0.0, min(1.0, phi2_half(x, y, rho, s) + phi2_half(y, x, rho, s)))

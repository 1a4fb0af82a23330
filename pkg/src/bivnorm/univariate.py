"""Standard normal density and distribution function.

``cdf`` is a hybrid: Marsaglia's Taylor series of ``Phi(x) - 1/2`` around
zero for ``|x| <= 0.5`` and the complementary error function outside.
"""

import math

INV_SQRT_2PI = 0.398942280401432677940  # 1/sqrt(2 pi)
SQRT_PI_2 = 1.25331413731550025121  # sqrt(pi/2) = R(0), Mills' ratio at zero
INV_SQRT2 = 0.707106781186547524401

SERIES_CUTOFF = 0.5
SATURATION = 40.0


def density(x):
    """Standard normal density ``exp(-x**2/2) / sqrt(2 pi)``."""
    return INV_SQRT_2PI * math.exp(-0.5 * x * x)


def _series(x):
    # x + x^3/3 + x^5/(3*5) + ... ; all terms share the sign of x
    q = x * x
    term = x
    total = x
    old = 0.0
    i = 1
    while total != old:
        old = total
        i += 2
        term *= q / i
        total += term
    return total


def cdf(x):
    """Standard normal distribution function ``Phi(x)``.

    Absolute error stays below ``2e-16`` on ``[-40, 40]``; beyond that the
    result saturates to exactly 0 or 1. NaN propagates.
    """
    if x != x:
        return x
    if x < -SATURATION:
        return 0.0
    if x > SATURATION:
        return 1.0
    if -SERIES_CUTOFF <= x <= SERIES_CUTOFF:
        return 0.5 + density(x) * _series(x)
    if x < 0.0:
        return 0.5 * math.erfc(-x * INV_SQRT2)
    return 1.0 - 0.5 * math.erfc(x * INV_SQRT2)

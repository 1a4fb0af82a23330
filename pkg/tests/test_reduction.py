import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bivnorm.oracle import oracle_batch
from bivnorm.reduction import Correlation, DomainError, phi2, phi2_half, reduction_terms
from bivnorm.univariate import cdf

from conftest import err, mp_phi2

coord = st.floats(-10.0, 10.0, allow_nan=False)
corr = st.floats(-1.0, 1.0, allow_nan=False)
inner_corr = st.floats(-0.999999, 0.999999, allow_nan=False)


def test_half_at_zero_abscissa():
    assert phi2_half(0.0, 1.0, 0.3) == 0.0
    assert phi2_half(0.0, -1.0, 0.3) == 0.5


def test_half_contributions_on_the_diagonal():
    h = phi2_half(-1.0, -1.0, 0.5)
    assert h == phi2_half(-1.0, -1.0, 0.5)
    # oracle: 0.06251409470966383 - 4.5e-20
    assert abs(2.0 * h - 0.06251409470966383) <= 2e-16


def test_phi2_examples():
    assert phi2(0.0, 0.0, 0.0) == 0.25
    assert abs(phi2(0.0, 0.0, 0.5) - 1.0 / 3.0) <= 2e-16
    for x, y in [(-1.0, 2.0), (3.0, 0.5), (-0.2, -0.7)]:
        assert phi2(x, y, 1.0) == cdf(min(x, y))
        assert phi2(x, y, -1.0) == max(0.0, cdf(x) + cdf(y) - 1.0)


def test_mixed_sign_example():
    # oracle: 0.15487295185860278 + 5.6e-18
    v = phi2(-1.0, 1.0, 0.5)
    assert abs(v - 0.15487295185860278) <= 1e-15
    assert abs(v - (cdf(-1.0) - phi2(-1.0, -1.0, -0.5))) <= 1e-15


def test_domain_errors_and_slack():
    with pytest.raises(DomainError):
        phi2(0.0, 0.0, 1.5)
    with pytest.raises(DomainError):
        phi2(0.0, 0.0, -1.0 - 1e-11)
    with pytest.raises(DomainError):
        Correlation.from_rho(2.0)
    assert phi2(0.3, 0.2, 1.0 + 1e-13) == cdf(0.2)
    assert issubclass(DomainError, ValueError)


def test_nan_and_infinities():
    assert math.isnan(phi2(math.nan, 0.0, 0.5))
    assert math.isnan(phi2(0.0, 0.0, math.nan))
    assert phi2(-math.inf, 1.0, 0.3) == 0.0
    assert phi2(2.0, -math.inf, 0.3) == 0.0
    assert phi2(math.inf, 1.0, 0.3) == cdf(1.0)
    assert phi2(-0.5, math.inf, -0.3) == cdf(-0.5)
    assert phi2(math.inf, math.inf, 0.9) == 1.0


@given(corr)
def test_correlation_invariants(rho):
    c = Correlation.from_rho(rho)
    assert c.s >= 0.0
    assert abs(c.s * c.s + rho * rho - 1.0) <= 4 * 2.0**-53
    assert (c.s == 0.0) == (abs(rho) == 1.0)
    assert c.one_minus == 1.0 - rho and c.one_plus == 1.0 + rho


def test_correlation_lambda():
    assert Correlation.from_rho(0.6).lam == pytest.approx(0.5, rel=1e-15)


@given(coord.filter(lambda v: abs(v) > 1e-3), coord, st.floats(-0.99, 0.99))
def test_terms_generic_branch(x, y, rho):
    t = reduction_terms(x, y, rho)
    assert t.b1 <= 0.0 and t.b2 <= 0.0
    assert t.a_x == pytest.approx((t.b2 / x) ** 2, rel=4 * 2.0**-52, abs=1e-300)
    assert t.c1 == (y / x >= rho)
    assert t.c2 == (x < 0.0)
    assert t.c3 == (x < 0.0 and y >= 0.0)


def _generic(x, y, rho):
    s = math.sqrt((1.0 - rho) * (1.0 + rho))
    b2 = -abs(rho * x - y) / s
    return (b2 / x) ** 2, b2


def _difference(x, y, rho):
    s = math.sqrt((1.0 - rho) * (1.0 + rho))
    if rho > 0:
        tmp = math.sqrt((1.0 - rho) / (1.0 + rho))
        u = (x - y) / x / s - tmp
        return u * u, -abs((x - y) / s - x * tmp)
    tmp = math.sqrt((1.0 + rho) / (1.0 - rho))
    u = (x + y) / x / s - tmp
    return u * u, -abs((x + y) / s - x * tmp)


def test_branch_consistency_at_cutoff():
    rng = np.random.default_rng(5)
    worst = 0.0
    for sign in (1.0, -1.0):
        for rho in (0.99 - 1e-6, 0.99 + 1e-6):
            r = sign * rho
            for x, y in rng.uniform(-10.0, 10.0, (500, 2)):
                if abs(x) < 1e-3:
                    continue
                ga, gb = _generic(x, y, r)
                da, db = _difference(x, y, r)
                worst = max(worst, abs(ga - da) / ga, abs(gb - db) / abs(gb))
                t = reduction_terms(x, y, r)
                ref = (da, db) if abs(r) > 0.99 else (ga, gb)
                assert (t.a_x, t.b2) == ref
    assert worst <= 1e-12


@given(coord, coord, corr)
@settings(max_examples=500)
def test_symmetry_is_exact(x, y, rho):
    assert phi2(x, y, rho) == phi2(y, x, rho)


@given(coord, coord, corr)
@settings(max_examples=500)
def test_reflection_identity(x, y, rho):
    lhs = phi2(x, y, rho)
    rhs = cdf(x) + cdf(y) - 1.0 + phi2(-x, -y, rho)
    assert abs(lhs - rhs) <= 2e-15


@given(coord, coord)
def test_independence(x, y):
    assert abs(phi2(x, y, 0.0) - cdf(x) * cdf(y)) <= 5e-16


@given(st.floats(-8.0, 8.0), st.floats(-0.999, 0.999))
def test_marginal(x, rho):
    assert abs(phi2(x, 9.0, rho) - cdf(x)) <= 1e-14


@given(coord, coord, corr)
@settings(max_examples=500)
def test_frechet_bounds_and_range(x, y, rho):
    v = phi2(x, y, rho)
    assert 0.0 <= v <= 1.0
    px, py = cdf(x), cdf(y)
    assert max(0.0, px + py - 1.0) - 1e-15 <= v <= min(px, py) + 1e-15


def test_monotone_on_grids():
    tol = 2e-16
    grid = np.linspace(-8.0, 8.0, 321)
    for other, rho in [(0.3, 0.5), (-1.2, -0.95), (2.0, 0.999), (-0.5, 0.0)]:
        vals = [phi2(g, other, rho) for g in grid]
        assert all(b >= a - tol for a, b in zip(vals, vals[1:]))
    rgrid = np.linspace(-1.0, 1.0, 401)
    for x, y in [(0.3, -0.4), (-2.0, -2.0), (5.0, -6.0), (1.0, 1.0)]:
        vals = [phi2(x, y, r) for r in rgrid]
        assert all(b >= a - tol for a, b in zip(vals, vals[1:]))


def test_sign_octants_against_oracle():
    rng = np.random.default_rng(17)
    n = 4000
    x = rng.uniform(0.0, 8.0, n) * rng.choice([-1.0, 1.0], n)
    y = rng.uniform(0.0, 8.0, n) * rng.choice([-1.0, 1.0], n)
    rho = rng.choice([-1.0, 1.0], n) * np.where(rng.random(n) < 0.5, rng.random(n), 1.0 - 10.0 ** rng.uniform(-12, -1, n))
    # points with rho x ~ y and rho y ~ x
    k = n // 4
    y[:k] = x[:k] * np.sign(rho[:k]) * (1.0 + rng.uniform(-1e-3, 1e-3, k))
    hi, lo = oracle_batch(x, y, rho)
    errs = np.array([abs((phi2(a, b, r) - h) - l) for a, b, r, h, l in zip(x, y, rho, hi, lo)])
    assert errs.max() <= 1e-14


def test_against_mpmath_spot_checks():
    for x, y, rho in [(-1.0, 1.0, 0.5), (2.5, -0.3, -0.7), (-6.8, -7.1, 0.8), (0.4, 0.45, 0.97)]:
        assert err(phi2(x, y, rho), mp_phi2(x, y, rho)) <= 1e-15

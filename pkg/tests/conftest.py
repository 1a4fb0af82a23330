import math

import mpmath as mp
import pytest

mp.mp.dps = 40


def mp_phi2(x, y, rho):
    """Plackett integral in 40-digit arithmetic; independent of the package."""
    x, y, rho = mp.mpf(x), mp.mpf(y), mp.mpf(rho)
    if rho == 0:
        return mp.ncdf(x) * mp.ncdf(y)

    def f(t):
        return mp.exp(-(x * x - 2 * t * x * y + y * y) / (2 * (1 - t * t))) / mp.sqrt(1 - t * t)

    pts = [0, rho / 2, rho * 0.9, rho * 0.99, rho]
    return mp.ncdf(x) * mp.ncdf(y) + mp.quad(f, pts) / (2 * mp.pi)


def mp_origin(rho):
    return mp.mpf(1) / 4 + mp.asin(mp.mpf(rho)) / (2 * mp.pi)


def err(value, ref):
    return abs(float(mp.mpf(value) - ref))


def dd_err(hi, lo, ref):
    return abs(float(mp.mpf(hi) + mp.mpf(lo) - ref))


def lam(rho):
    return math.sqrt((1.0 - rho) / (1.0 + rho))


@pytest.fixture
def tmp_csv(tmp_path):
    return tmp_path / "profile.csv"


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(capsys):
    """Record and print one acceptance line: ``criterion(k, status, detail)``."""

    def record(k, status, detail):
        line = f"criterion {k:2d}: {status} - {detail}"
        ACCEPTANCE_LINES.append(line)
        with capsys.disabled():
            print(f"\n{line}")

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)

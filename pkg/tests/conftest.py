import math
import time

import pytest

from eit_memory import (BathGrid, SystemParams, TimeGrid, dark_amplitude, discretize_input,
                        integrate_lambda_system, integrate_mode_equations, make_sech_envelope,
                        matched_schedule)

_ACCEPTANCE = {}


@pytest.fixture
def params():
    return SystemParams()


@pytest.fixture
def criterion_report():
    def report(number, passed, detail):
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
        _ACCEPTANCE[number] = line
        print(line)
        return passed
    return report


def pytest_collection_modifyitems(items):
    for item in items:
        if "oracle_run" in getattr(item, "fixturenames", ()):
            item.add_marker(pytest.mark.slow)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[k])


def sech_pulse(width=10.0, center=0.0, half_span=8.0, dt=0.01):
    """Normalized sech pulse on ``center +/- half_span*width``."""
    grid = TimeGrid.span(center - half_span * width, center + half_span * width, dt)
    return make_sech_envelope(width, center, grid).normalized()


class OracleRun:
    """Shared discretized-bath runs on the matched sech pulse (gamma T = 10, window 80)."""

    def __init__(self):
        self.params = SystemParams()
        grid = TimeGrid.span(0.0, 80.0, 0.01)
        self.h = make_sech_envelope(10.0, 40.0, grid, tol=math.inf).normalized()
        self.s = matched_schedule(self.h, self.params)
        self.markov = dark_amplitude(self.h, self.s, self.params)
        self.bath = BathGrid(200.0, 1 / 50, window=grid.duration)
        self._cache = {}

    def modes(self):
        if "modes" not in self._cache:
            t = time.perf_counter()
            xi0 = discretize_input(self.h, self.bath, self.h.grid.t0)
            traj = integrate_mode_equations(xi0, self.s, self.bath)
            self._cache["modes"] = (traj, time.perf_counter() - t)
        return self._cache["modes"]

    def lam(self, g_sqrtN, gamma_a):
        key = ("lambda", g_sqrtN, gamma_a)
        if key not in self._cache:
            p = SystemParams(g_sqrtN=g_sqrtN, gamma_a=gamma_a)
            self._cache[key] = integrate_lambda_system(self.h, self.s, p, self.bath)
        return self._cache[key]


@pytest.fixture(scope="session")
def oracle_run():
    return OracleRun()

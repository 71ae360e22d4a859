"""Hypothesis strategies for smooth random pulses and control schedules."""

import numpy as np
from hypothesis import strategies as st

from eit_memory import ControlSchedule, PulseEnvelope

from oracles import gaussian_sum


@st.composite
def gaussian_pulses(draw, grid, centers, min_width=2.0, max_width=8.0, min_terms=1, max_terms=4,
                    complex_weights=True):
    """Normalized sum of Gaussians with centers drawn from ``centers = (lo, hi)``."""
    n = draw(st.integers(min_terms, max_terms))
    floats = lambda lo, hi: st.floats(lo, hi, allow_nan=False, allow_infinity=False)
    c = draw(st.lists(floats(*centers), min_size=n, max_size=n))
    w = draw(st.lists(floats(min_width, max_width), min_size=n, max_size=n))
    a = draw(st.lists(floats(0.2, 1.0), min_size=n, max_size=n))
    if complex_weights:
        ph = draw(st.lists(floats(0.0, 2 * np.pi), min_size=n, max_size=n))
    else:
        ph = [0.0] * n
    return PulseEnvelope(grid, gaussian_sum(grid.times, c, w, a, ph)).normalized()


@st.composite
def random_schedules(draw, grid, terms=3):
    """``cos(theta)`` as a logistic function of a random low-frequency Fourier series."""
    floats = lambda lo, hi: st.floats(lo, hi, allow_nan=False, allow_infinity=False)
    f = np.full(grid.count, draw(floats(-3.0, 3.0)))
    t = grid.times
    for _ in range(terms):
        amp, freq, phase = draw(floats(0.0, 3.0)), draw(floats(0.0, 0.5)), draw(floats(0.0, 2 * np.pi))
        f += amp * np.sin(freq * t + phase)
    return ControlSchedule(grid, 1.0 / (1.0 + np.exp(-f)))

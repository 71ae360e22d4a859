"""Checking the Markov capture model against explicit bath integrations.

The cavity decay model assumes a flat, infinitely broad reservoir. Here the
reservoir is 10^4 discrete modes and the coupled equations are integrated
directly; the Markov amplitude d(t) should match |D(t)| closely. A second
run keeps the excited atomic state and shows that capture fails once the
collective coupling drops below the adiabatic threshold. Expect about 30 s.
"""

# %%
import math
import time

import numpy as np

from eit_memory import (BathGrid, SystemParams, TimeGrid, adiabaticity_margins, dark_amplitude,
                        discretize_input, integrate_lambda_system, integrate_mode_equations,
                        make_sech_envelope, matched_schedule)

params = SystemParams()
grid = TimeGrid.span(0.0, 80.0, 0.01)
h = make_sech_envelope(10.0, 40.0, grid, tol=math.inf).normalized()
s = matched_schedule(h, params)
markov = dark_amplitude(h, s, params)

# %%
bath = BathGrid(200.0, 1 / 50, window=grid.duration)
start = time.perf_counter()
modes = integrate_mode_equations(discretize_input(h, bath, grid.t0), s, bath)
print(f"{bath.n_modes} modes, {time.perf_counter() - start:.1f} s")
print(f"max ||D| - d| = {np.max(np.abs(np.abs(modes.D) - np.abs(markov.d))):.2e}")
print(f"norm drift    = {modes.norm_drift:.1e}")

# %% [markdown]
# The same drive on the three-level model, strong and weak coupling.

# %%
for g in (10.0, math.sqrt(0.1)):
    p = SystemParams(g_sqrtN=g, gamma_a=1.0)
    m = adiabaticity_margins(p, 0.0, 10.0)
    lt = integrate_lambda_system(h, s, p, bath)
    print(f"g sqrt(N) = {g:6.3f}: capture {lt.capture_efficiency:.4f}, "
          f"peak excited population {lt.max_excited_population:.2e}, adiabatic={m.adiabatic}")

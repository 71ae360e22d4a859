"""Capture, hold and release of a single-photon pulse.

A sech pulse enters an empty cavity containing the atomic ensemble. The
control field follows the impedance-matched schedule so nothing is reflected,
the excitation sits in the collective spin for ``t_s``, and the time-reversed
schedule plays it back as the mirror image of the input.
"""

# %%
import math

import numpy as np

from eit_memory import (SystemParams, TimeGrid, dark_amplitude, make_sech_envelope, matched_schedule,
                        output_envelope)
from eit_memory.cli import DEFAULTS, fig2a_trace

params = SystemParams(gamma_0=1e-3)
grid = TimeGrid.span(0.0, 160.0, 0.01)
h = make_sech_envelope(10.0, 80.0, grid).normalized()

# %% [markdown]
# For a sech pulse of width T the matched schedule has a closed form,
# cos^2(theta) = (1 - tanh((t - tc)/T)) / T, so the drive starts at 2/T and
# switches off as the pulse passes.

# %%
s = matched_schedule(h, params)
closed = (1 - np.tanh((h.times - 80.0) / 10.0)) / 10.0
print(f"max |cos^2 - closed form|  = {np.max(np.abs(s.cos_theta**2 - closed)):.2e}")
print(f"Rabi frequency at the start = {s.omega(params)[0]:.3f} (units of gamma)")

# %%
d = dark_amplitude(h, s, params)
leak = output_envelope(h, d, params, s)
print(f"|d(end)|^2 = {abs(d.final) ** 2:.8f}, reflected energy = {leak.norm():.2e}")

# %% [markdown]
# The full trace is what the `fig2a` command writes. Mirror error is measured
# against the input peak; the energy ratio should equal exp(-gamma_0 t_s).

# %%
cols, summary = fig2a_trace(DEFAULTS)
print(f"hold time {summary['t_s']:.0f}, reversal at t_d = {summary['t_d']:.0f}")
print(f"mirror error {summary['mirror_error']:.2e}")
print(f"energy ratio {summary['energy_ratio']:.6f} vs {math.exp(-1e-3 * summary['t_s']):.6f}")

# %%
# a coarse text rendering of input and output intensity
t = cols["t"]
for lo in range(0, int(t[-1]), 20):
    sel = (t >= lo) & (t < lo + 20)
    i_in = np.max(cols["h_in"][sel] ** 2)
    i_out = np.max(cols["h_out"][sel] ** 2)
    print(f"{lo:4d}-{lo + 20:<4d} in {'#' * int(400 * i_in):<22s} out {'#' * int(400 * i_out)}")

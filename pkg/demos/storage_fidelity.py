"""Storage fidelity of nonclassical states versus hold time.

With ideal matching the whole memory acts as an amplitude-damping channel of
transmissivity exp(-gamma_0 t_s). A Fock state loses fidelity as
exp(-n gamma_0 t_s); a squeezed vacuum with the same mean photon number
decays more slowly because its vacuum component survives loss.
"""

# %%
import math

import numpy as np

from eit_memory import SystemParams, fidelity_sweep, make_fock, make_squeezed_vacuum, squeezing_for_mean_photons

params = SystemParams(gamma_0=1e-3)
t_s = np.linspace(0.0, 3000.0, 7)

# %%
rows = {}
for n in (1, 2, 3):
    rows[f"fock {n}"] = [p.fidelity for p in fidelity_sweep(make_fock(n, n + 2), t_s, params)]
r = squeezing_for_mean_photons(1.0)
rows["squeezed, nbar=1"] = [p.fidelity for p in fidelity_sweep(make_squeezed_vacuum(r, 36), t_s, params)]

print("t_s      " + "".join(f"{t:>9.0f}" for t in t_s))
for name, f in rows.items():
    print(f"{name:<18s}" + "".join(f"{x:9.4f}" for x in f))

# %% [markdown]
# Dividing the log-fidelity by the photon number collapses the Fock curves.

# %%
for n in (1, 2, 3):
    f = np.array(rows[f"fock {n}"])
    print(f"n={n}: -ln f / (n t_s) = {-math.log(f[-1]) / (n * t_s[-1]):.6f}")

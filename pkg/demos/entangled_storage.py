"""Storing one half each of an entangled pair in two memories.

The Bell-like state (|00> + |11>)/sqrt(2) is sent through two independent
memory cycles. Perfect matching leaves the negativity at 0.5; metastable
decay reduces it as eta^2/2 with eta = exp(-gamma_0 t_s), positive for any
finite hold time.
"""

# %%
import math

import numpy as np

from eit_memory import bipartite_store, negativity, two_mode_ket

bell = two_mode_ket(np.array([[1, 0], [0, 1]]) / math.sqrt(2))
print(f"input negativity {negativity(bell):.6f}")

# %%
for gt in (0.0, 0.1, 0.5, 1.0, 2.0, 5.0):
    out = bipartite_store(bell, 1.0, 1.0, 1e-3, gt / 1e-3)
    print(f"gamma_0 t_s = {gt:3.1f}: negativity {negativity(out):.6f}, "
          f"closed form {math.exp(-2 * gt) / 2:.6f}")

# %% [markdown]
# An imperfect capture (|d| < 1) acts like extra loss on one side only.

# %%
for d in (1.0, 0.9, 0.5):
    print(f"|d_left| = {d}: negativity {negativity(bipartite_store(bell, d, 1.0, 0.0, 0.0)):.6f}")

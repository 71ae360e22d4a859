"""Impedance-matched control schedules and adiabaticity checks.

A schedule is impedance matched to an input pulse when the outgoing field
vanishes identically, which requires

    -d/dt ln cos(theta) + d/dt ln |h| = (gamma/2) cos^2(theta)

with solution ``cos^2(theta) = |h|^2 / (gamma * int_{-inf}^t |h|^2)``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import UnmatchableError
from .grid import cumulative_trapezoid
from .ladder import ControlSchedule

MATCH_SLACK = 1e-12


def leading_tail_mass(h):
    """Estimate ``int_{-inf}^{t0} |h|^2`` by extrapolating the leading edge exponentially.

    Returns 0 when the first samples are zero or not rising.
    """
    i0, i1 = h.intensity[:2]
    if i0 <= 0 or i1 <= i0:
        return 0.0
    rate = math.log(i1 / i0) / h.grid.dt
    return i0 / rate


def matched_schedule(h, params, clamp=False, prior_mass=None):
    """Schedule that traps ``h`` without reflection.

    Parameters
    ----------
    h : PulseEnvelope
        Input envelope. Only ``|h|^2`` enters, so the result is invariant
        under a global phase and overall scale of ``h``.
    params : SystemParams
    clamp : bool
        Best-effort mode: cap ``cos^2(theta)`` at 1 instead of raising. The
        resulting capture is then incomplete (``d(end) < 1``).
    prior_mass : float, optional
        Pulse energy arriving before the first grid point. Defaults to an
        exponential extrapolation of the leading edge.

    Raises
    ------
    UnmatchableError
        If ``cos^2(theta)`` exceeds 1 anywhere, i.e. the pulse rises faster
        than the cavity decays; carries the first offending time.
    """
    inten = h.intensity
    if not np.any(inten > 0):
        raise ValueError("cannot match an all-zero envelope")
    if prior_mass is None:
        prior_mass = leading_tail_mass(h)
    cum = prior_mass + cumulative_trapezoid(inten, h.grid.dt)

    c2 = np.full(inten.shape, np.nan)
    defined = cum > 0
    c2[defined] = inten[defined] / (params.gamma * cum[defined])
    c2[~defined & (inten > 0)] = np.inf

    bad = np.flatnonzero(c2 > 1.0 + MATCH_SLACK)
    if bad.size and not clamp:
        t_bad = float(h.times[bad[0]])
        raise UnmatchableError(
            f"pulse is too fast for the cavity: cos^2(theta) = {c2[bad[0]]:.4g} > 1 "
            f"at t = {t_bad:.6g}", time=t_bad)
    c2 = np.minimum(c2, 1.0)

    # before onset the expression is 0/0; continue the first defined value leftwards
    first = np.flatnonzero(~np.isnan(c2))[0]
    c2[:first] = c2[first]
    return ControlSchedule(h.grid, np.sqrt(c2))


def impedance_residual(s, h, params, window=None):
    """Max-norm residual of the impedance-matching ODE on interior grid points.

    Derivatives are centered differences, so a matched schedule gives a
    residual that falls off as ``dt^2``.

    Raises
    ------
    ValueError
        If ``|h|`` or ``cos(theta)`` is not strictly positive in the window.
    """
    s.grid.require_same(h.grid, "schedule and envelope")
    c = s.cos_theta
    a = np.abs(h.samples)
    t = h.times
    idx = np.arange(1, h.grid.count - 1)
    if window is not None:
        lo, hi = window
        idx = idx[(t[idx] >= lo) & (t[idx] <= hi)]
    if idx.size == 0:
        raise ValueError("evaluation window contains no interior points")
    span = np.arange(idx[0] - 1, idx[-1] + 2)
    if np.any(a[span] <= 0) or np.any(c[span] <= 0):
        raise ValueError("envelope and cos(theta) must be positive in the evaluation window")
    ln_c, ln_h = np.log(c), np.log(a)
    two_dt = 2.0 * h.grid.dt
    dlnc = (ln_c[idx + 1] - ln_c[idx - 1]) / two_dt
    dlnh = (ln_h[idx + 1] - ln_h[idx - 1]) / two_dt
    res = -dlnc + dlnh - 0.5 * params.gamma * c[idx] ** 2
    return float(np.max(np.abs(res)))


@dataclass(frozen=True)
class AdiabaticityMargins:
    """Ratios of ``Omega^2 + g^2 N`` to the three adiabaticity scales.

    ``cavity`` compares with ``gamma*gamma_a``, ``pulse`` with ``gamma_a/T``
    and ``mixed`` with ``sqrt(gamma/T)*gamma_a``.
    """

    cavity: float
    pulse: float
    mixed: float
    threshold: float = 10.0

    @property
    def ratios(self):
        return (self.cavity, self.pulse, self.mixed)

    @property
    def adiabatic(self):
        return min(self.ratios) >= self.threshold

    @property
    def binding(self):
        names = ("cavity", "pulse", "mixed")
        return names[int(np.argmin(self.ratios))]


def adiabaticity_margins(params, omega_min, T, threshold=10.0):
    if not T > 0:
        raise ValueError("pulse duration must be positive")
    coupling = omega_min**2 + params.g_sqrtN**2
    ga, g = params.gamma_a, params.gamma
    scales = (g * ga, ga / T, math.sqrt(g / T) * ga)
    ratios = [coupling / x if x > 0 else math.inf for x in scales]
    return AdiabaticityMargins(*ratios, threshold=threshold)

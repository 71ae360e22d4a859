"""Dark-state algebra and Markov capture dynamics of the Lambda-atom cavity.

The coupled cavity + ensemble system is described by a mixing angle
``cos(theta) = Omega / sqrt(Omega^2 + g^2 N)``. In the adiabatic, Markov
limit the single-photon dark amplitude ``d(t)`` obeys

    d'(t) = -(gamma/2) cos^2(theta) d + sqrt(gamma) cos(theta) h(t)

and the outgoing field is ``h_out = h - sqrt(gamma) cos(theta) d``.
Multi-photon amplitudes follow ``alpha_k -> (-i d)^k alpha_k``, i.e. the
capture acts on the photon-number state as a pure-loss channel.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import NormalizationError
from .grid import TimeGrid, as_grid, cumulative_trapezoid
from .states import FockStateMatrix, PulseEnvelope, _frozen, grid_from_times, read_columns, write_columns

AMPLITUDE_SLACK = 1e-9


@dataclass(frozen=True)
class SystemParams:
    """Physical rates in units of the bare-cavity decay rate gamma.

    Parameters
    ----------
    gamma : float
        Bare-cavity energy decay rate; fixed to 1 by the unit convention.
    g_sqrtN : float
        Collective vacuum Rabi frequency g*sqrt(N).
    gamma_a : float
        Excited-state linewidth.
    gamma_0 : float
        Metastable (dark-state) decay rate per excitation.
    n_atoms : float
        Atom number; only used to display single-atom couplings.
    """

    gamma: float = 1.0
    g_sqrtN: float = 10.0
    gamma_a: float = 1.0
    gamma_0: float = 1e-3
    n_atoms: float = 1e6

    def __post_init__(self):
        if abs(self.gamma - 1.0) > 1e-12:
            raise ValueError("time is measured in units of 1/gamma, so gamma must be 1")
        if not self.g_sqrtN > 0:
            raise ValueError("g_sqrtN must be positive")
        for name in ("gamma_a", "gamma_0", "n_atoms"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def g(self):
        return self.g_sqrtN / math.sqrt(self.n_atoms) if self.n_atoms > 0 else math.inf


@dataclass(frozen=True, eq=False)
class ControlSchedule:
    """Mixing-angle trajectory ``cos(theta(t_i))`` on a uniform grid."""

    grid: TimeGrid
    cos_theta: np.ndarray

    def __post_init__(self):
        grid = as_grid(self.grid)
        c = np.array(self.cos_theta, dtype=float)
        if c.shape != (grid.count,):
            raise ValueError(f"expected {grid.count} values, got shape {c.shape}")
        if np.any(~np.isfinite(c)) or c.min() < -1e-12 or c.max() > 1 + 1e-12:
            raise ValueError("cos(theta) must lie in [0, 1]")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "cos_theta", _frozen(np.clip(c, 0.0, 1.0), float))

    @classmethod
    def constant(cls, value, grid):
        grid = as_grid(grid)
        return cls(grid, np.full(grid.count, float(value)))

    @property
    def times(self):
        return self.grid.times

    def omega(self, params):
        """Rabi frequency of the drive; NaN where cos(theta) = 1 (unbounded drive)."""
        c = self.cos_theta
        out = np.full(c.shape, np.nan)
        ok = c < 1.0
        out[ok] = params.g_sqrtN * c[ok] / np.sqrt(1.0 - c[ok] ** 2)
        return out

    def reversed_about(self, t_mirror):
        return ControlSchedule(self.grid.reversed_about(t_mirror), self.cos_theta[::-1])

    def to_csv(self, path, params):
        write_columns(path, {"t": self.times, "cos_theta": self.cos_theta,
                             "omega": self.omega(params)})

    @classmethod
    def from_csv(cls, path):
        cols = read_columns(path)
        return cls(grid_from_times(cols["t"]), cols["cos_theta"])


@dataclass(frozen=True, eq=False)
class DarkAmplitudeTrajectory:
    """Single-photon dark-state amplitude ``d(t_i)``."""

    grid: TimeGrid
    d: np.ndarray

    def __post_init__(self):
        grid = as_grid(self.grid)
        d = _frozen(self.d)
        if d.shape != (grid.count,):
            raise ValueError(f"expected {grid.count} values, got shape {d.shape}")
        if np.max(np.abs(d)) > 1.0 + AMPLITUDE_SLACK:
            raise ValueError(f"|d| reaches {np.max(np.abs(d)):.12g} > 1")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "d", d)

    @property
    def times(self):
        return self.grid.times

    @property
    def final(self):
        return complex(self.d[-1])

    def to_csv(self, path):
        write_columns(path, {"t": self.times, "re": self.d.real, "im": self.d.imag})


def mixing_angle_from_rabi(omega, params):
    """``cos(theta) = Omega / sqrt(Omega^2 + g^2 N)``; accepts scalars or arrays."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise ValueError("Rabi frequency must be non-negative")
    with np.errstate(invalid="ignore"):
        c = omega / np.hypot(omega, params.g_sqrtN)
    c = np.where(np.isinf(omega), 1.0, c)
    return float(c) if c.ndim == 0 else c


def rabi_from_mixing_angle(c, params):
    """Inverse of ``mixing_angle_from_rabi``: ``Omega = g sqrt(N) c / sqrt(1 - c^2)``."""
    c = np.asarray(c, dtype=float)
    if np.any(c < 0) or np.any(c > 1):
        raise ValueError("cos(theta) must lie in [0, 1)")
    if np.any(c == 1):
        raise ValueError("cos(theta) = 1 requires an unbounded drive")
    om = params.g_sqrtN * c / np.sqrt(1.0 - c * c)
    return float(om) if om.ndim == 0 else om


def dark_state_coeffs(n, omega, params):
    """Expansion of the n-excitation dark state over ``|n-k>|c^k>``, k = 0..n.

    The coefficient of ``|n-k> |c^k>`` is
    ``sqrt(C(n,k)) (-g sqrt N)^k Omega^(n-k) / (g^2 N + Omega^2)^(n/2)``,
    evaluated as ``sqrt(C(n,k)) (-sin theta)^k cos^(n-k) theta`` to avoid
    overflow at large n.
    """
    if n < 0 or int(n) != n:
        raise ValueError("n must be a non-negative integer")
    if omega < 0:
        raise ValueError("Rabi frequency must be non-negative")
    n = int(n)
    norm = math.hypot(omega, params.g_sqrtN)
    c, s = omega / norm, params.g_sqrtN / norm
    k = np.arange(n + 1)
    log_binom = 0.5 * (gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1))
    with np.errstate(divide="ignore"):
        log_mag = log_binom + _xlogy(k, s) + _xlogy(n - k, c)
    return np.exp(log_mag) * np.where(k % 2 == 0, 1.0, -1.0)


def _xlogy(x, y):
    # x*log(y) with 0*log(0) = 0
    x = np.asarray(x, dtype=float)
    return np.where(x == 0, 0.0, x * np.log(y) if y > 0 else -np.inf)


def _propagate(dt, c, drive, d0=0.0, gamma=1.0):
    """Trapezoid solution of ``d' = -(gamma/2) c^2 d + sqrt(gamma) c drive``.

    The decay factor between neighbouring samples is exact for the
    trapezoid-integrated exponent, so the recursion reproduces the full
    double quadrature of the closed-form integral in a single pass.
    """
    n = c.size
    decay_exp = 0.5 * gamma * cumulative_trapezoid(c * c, dt)
    step = np.exp(-np.diff(decay_exp))
    src = math.sqrt(gamma) * c * drive
    d = np.empty(n, dtype=complex)
    d[0] = d0
    half = 0.5 * dt
    for i in range(n - 1):
        d[i + 1] = step[i] * (d[i] + half * src[i]) + half * src[i + 1]
    return d


def dark_amplitude(h, s, params):
    """Dark-state amplitude ``d(t)`` driven by the normalized input envelope ``h``.

    Implements the Markov solution

        d(t) = sqrt(gamma) int_{t0}^t c(tau) h(tau)
               exp(-(gamma/2) int_tau^t c^2) dtau

    with the inner integral accumulated once, so the cost is linear in the
    number of samples. An all-zero input gives ``d = 0``.
    """
    h.grid.require_same(s.grid, "envelope and schedule")
    if h.is_zero():
        return DarkAmplitudeTrajectory(h.grid, np.zeros(h.grid.count, dtype=complex))
    if not h.is_normalized():
        raise NormalizationError(f"input envelope must be normalized (norm {h.norm():.12g})")
    d = _propagate(h.grid.dt, s.cos_theta, h.samples, gamma=params.gamma)
    return DarkAmplitudeTrajectory(h.grid, d)


def output_envelope(h, traj, params, s):
    """Outgoing pulse ``h_out = h - sqrt(gamma) cos(theta) d``."""
    h.grid.require_same(traj.grid, "envelope and trajectory")
    h.grid.require_same(s.grid, "envelope and schedule")
    return PulseEnvelope(h.grid, h.samples - math.sqrt(params.gamma) * s.cos_theta * traj.d)


def loss_kraus(amplitude, dim):
    """Kraus operators of the pure-loss channel with transmission amplitude ``amplitude``.

    ``A_l |n> = sqrt(C(n, l)) t^(n-l) r^l |n-l>`` with ``r = sqrt(1 - |t|^2)``:
    the retained mode keeps ``n - l`` photons after ``l`` have been
    scattered into a traced-out mode.
    """
    t = complex(amplitude)
    eta = abs(t) ** 2
    if eta > 1.0 + AMPLITUDE_SLACK:
        raise ValueError(f"transmission amplitude |t| = {abs(t):.12g} exceeds 1")
    eta = min(eta, 1.0)
    r = math.sqrt(1.0 - eta)
    ops = np.zeros((dim, dim, dim), dtype=complex)
    for n in range(dim):
        for l in range(n + 1):
            coef = math.sqrt(math.comb(n, l)) * r**l
            ops[l, n - l, n] = coef * t ** (n - l)
    return ops


def apply_kraus(rho, ops):
    out = np.einsum("lij,jk,lmk->im", ops, rho, ops.conj(), optimize=True)
    return 0.5 * (out + out.conj().T)


def loss_channel(rho, amplitude, recycle=True):
    """Pure-loss channel acting on a single-mode state.

    With ``recycle=False`` only the no-loss Kraus operator is kept: lost
    population leaves the truncated space instead of being routed to lower
    photon numbers, and the trace drops accordingly.
    """
    ops = loss_kraus(amplitude, rho.dim)
    if not recycle:
        ops = ops[:1]
    return FockStateMatrix(apply_kraus(rho.rho, ops))


def capture_channel(rho_in, d_final, mode="loss"):
    """Map the input photon state onto the collective atomic excitation.

    Parameters
    ----------
    rho_in : FockStateMatrix
        State of the incoming generalized single mode.
    d_final : complex
        Single-photon dark amplitude at the end of loading, ``|d| <= 1``.
    mode : {"loss", "projection"}
        ``"loss"`` traces out the escaped field (amplitude damping of
        transmissivity ``|d|^2``); ``"projection"`` keeps only the fully
        captured branch ``alpha_k -> (-i d)^k alpha_k`` and renormalizes.
    """
    d_final = complex(d_final)
    if abs(d_final) > 1.0 + AMPLITUDE_SLACK:
        raise ValueError(f"|d_final| = {abs(d_final):.12g} exceeds 1")
    amp = -1j * d_final
    if mode == "loss":
        return loss_channel(rho_in, amp)
    if mode == "projection":
        phases = amp ** np.arange(rho_in.dim)
        rho = phases[:, None] * rho_in.rho * phases.conj()[None, :]
        tr = np.trace(rho).real
        if tr == 0:
            raise ValueError("projection onto the captured branch has zero probability")
        return FockStateMatrix(rho / tr)
    raise ValueError(f"unknown capture mode {mode!r}")

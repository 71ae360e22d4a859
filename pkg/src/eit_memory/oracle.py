"""Reference integrators with an explicitly discretized output continuum.

Two models are integrated without the Markov or adiabatic approximations:

* the dark-mode / bath equations

      D'    = i kappa cos(theta) sum_k xi_k
      xi_k' = -i Delta_k xi_k + i kappa cos(theta) D

* the single-excitation Lambda system (cavity photon ``e``, collective
  excited state ``p``, collective spin ``s``) with excited-state loss
  ``gamma_a`` entering as a non-Hermitian decay of ``p``.

The bath is a flat band of ``W/delta`` modes with ``gamma = 2 pi kappa^2 / delta``.
Both are stepped with classical fixed-step RK4.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numba
import numpy as np

from .errors import BandwidthError, RecurrenceError, StepSizeError
from .grid import TimeGrid, trapezoid
from .ladder import ControlSchedule, rabi_from_mixing_angle
from .states import write_columns


@dataclass(frozen=True)
class BathGrid:
    """Flat band of detunings ``Delta_k`` spanning ``[-W/2, W/2]`` with spacing ``delta``.

    ``window`` is the longest simulation time the bath must support; it must
    be shorter than the recurrence time ``2 pi / delta``.
    """

    width: float = 200.0
    spacing: float = 1.0 / 50
    window: float = 100.0
    gamma: float = 1.0

    def __post_init__(self):
        if not (self.width > 0 and self.spacing > 0):
            raise ValueError("bath width and spacing must be positive")
        if self.spacing >= self.width:
            raise ValueError("bath spacing must be smaller than its width")
        if self.recurrence_time <= self.window:
            raise RecurrenceError(
                f"bath recurrence time 2*pi/delta = {self.recurrence_time:.4g} does not exceed "
                f"the simulation window {self.window:.4g}; refine delta")
        if abs(2 * math.pi * self.kappa**2 / self.spacing - self.gamma) > 1e-12 * self.gamma:
            raise AssertionError("bath coupling inconsistent with gamma")

    @property
    def n_modes(self):
        return int(round(self.width / self.spacing))

    @property
    def detunings(self):
        m = self.n_modes
        return (np.arange(m) - 0.5 * (m - 1)) * self.spacing

    @property
    def kappa(self):
        return math.sqrt(self.gamma * self.spacing / (2 * math.pi))

    @property
    def recurrence_time(self):
        return 2 * math.pi / self.spacing

    @property
    def max_step(self):
        return min(0.02 / self.gamma, 0.1 / self.width)

    def check_window(self, duration):
        if duration >= self.recurrence_time:
            raise RecurrenceError(
                f"simulation window {duration:.4g} reaches the bath recurrence time "
                f"{self.recurrence_time:.4g}")


def rms_bandwidth(h):
    """``sqrt(int |h'|^2 / int |h|^2)``, angular frequency units of gamma."""
    dh = np.gradient(h.samples, h.grid.dt)
    return math.sqrt(trapezoid(np.abs(dh) ** 2, h.grid.dt) / trapezoid(h.intensity, h.grid.dt))


@numba.njit(cache=True)
def _fourier_weights(samples, weights, det, t_start, t0, dt):
    m = det.size
    out = np.zeros(m, dtype=np.complex128)
    phase = np.empty(m, dtype=np.complex128)
    step = np.empty(m, dtype=np.complex128)
    for k in range(m):
        phase[k] = np.exp(1j * det[k] * (t0 - t_start))
        step[k] = np.exp(1j * det[k] * dt)
    for j in range(samples.size):
        w = weights[j] * samples[j]
        if w != 0:
            for k in range(m):
                out[k] += w * phase[k]
        for k in range(m):
            phase[k] *= step[k]
    return out


@numba.njit(cache=True)
def _synthesize(xi, det, t_ref, t0, dt, count):
    m = det.size
    out = np.zeros(count, dtype=np.complex128)
    phase = np.empty(m, dtype=np.complex128)
    step = np.empty(m, dtype=np.complex128)
    for k in range(m):
        phase[k] = xi[k] * np.exp(-1j * det[k] * (t0 - t_ref))
        step[k] = np.exp(-1j * det[k] * dt)
    for j in range(count):
        acc = 0j
        for k in range(m):
            acc += phase[k]
            phase[k] *= step[k]
        out[j] = acc
    return out


def discretize_input(h, bath, t_start):
    """Bath amplitudes ``xi_k`` at ``t_start`` that carry the single-photon pulse ``h``.

    ``xi_k`` is the Fourier component of ``h`` at ``Delta_k`` with phase
    referenced to ``t_start``, scaled to ``sum |xi_k|^2 = 1``. Freely evolved,
    ``sqrt(delta/2pi) sum_k xi_k exp(-i Delta_k (t - t_start))`` reproduces
    ``h(t)``.
    """
    det = bath.detunings
    if h.is_zero():
        return np.zeros(det.size, dtype=complex)
    bw = rms_bandwidth(h)
    if bath.width < 20 * bw:
        raise BandwidthError(f"bath width {bath.width:g} is below 20x the pulse bandwidth {bw:.4g}")
    bath.check_window(h.grid.duration)
    w = np.full(h.grid.count, h.grid.dt)
    w[0] = w[-1] = 0.5 * h.grid.dt
    xi = _fourier_weights(np.ascontiguousarray(h.samples, dtype=complex), w, det,
                          float(t_start), h.grid.t0, h.grid.dt)
    return xi / math.sqrt(np.sum(np.abs(xi) ** 2))


def free_field(xi, bath, t_ref, grid):
    """Field ``sqrt(delta/2pi) sum_k xi_k exp(-i Delta_k (t - t_ref))`` on ``grid``.

    With ``xi`` taken after the interaction this is the outgoing pulse.
    """
    out = _synthesize(np.ascontiguousarray(xi, dtype=complex), bath.detunings,
                      float(t_ref), grid.t0, grid.dt, grid.count)
    return math.sqrt(bath.spacing / (2 * math.pi)) * out


@numba.njit(cache=True, fastmath=True)
def _rk4_modes(d, xi, det, kappa, c_half, h, nsub, nsamp, d_hist, norm_hist):
    m = xi.size
    acc = np.empty(m, dtype=np.complex128)
    tmp = np.empty(m, dtype=np.complex128)
    s1 = 0j
    nrm = 0.0
    for k in range(m):
        s1 += xi[k]
        nrm += xi[k].real ** 2 + xi[k].imag ** 2
    d_hist[0] = d
    norm_hist[0] = nrm + abs(d) ** 2
    step = 0
    for sample in range(1, nsamp):
        for _ in range(nsub):
            c1 = c_half[2 * step]
            c2 = c_half[2 * step + 1]
            c3 = c_half[2 * step + 2]
            kd1 = 1j * kappa * c1 * s1
            a = 1j * kappa * c1 * d
            s2 = 0j
            for k in range(m):
                kk = -1j * det[k] * xi[k] + a
                acc[k] = kk
                v = xi[k] + 0.5 * h * kk
                tmp[k] = v
                s2 += v
            d2 = d + 0.5 * h * kd1
            kd2 = 1j * kappa * c2 * s2
            a = 1j * kappa * c2 * d2
            s3 = 0j
            for k in range(m):
                kk = -1j * det[k] * tmp[k] + a
                acc[k] += 2.0 * kk
                v = xi[k] + 0.5 * h * kk
                tmp[k] = v
                s3 += v
            d3 = d + 0.5 * h * kd2
            kd3 = 1j * kappa * c2 * s3
            a = 1j * kappa * c2 * d3
            s4 = 0j
            for k in range(m):
                kk = -1j * det[k] * tmp[k] + a
                acc[k] += 2.0 * kk
                v = xi[k] + h * kk
                tmp[k] = v
                s4 += v
            d4 = d + h * kd3
            kd4 = 1j * kappa * c3 * s4
            a = 1j * kappa * c3 * d4
            s1 = 0j
            nrm = 0.0
            for k in range(m):
                kk = -1j * det[k] * tmp[k] + a
                v = xi[k] + (h / 6.0) * (acc[k] + kk)
                xi[k] = v
                s1 += v
                nrm += v.real ** 2 + v.imag ** 2
            d = d + (h / 6.0) * (kd1 + 2.0 * kd2 + 2.0 * kd3 + kd4)
            step += 1
        d_hist[sample] = d
        norm_hist[sample] = nrm + abs(d) ** 2
    return d


@numba.njit(cache=True, fastmath=True)
def _rk4_lambda(y, xi, det, kappa, g, half_ga, om_half, h, nsub, nsamp, y_hist, norm_hist):
    # y = (e, p, s); the bath couples to the cavity amplitude e only
    m = xi.size
    acc = np.empty(m, dtype=np.complex128)
    tmp = np.empty(m, dtype=np.complex128)
    e, p, s = y[0], y[1], y[2]
    sum1 = 0j
    nrm = 0.0
    for k in range(m):
        sum1 += xi[k]
        nrm += xi[k].real ** 2 + xi[k].imag ** 2
    y_hist[0, 0], y_hist[0, 1], y_hist[0, 2] = e, p, s
    norm_hist[0] = nrm + abs(e) ** 2 + abs(p) ** 2 + abs(s) ** 2
    step = 0
    for sample in range(1, nsamp):
        for _ in range(nsub):
            o1 = om_half[2 * step]
            o2 = om_half[2 * step + 1]
            o3 = om_half[2 * step + 2]

            ke1 = 1j * kappa * sum1 + 1j * g * p
            kp1 = -half_ga * p + 1j * g * e + 1j * o1 * s
            ks1 = 1j * o1 * p
            a = 1j * kappa * e
            sum2 = 0j
            for k in range(m):
                kk = -1j * det[k] * xi[k] + a
                acc[k] = kk
                v = xi[k] + 0.5 * h * kk
                tmp[k] = v
                sum2 += v
            e2 = e + 0.5 * h * ke1
            p2 = p + 0.5 * h * kp1
            s2 = s + 0.5 * h * ks1

            ke2 = 1j * kappa * sum2 + 1j * g * p2
            kp2 = -half_ga * p2 + 1j * g * e2 + 1j * o2 * s2
            ks2 = 1j * o2 * p2
            a = 1j * kappa * e2
            sum3 = 0j
            for k in range(m):
                kk = -1j * det[k] * tmp[k] + a
                acc[k] += 2.0 * kk
                v = xi[k] + 0.5 * h * kk
                tmp[k] = v
                sum3 += v
            e3 = e + 0.5 * h * ke2
            p3 = p + 0.5 * h * kp2
            s3 = s + 0.5 * h * ks2

            ke3 = 1j * kappa * sum3 + 1j * g * p3
            kp3 = -half_ga * p3 + 1j * g * e3 + 1j * o2 * s3
            ks3 = 1j * o2 * p3
            a = 1j * kappa * e3
            sum4 = 0j
            for k in range(m):
                kk = -1j * det[k] * tmp[k] + a
                acc[k] += 2.0 * kk
                v = xi[k] + h * kk
                tmp[k] = v
                sum4 += v
            e4 = e + h * ke3
            p4 = p + h * kp3
            s4 = s + h * ks3

            ke4 = 1j * kappa * sum4 + 1j * g * p4
            kp4 = -half_ga * p4 + 1j * g * e4 + 1j * o3 * s4
            ks4 = 1j * o3 * p4
            a = 1j * kappa * e4
            sum1 = 0j
            nrm = 0.0
            for k in range(m):
                kk = -1j * det[k] * tmp[k] + a
                v = xi[k] + (h / 6.0) * (acc[k] + kk)
                xi[k] = v
                sum1 += v
                nrm += v.real ** 2 + v.imag ** 2
            e = e + (h / 6.0) * (ke1 + 2.0 * ke2 + 2.0 * ke3 + ke4)
            p = p + (h / 6.0) * (kp1 + 2.0 * kp2 + 2.0 * kp3 + kp4)
            s = s + (h / 6.0) * (ks1 + 2.0 * ks2 + 2.0 * ks3 + ks4)
            step += 1
        y_hist[sample, 0], y_hist[sample, 1], y_hist[sample, 2] = e, p, s
        norm_hist[sample] = nrm + abs(e) ** 2 + abs(p) ** 2 + abs(s) ** 2


def _substeps(grid, max_step, dt):
    if dt is None:
        nsub = max(1, math.ceil(grid.dt / max_step - 1e-9))
    else:
        if dt > max_step * (1 + 1e-12):
            raise StepSizeError(f"integration step {dt:g} exceeds the stability bound {max_step:g}")
        nsub = max(1, int(round(grid.dt / dt)))
        if abs(nsub * dt - grid.dt) > 1e-9 * grid.dt:
            raise StepSizeError(f"integration step {dt:g} must divide the grid spacing {grid.dt:g}")
    return nsub, grid.dt / nsub


def _half_step_values(grid, values, nsub):
    nsteps = nsub * (grid.count - 1)
    t_half = grid.t0 + (grid.dt / nsub) * 0.5 * np.arange(2 * nsteps + 1)
    return np.interp(t_half, grid.times, values)


@dataclass(frozen=True, eq=False)
class ModeTrajectory:
    grid: TimeGrid
    D: np.ndarray
    norm: np.ndarray
    xi_final: np.ndarray
    h_out: np.ndarray
    step: float

    @property
    def norm_drift(self):
        return float(np.max(np.abs(self.norm - self.norm[0])))

    def to_csv(self, path):
        write_columns(path, {"t": self.grid.times, "abs_D": np.abs(self.D), "re_D": self.D.real,
                             "im_D": self.D.imag, "norm": self.norm})


def integrate_mode_equations(xi0, s, bath, dt=None, d0=0.0):
    """Integrate the dark-mode + bath equations over the schedule grid.

    ``xi0`` must be referenced to the first grid time. ``cos(theta)`` is
    linearly interpolated between schedule samples. The outgoing pulse is
    reconstructed from the final bath amplitudes, so it is exact except at
    the very last sample, where only half of the instantaneous emission has
    entered the bath yet.

    Raises
    ------
    StepSizeError
        If ``dt`` exceeds ``min(0.02/gamma, 0.1/W)``.
    """
    grid = s.grid
    bath.check_window(grid.duration)
    nsub, step = _substeps(grid, bath.max_step, dt)
    c_half = _half_step_values(grid, s.cos_theta, nsub)
    xi = np.array(xi0, dtype=complex)
    if xi.shape != (bath.n_modes,):
        raise ValueError(f"expected {bath.n_modes} bath amplitudes, got shape {xi.shape}")
    d_hist = np.empty(grid.count, dtype=complex)
    norm_hist = np.empty(grid.count)
    _rk4_modes(complex(d0), xi, bath.detunings, bath.kappa, c_half, step, nsub,
               grid.count, d_hist, norm_hist)
    h_out = free_field(xi, bath, grid.t_end, grid)
    return ModeTrajectory(grid, d_hist, norm_hist, xi, h_out, step)


@dataclass(frozen=True, eq=False)
class LambdaTrajectory:
    """Amplitudes of cavity photon ``e``, excited state ``p`` and spin wave ``s``."""

    grid: TimeGrid
    e: np.ndarray
    p: np.ndarray
    s: np.ndarray
    norm: np.ndarray
    xi_final: np.ndarray
    cos_theta: Optional[np.ndarray]
    step: float

    @property
    def capture_efficiency(self):
        return float(abs(self.s[-1]) ** 2)

    @property
    def max_excited_population(self):
        return float(np.max(np.abs(self.p) ** 2))

    def dark_amplitude(self):
        """Projection onto the adiabatic dark state ``cos(theta) e - sin(theta) s``."""
        c = self.cos_theta
        return c * self.e - np.sqrt(1.0 - c * c) * self.s

    def to_csv(self, path):
        dark = self.dark_amplitude()
        write_columns(path, {
            "t": self.grid.times, "abs_D": np.abs(dark), "re_D": dark.real, "im_D": dark.imag,
            "norm": self.norm, "pop_e": np.abs(self.e) ** 2, "pop_p": np.abs(self.p) ** 2,
            "pop_s": np.abs(self.s) ** 2})


def integrate_lambda_system(h, omega_schedule, params, bath, dt=None):
    """Single-excitation Lambda-system + bath evolution driven by ``h``.

    Parameters
    ----------
    h : PulseEnvelope
        Incoming single-photon pulse; the system starts empty at ``h``'s first grid time.
    omega_schedule : ControlSchedule or array_like
        Either a mixing-angle schedule (converted to Omega(t)) or Omega
        sampled on ``h``'s grid.
    params : SystemParams
    bath : BathGrid
    """
    grid = h.grid
    if isinstance(omega_schedule, ControlSchedule):
        grid.require_same(omega_schedule.grid, "envelope and schedule")
        cos_theta = np.array(omega_schedule.cos_theta)
        omega = rabi_from_mixing_angle(cos_theta, params)
    else:
        omega = np.asarray(omega_schedule, dtype=float)
        if omega.shape != (grid.count,):
            raise ValueError("Omega must be sampled on the envelope grid")
        cos_theta = omega / np.hypot(omega, params.g_sqrtN)
    fastest = max(params.g_sqrtN, float(np.max(omega)), 0.5 * params.gamma_a)
    max_step = min(bath.max_step, 0.1 / fastest)
    nsub, step = _substeps(grid, max_step, dt)
    xi = discretize_input(h, bath, grid.t0)
    om_half = _half_step_values(grid, omega, nsub)
    y = np.zeros(3, dtype=complex)
    y_hist = np.empty((grid.count, 3), dtype=complex)
    norm_hist = np.empty(grid.count)
    _rk4_lambda(y, xi, bath.detunings, bath.kappa, params.g_sqrtN, 0.5 * params.gamma_a,
                om_half, step, nsub, grid.count, y_hist, norm_hist)
    return LambdaTrajectory(grid, y_hist[:, 0].copy(), y_hist[:, 1].copy(), y_hist[:, 2].copy(),
                            norm_hist, xi, cos_theta, step)

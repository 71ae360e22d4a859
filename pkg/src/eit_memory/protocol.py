"""Capture, storage and release as a composition of pure-loss channels.

Every stage of a memory cycle acts on the photon-number state as a
beam-splitter loss channel, so a cycle is characterised by the product of
its transmission amplitudes: capture ``-i d_in``, storage ``exp(-gamma_0 t_s / 2)``
per excitation and release ``+i d_out``. The release carries the conjugate
of the capture phase, so an ideal round trip is phase neutral.
"""

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .grid import trapezoid
from .impedance import matched_schedule
from .ladder import AMPLITUDE_SLACK, _propagate, capture_channel, dark_amplitude, loss_channel, loss_kraus
from .states import FockStateMatrix, PulseEnvelope, state_fidelity, write_columns

THREADS_ENV = "EIT_MEMORY_THREADS"


@dataclass(frozen=True)
class TimeReverse:
    """Release by mirroring the capture schedule about the reversal time."""


@dataclass(frozen=True, eq=False)
class Tailored:
    """Release into a chosen normalized output envelope (sampled on its own grid)."""

    target: PulseEnvelope


def storage_decay(rho, gamma_0, t_s, recycle=True):
    """Decay of the stored collective excitation during a hold of length ``t_s``.

    Each excitation survives with probability ``exp(-gamma_0 t_s)``, so an
    n-excitation state loses population at ``n gamma_0``. With
    ``recycle=False`` lost population leaves the truncated space.
    """
    if gamma_0 < 0 or t_s < 0:
        raise ValueError("gamma_0 and t_s must be non-negative")
    if gamma_0 * t_s == 0:
        return rho
    return loss_channel(rho, math.exp(-0.5 * gamma_0 * t_s), recycle=recycle)


def _emit(c, dt, d0, gamma):
    d = _propagate(dt, c, np.zeros(c.size), d0=d0, gamma=gamma)
    return math.sqrt(gamma) * c * d


def release(d_stored, target, s_capture, params, t_d=None):
    """Read the stored excitation back out into a travelling pulse.

    Parameters
    ----------
    d_stored : complex
        Dark-state amplitude at the start of the release.
    target : TimeReverse or Tailored
        ``TimeReverse`` plays the capture schedule backwards, mirrored about
        ``t_d``; ``Tailored`` builds the schedule that emits ``target.target``.
    s_capture : ControlSchedule
        Schedule used for loading (needed for ``TimeReverse``).
    t_d : float, optional
        Mirror time for ``TimeReverse``; defaults to the end of the capture
        grid (release starts immediately). Must not precede it.

    Returns
    -------
    envelope : PulseEnvelope
        Emitted pulse, ``d_stored`` times the unit-amplitude emission, in the
        phase-neutral frame.
    d_out : float
        Release efficiency amplitude for a unit stored amplitude.
    """
    d_stored = complex(d_stored)
    if abs(d_stored) > 1.0 + AMPLITUDE_SLACK:
        raise ValueError(f"|d_stored| = {abs(d_stored):.12g} exceeds 1")
    if isinstance(target, TimeReverse):
        t_end = s_capture.grid.t_end
        if t_d is None:
            t_d = t_end
        if t_d < t_end - 1e-9 * max(1.0, abs(t_end)):
            raise ValueError(f"reversal time t_d={t_d} precedes the end of capture at {t_end}")
        sched = s_capture.reversed_about(t_d)
    elif isinstance(target, Tailored):
        g = target.target
        g.require_normalized()
        mid = 0.5 * (g.grid.t0 + g.grid.t_end)
        sched = matched_schedule(g.mirrored(mid), params).reversed_about(mid)
    else:
        raise TypeError(f"unknown release target {target!r}")
    unit = _emit(sched.cos_theta, sched.grid.dt, 1.0, params.gamma)
    d_out = math.sqrt(float(trapezoid(np.abs(unit) ** 2, sched.grid.dt)))
    return PulseEnvelope(sched.grid, d_stored * unit), d_out


@dataclass(frozen=True, eq=False)
class CycleResult:
    rho_out: FockStateMatrix
    released_envelope: Optional[PulseEnvelope]
    capture_amplitude: complex
    release_amplitude: complex
    fidelity: float
    storage_survival: float = 1.0
    input_norm: float = 1.0

    @property
    def eta(self):
        """Overall single-photon transmissivity of the cycle."""
        return abs(self.capture_amplitude) ** 2 * self.storage_survival * abs(self.release_amplitude) ** 2

    @property
    def released_norm(self):
        return self.released_envelope.norm() if self.released_envelope is not None else self.eta

    def report(self):
        d_in, d_out = complex(self.capture_amplitude), complex(self.release_amplitude)
        return {
            "d_in": [d_in.real, d_in.imag],
            "d_out": [d_out.real, d_out.imag],
            "eta": self.eta,
            "fidelity": self.fidelity,
            "input_norm": self.input_norm,
            "released_norm": self.released_norm,
        }

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.report(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _release_amplitude(d_in, d_out):
    # conjugate of the capture phase, so that capture followed by release is phase neutral
    phase = d_in / abs(d_in) if abs(d_in) > 0 else 1.0
    return 1j * d_out * phase.conjugate()


def cycle_channel(rho_in, d_in, survival, d_out, recycle=True, capture_mode="loss"):
    """Capture, storage decay and release applied to a photon-number state."""
    stored = capture_channel(rho_in, d_in, mode=capture_mode)
    if survival < 1.0:
        stored = loss_channel(stored, math.sqrt(survival), recycle=recycle)
    return loss_channel(stored, _release_amplitude(d_in, d_out))


def _simulate_transfer(h, params, release_spec, t_s):
    s = matched_schedule(h, params)
    d_in = dark_amplitude(h, s, params).final
    survival = math.exp(-params.gamma_0 * t_s)
    t_d = s.grid.t_end + 0.5 * t_s
    env, d_out = release(d_in * math.sqrt(survival), release_spec, s, params, t_d=t_d)
    return d_in, d_out, env


def full_cycle(rho_in, h, params, t_s, release_spec=None, matching="simulated",
               recycle=True, capture_mode="loss"):
    """Store ``rho_in`` carried by envelope ``h``, hold for ``t_s``, release it.

    ``matching="ideal"`` takes perfect capture and release (only the storage
    decay acts); ``"simulated"`` derives both amplitudes from the matched
    schedule of ``h``. The fidelity is ``Tr(rho_in rho_out)``.
    """
    if t_s < 0:
        raise ValueError("storage time must be non-negative")
    release_spec = TimeReverse() if release_spec is None else release_spec
    survival = math.exp(-params.gamma_0 * t_s)
    if matching == "ideal":
        d_in, d_out = 1.0 + 0j, 1.0
        env = None
        if isinstance(release_spec, Tailored):
            env = release_spec.target.scaled(math.sqrt(survival))
        elif h is not None:
            env = h.mirrored(h.grid.t_end + 0.5 * t_s).scaled(math.sqrt(survival))
    elif matching == "simulated":
        if h is None:
            raise ValueError("simulated matching needs an input envelope")
        d_in, d_out, env = _simulate_transfer(h, params, release_spec, t_s)
    else:
        raise ValueError(f"matching must be 'ideal' or 'simulated', got {matching!r}")

    rho_out = cycle_channel(rho_in, d_in, survival, d_out, recycle=recycle, capture_mode=capture_mode)
    return CycleResult(
        rho_out=rho_out,
        released_envelope=env,
        capture_amplitude=complex(d_in),
        release_amplitude=complex(d_out),
        fidelity=state_fidelity(rho_in, rho_out),
        storage_survival=survival,
        input_norm=h.norm() if h is not None else 1.0,
    )


class SweepPoint(NamedTuple):
    t_s: float
    fidelity: float
    eta: float
    trace_out: float


def _worker_count(workers):
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get(THREADS_ENV)
    return max(1, int(env)) if env else 1


def fidelity_sweep(rho_in, t_s_values, params, matching="ideal", h=None,
                   release_spec=None, recycle=True, workers=None):
    """Storage fidelity as a function of hold time.

    Capture and release amplitudes do not depend on the hold time, so in
    simulated mode they are computed once. Points may be evaluated on
    several threads (``workers`` or the ``EIT_MEMORY_THREADS`` variable);
    the output order always follows ``t_s_values``.
    """
    t_s_values = [float(t) for t in t_s_values]
    if not t_s_values:
        raise ValueError("need at least one storage time")
    if any(t < 0 for t in t_s_values):
        raise ValueError("storage times must be non-negative")
    if matching == "ideal":
        d_in, d_out = 1.0 + 0j, 1.0
    elif matching == "simulated":
        if h is None:
            raise ValueError("simulated matching needs an input envelope")
        d_in, d_out, _ = _simulate_transfer(h, params, release_spec or TimeReverse(), 0.0)
    else:
        raise ValueError(f"matching must be 'ideal' or 'simulated', got {matching!r}")

    def point(t_s):
        survival = math.exp(-params.gamma_0 * t_s)
        out = cycle_channel(rho_in, d_in, survival, d_out, recycle=recycle)
        eta = abs(d_in) ** 2 * survival * d_out**2
        return SweepPoint(t_s, state_fidelity(rho_in, out), eta, out.trace)

    n = _worker_count(workers)
    if n == 1:
        return [point(t) for t in t_s_values]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(point, t_s_values))


def write_sweep_csv(path, points):
    pts = list(points)
    write_columns(path, {
        "t_s": [p.t_s for p in pts],
        "fidelity": [p.fidelity for p in pts],
        "eta": [p.eta for p in pts],
        "trace_out": [p.trace_out for p in pts],
    })


def mode_cutoff(rho_ab):
    d = math.isqrt(rho_ab.dim)
    if d * d != rho_ab.dim:
        raise ValueError(f"two-mode state dimension {rho_ab.dim} is not a perfect square")
    return d


def two_mode_ket(coeffs):
    """Pure two-mode state from a ``d x d`` amplitude table ``c[n, m]``."""
    c = np.asarray(coeffs, dtype=complex)
    return FockStateMatrix.from_ket(c.reshape(-1) / np.linalg.norm(c))


def bipartite_store(rho_ab, d_left, d_right, gamma_0, t_s, recycle=True):
    """Store a two-mode photon state in two independent ensembles.

    The first tensor factor is captured with amplitude ``d_left`` and the
    second with ``d_right``; both then decay for ``t_s``. The joint map is
    the tensor product of the single-mode channels.
    """
    if gamma_0 < 0 or t_s < 0:
        raise ValueError("gamma_0 and t_s must be non-negative")
    d = mode_cutoff(rho_ab)
    keep = math.exp(-0.5 * gamma_0 * t_s)
    ops = []
    for amp in (d_left, d_right):
        amp = complex(amp)
        if abs(amp) > 1.0 + AMPLITUDE_SLACK:
            raise ValueError(f"|d| = {abs(amp):.12g} exceeds 1")
        k = loss_kraus(-1j * amp * keep, d)
        ops.append(k if recycle else k[:1])
    a, b = ops
    r = rho_ab.rho.reshape(d, d, d, d)
    out = np.einsum("pin,qjm,nmkl,pxk,qyl->ijxy", a, b, r, a.conj(), b.conj(), optimize=True)
    out = out.reshape(d * d, d * d)
    return FockStateMatrix(0.5 * (out + out.conj().T))


def partial_transpose(rho, d):
    """Transpose of the second factor of a ``d x d`` two-mode density matrix."""
    r = np.asarray(rho).reshape(d, d, d, d)
    return r.transpose(0, 3, 2, 1).reshape(d * d, d * d)


def negativity(rho_ab):
    """Sum of the magnitudes of the negative partial-transpose eigenvalues."""
    rho = rho_ab.rho if isinstance(rho_ab, FockStateMatrix) else np.asarray(rho_ab, dtype=complex)
    if np.max(np.abs(rho - rho.conj().T)) > 1e-12:
        raise ValueError("negativity needs a Hermitian matrix")
    d = math.isqrt(rho.shape[0])
    if d * d != rho.shape[0]:
        raise ValueError(f"two-mode state dimension {rho.shape[0]} is not a perfect square")
    lam = np.linalg.eigvalsh(partial_transpose(rho, d))
    return float(-lam[lam < 0].sum())
